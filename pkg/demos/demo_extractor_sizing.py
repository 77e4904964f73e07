#!/usr/bin/env python3
"""
rxkit Extractor Sizing Demo

Walks from the physical source model to extractor parameters:
- homodyne entropy model and the photon-number ceiling
- Toeplitz output length and seed for one 4096-bit block
- Trevisan parameters across output lengths, with the counted GF(2^m) work
"""

from src.bench import bench_trevisan
from src.config.manage import PipelineConfig
from src.entropy.model import certified_min_entropy, photon_bound
from src.extractors.toeplitz import ToeplitzParams
from src.extractors.trevisan import TrevisanParams
from src.pipeline import PostprocessingPipeline

LASER_POWER_W = 1e-3
WAVELENGTH_M = 1550e-9
WINDOW_S = 1e-9


def main():
    print("rxkit Extractor Sizing Demo")
    print("=" * 60)

    print("\n📋 SOURCE MODEL")
    print("-" * 40)
    pipeline = PostprocessingPipeline(PipelineConfig())
    report = pipeline.entropy_report()
    print(f"   quantum variance:   {report.sigma2_quantum:.4g} V^2")
    print(f"   min-entropy:        {report.min_entropy_bits:.3f} bits / sample")
    print(f"   Shannon entropy:    {report.shannon_bits:.3f} bits / sample")
    ceiling = photon_bound(LASER_POWER_W, WAVELENGTH_M, WINDOW_S)
    print(f"   photon ceiling:     {ceiling:.2f} bits / sample (1 mW, 1550 nm, 1 ns)")

    print("\n📋 TOEPLITZ")
    print("-" * 40)
    k = certified_min_entropy(report.min_entropy_bits, 4096, report.adc_bits)
    for eps_log2 in (-50, -100, -200):
        params = ToeplitzParams.from_entropy(4096, k, eps_log2)
        print(f"   eps = 2^{eps_log2:<5} k = {k:.1f} -> m = {params.m}, seed = {params.seed_bits} bits")

    print("\n📋 TREVISAN (n_i = 2^15, m_e = 128)")
    print("-" * 40)
    for n_f_log2 in (10, 12, 14):
        params = TrevisanParams.from_degrees(1 << 15, 1 << n_f_log2)
        print(
            f"   n_f = 2^{n_f_log2}: m_d = {params.m_d}, b = {params.b}, d = {params.d}, "
            f"log2(eps) = {params.epsilon_log2:.1f}, rho = {params.rho:.3f}"
        )

    print("\n📋 TREVISAN WORK (n_i = 2 n_f)")
    print("-" * 40)
    for row in bench_trevisan([256, 512, 1024]):
        print(
            f"   n_f = {row['n_f']:<5} counted = {row['counted_gf_ops']:<8} "
            f"theoretical = {row['theoretical_gf_ops']:<8} {row['bits_per_second']:.0f} bit/s"
        )

    print("\n" + "=" * 60)
    print("✅ Sizing walkthrough completed")


if __name__ == "__main__":
    main()
