"""
Tests for Trevisan's extractor: parameter sizing, the weak design, the concatenated code
and agreement between the batch, scalar and threaded evaluation paths.
"""

import itertools
import math
import unittest
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from src.bits.bitvector import BitVector, gather
from src.common.errors import ConstructionError, ContractError, SizingError
from src.extractors.batch import BatchField, bits_to_words, ints_to_words, join_words, parity
from src.extractors.design import WeakDesign, block_capacities
from src.extractors.small_field import evaluate_polynomials, multiplication_table
from src.extractors.trevisan import (
    RSSymbolCache,
    TrevisanExtractor,
    TrevisanParams,
    build_design,
    codeword_bit,
    extract,
    extract_batch,
    message_chunks,
    rho,
    rs_symbol,
    solve_params,
    theoretical_gf_ops,
)
from src.fields.gf2m import FieldSpec, GFOpCounter, gf_mul_reference, poly_eval_int


class TestParams(unittest.TestCase):
    """Test parameter sizing against the 2^15 -> 2^14 speed-demo set."""

    def test_reference_set(self):
        params = solve_params(1 << 15, 1 << 14)
        self.assertEqual((params.m_e, params.m_d, params.b, params.d), (128, 8, 7, 458752))
        self.assertEqual(params.d, 4 * 128**2 * 7)
        self.assertAlmostEqual(params.epsilon_log2, -40.5)
        self.assertEqual(params.seed_bits, 458752)
        self.assertEqual(params.n_bar_log2, 256)
        self.assertEqual(params.as_dict()["d"], 458752)

    def test_reference_set_flags_low_ratio(self):
        params = solve_params(1 << 15, 1 << 14, k=1 << 15)
        self.assertLess(params.rho, 1)
        self.assertTrue(any("rho" in w for w in params.warnings()))

    def test_epsilon_picks_degree(self):
        params = solve_params(1 << 15, 1 << 14, epsilon_log2=-40.5)
        self.assertEqual(params.m_e, 128)
        self.assertAlmostEqual(params.epsilon_log2, -40.5)
        # 24 bits required, rounded up to the next field with a known polynomial
        small = solve_params(1 << 8, 1 << 4, epsilon_log2=-2)
        self.assertEqual(small.m_e, 32)
        self.assertAlmostEqual(small.epsilon_log2, -6.0)
        self.assertEqual(small.d, 4096)

    def test_epsilon_too_small(self):
        with self.assertRaises(SizingError):
            solve_params(1 << 15, 1 << 14, epsilon_log2=-100)

    def test_output_above_entropy(self):
        with self.assertRaises(SizingError):
            TrevisanParams.from_degrees(1024, 512, m_e=128, k=300)

    def test_power_of_two_lengths(self):
        with self.assertRaises(SizingError):
            solve_params(1000, 512)
        with self.assertRaises(SizingError):
            solve_params(1024, 1024)

    def test_rho_identities(self):
        n_f, eps, d = 1024, -30.0, 5000
        k = n_f + 3 * (math.log2(n_f) - eps) + d + 3
        self.assertAlmostEqual(rho(k, n_f, eps, d), 1.0)
        self.assertAlmostEqual(rho(k - n_f, n_f, eps, d), 0.0)

    def test_theoretical_ops(self):
        params = solve_params(1 << 15, 1 << 14)
        self.assertEqual(params.chunks, 256)
        self.assertEqual(theoretical_gf_ops(params), (1 << 14) * 256)


class TestWeakDesign(unittest.TestCase):
    def test_reference_capacities(self):
        capacities = block_capacities(256, 1 << 14, 7)
        self.assertEqual(capacities, [256, 8192, 4096, 2048, 1024, 512, 256])
        self.assertEqual(sum(capacities), 1 << 14)

    def test_worked_example_sets(self):
        """Test: constant 3 in block 1 and 1 + x in block 2 with q = 4."""
        design = WeakDesign(m_e=2, m_d=2, n_f=16, blocks=3)
        np.testing.assert_array_equal(design.indices(3), [3, 7, 11, 15])
        self.assertEqual(design.polynomial(9), [1, 1])
        np.testing.assert_array_equal(design.indices(9), [17, 20, 27, 30])

    def test_toy_exhaustive(self):
        for n_f in (1, 2, 5, 8, 16):
            blocks = max(1, (n_f - 1).bit_length() - 2 + 1)
            design = WeakDesign(m_e=2, m_d=2, n_f=n_f, blocks=blocks)
            self.assertLessEqual(design.verify_exhaustive(), n_f)
            for i in range(n_f):
                self.assertEqual(len(set(design.indices(i).tolist())), 4)

    def test_index_matrix_matches_indices(self):
        design = WeakDesign(m_e=2, m_d=2, n_f=16, blocks=3)
        matrix = design.index_matrix(0, 16)
        for i in range(16):
            np.testing.assert_array_equal(matrix[i], design.indices(i))
        self.assertLess(int(matrix.max()), design.seed_bits)

    def test_reference_scale_sampled(self):
        design = build_design(solve_params(1 << 15, 1 << 14))
        report = design.sample_overlaps(100_000, np.random.Generator(np.random.Philox(0)))
        self.assertEqual(report["violations"], 0)
        self.assertEqual(report["pairs"], 100_000)
        self.assertEqual(design.seed_bits, 458752)

    def test_insufficient_capacity(self):
        with self.assertRaises(ConstructionError):
            WeakDesign(m_e=2, m_d=2, n_f=16, blocks=1)

    def test_set_larger_than_field(self):
        with self.assertRaises(ConstructionError):
            WeakDesign(m_e=4, m_d=2, n_f=4, blocks=1)

    def test_out_of_range_index(self):
        with self.assertRaises(ContractError):
            WeakDesign(m_e=2, m_d=2, n_f=4, blocks=1).indices(4)


class TestSmallField(unittest.TestCase):
    def test_table_matches_field(self):
        spec = FieldSpec.standard(4)
        table = multiplication_table(4)
        for a, b in itertools.product(range(16), repeat=2):
            self.assertEqual(int(table[a, b]), spec.mul_reference(a, b))

    def test_tables_for_every_degree(self):
        rng = np.random.Generator(np.random.Philox(12))
        for m in range(1, 11):
            spec = FieldSpec.standard(m)
            table = multiplication_table(m)
            self.assertEqual(table.shape, (spec.order, spec.order))
            self.assertFalse(table.flags.writeable)
            pairs = rng.integers(0, spec.order, size=(300, 2))
            for a, b in pairs.tolist():
                self.assertEqual(int(table[a, b]), spec.mul_reference(a, b))
                self.assertEqual(int(table[a, b]), int(table[b, a]))

    def test_table_degree_range(self):
        with self.assertRaises(ContractError):
            multiplication_table(11)

    def test_evaluate_polynomials(self):
        # 1 + x over GF(4) at x = 0..3
        values = evaluate_polynomials(np.array([[1, 1]]), np.arange(4), 2)
        np.testing.assert_array_equal(values[0], [1, 0, 3, 2])


class TestCode(unittest.TestCase):
    def setUp(self):
        self.gf4 = FieldSpec.standard(2)

    def test_chunks(self):
        self.assertEqual(message_chunks(BitVector.from_string("0110"), 2), [1, 2])
        self.assertEqual(message_chunks(BitVector.from_string("011"), 2), [1, 2])

    def test_rs_symbol_examples(self):
        message = BitVector.from_string("0110")
        self.assertEqual(rs_symbol(message, self.gf4.element(0)).value, 1)
        # 1 + 2 * 3 = 1 + 1
        self.assertEqual(rs_symbol(message, self.gf4.element(3)).value, 0)
        single = BitVector.from_string("10")
        for alpha in range(4):
            self.assertEqual(rs_symbol(single, self.gf4.element(alpha)).value, 2)

    def test_rs_symbol_field_checks(self):
        with self.assertRaises(ContractError):
            rs_symbol(BitVector.zeros(4), self.gf4.element(1), field=FieldSpec.standard(4))
        with self.assertRaises(ContractError):
            rs_symbol(BitVector.zeros(9), self.gf4.element(1))

    def _table_codeword(self, message: int):
        """RS over GF(4) at every point, then Hadamard over every r."""
        c0, c1 = message >> 2, message & 3
        bits = []
        for alpha in range(4):
            symbol = c0 ^ gf_mul_reference(self.gf4.element(c1), self.gf4.element(alpha)).value
            for r in range(4):
                bits.append(bin(symbol & r).count("1") & 1)
        return bits

    def test_codeword_matches_table_encoder(self):
        for message in range(16):
            v = BitVector.from_int(message, 4)
            bits = [codeword_bit(v, BitVector.from_int(u, 4)) for u in range(16)]
            self.assertEqual(bits, self._table_codeword(message))

    def test_relative_distance(self):
        words = {
            m: [codeword_bit(BitVector.from_int(m, 4), BitVector.from_int(u, 4)) for u in range(16)]
            for m in range(16)
        }
        for a, b in itertools.combinations(range(16), 2):
            distance = sum(x != y for x, y in zip(words[a], words[b]))
            self.assertGreaterEqual(distance / 16, 3 / 8)

    def test_zero_hadamard_row(self):
        for message in range(16):
            for alpha in range(4):
                self.assertEqual(codeword_bit(BitVector.from_int(message, 4), BitVector.from_int(alpha << 2, 4)), 0)

    def test_linearity(self):
        rng = np.random.Generator(np.random.Philox(2))
        for _ in range(50):
            a = BitVector.random(64, rng)
            b = BitVector.random(64, rng)
            u = BitVector.random(32, rng)
            self.assertEqual(codeword_bit(a ^ b, u), codeword_bit(a, u) ^ codeword_bit(b, u))

    def test_odd_index_rejected(self):
        with self.assertRaises(ContractError):
            codeword_bit(BitVector.zeros(4), BitVector.zeros(3))

    def test_symbol_cache(self):
        message = BitVector.from_string("0110")
        cache = RSSymbolCache(message, self.gf4)
        self.assertEqual(cache.get(3), 0)
        self.assertEqual(cache.get(3), 0)
        self.assertEqual((cache.hits, cache.misses, len(cache)), (1, 1, 1))

    def test_symbol_cache_tallies_under_threads(self):
        message = BitVector.random(64, np.random.Generator(np.random.Philox(8)))
        spec = FieldSpec.standard(8)
        cache = RSSymbolCache(message, spec)
        alphas = [i % 16 for i in range(4000)]
        with ThreadPoolExecutor(max_workers=8) as pool:
            values = list(pool.map(cache.get, alphas))
        self.assertEqual(cache.hits + cache.misses, len(alphas))
        self.assertEqual(len(cache), 16)
        for alpha, value in zip(alphas, values):
            self.assertEqual(value, rs_symbol(message, spec.element(alpha)).value)


class TestBatchField(unittest.TestCase):
    def test_horner_matches_scalar(self):
        rng = np.random.Generator(np.random.Philox(4))
        for m in (8, 16, 32, 64, 128):
            spec = FieldSpec.standard(m)
            coeffs = [int.from_bytes(rng.bytes(16), "big") & spec.mask for _ in range(6)]
            alphas = [int.from_bytes(rng.bytes(16), "big") & spec.mask for _ in range(40)] + [0, 1]
            coeff_lo, coeff_hi = ints_to_words(coeffs)
            alpha_lo, alpha_hi = ints_to_words(alphas)
            lo, hi = BatchField(spec).horner(coeff_lo, coeff_hi, alpha_lo, alpha_hi)
            self.assertEqual(join_words(lo, hi), [poly_eval_int(coeffs, a, spec) for a in alphas])

    def test_bits_to_words_and_parity(self):
        rows = np.array([[1, 0, 1], [0, 0, 1]], dtype=np.uint8)
        lo, hi = bits_to_words(rows)
        self.assertEqual(lo.tolist(), [5, 1])
        self.assertEqual(hi.tolist(), [0, 0])
        self.assertEqual(parity(lo, hi).tolist(), [0, 1])


class TestExtraction(unittest.TestCase):
    """Test: every evaluation path gives the same bits."""

    def setUp(self):
        self.rng = np.random.Generator(np.random.Philox(8))

    def _instance(self, n_i, n_f, m_e):
        params = TrevisanParams.from_degrees(n_i, n_f, m_e=m_e)
        design = build_design(params)
        message = BitVector.random(n_i, self.rng)
        seed = BitVector.random(params.d, self.rng)
        return params, design, message, seed

    def test_paths_agree(self):
        for n_i, n_f, m_e in ((32, 4, 16), (256, 32, 32), (256, 32, 64), (1024, 64, 128)):
            params, design, message, seed = self._instance(n_i, n_f, m_e)
            expected = [codeword_bit(message, gather(seed, design.indices(i))) for i in range(n_f)]
            batch = extract(message, seed, params, design)
            scalar = extract(message, seed, params, design, batch=False)
            self.assertEqual(batch.to_numpy().tolist(), expected)
            self.assertEqual(scalar, batch)

    def test_threads_and_lanes_do_not_change_output(self):
        params, design, message, seed = self._instance(256, 32, 32)
        reference = extract(message, seed, params, design)
        for threads in (2, 3, 8):
            self.assertEqual(extract(message, seed, params, design, threads=threads, lanes=5), reference)
            self.assertEqual(extract(message, seed, params, design, threads=threads, batch=False), reference)

    def test_partial_batch(self):
        params, design, message, seed = self._instance(256, 32, 32)
        full = extract(message, seed, params, design).to_numpy()
        np.testing.assert_array_equal(extract_batch(message, seed, params, design, 7, 19), full[7:19])

    def test_zero_message(self):
        params, design, _, seed = self._instance(256, 32, 32)
        self.assertTrue(extract(BitVector.zeros(256), seed, params, design).is_zero())

    def test_counted_operations(self):
        params, design, message, seed = self._instance(256, 32, 32)
        counter = GFOpCounter()
        extract(message, seed, params, design, counter=counter)
        alphas = {gather(seed, design.indices(i)).to_int() >> params.m_e for i in range(params.n_f)}
        self.assertEqual(counter.multiplications, len(alphas) * (params.chunks - 1))
        self.assertLessEqual(counter.multiplications, theoretical_gf_ops(params))

    def test_length_checks(self):
        params, design, message, seed = self._instance(256, 32, 32)
        with self.assertRaises(ContractError):
            extract(BitVector.zeros(128), seed, params, design)
        with self.assertRaises(ContractError):
            extract(message, BitVector.zeros(10), params, design)

    def test_extractor_stream(self):
        params, _, _, seed = self._instance(256, 32, 32)
        data = BitVector.random(256 * 3, self.rng)
        extractor = TrevisanExtractor(params, seed, threads=2)
        result = extractor.extract_stream(data)
        self.assertEqual(result.blocks, 3)
        self.assertEqual(result.output.length_bits, 96)
        self.assertEqual(result.output.slice(32, 64), extract(data.slice(256, 512), seed, params, extractor.design))
        self.assertIn("design", extractor.describe())


if __name__ == "__main__":
    unittest.main()
