"""
Tests for GF(2^m) arithmetic.
"""

import random
import unittest
from typing import Optional, get_type_hints

from src.common.errors import ContractError
from src.fields.gf2m import (
    STANDARD_POLYNOMIALS,
    FieldSpec,
    GFOpCounter,
    clmul,
    clmul_windowed,
    find_irreducible,
    gf_add,
    gf_mul,
    gf_mul_reference,
    gf_pow,
    is_irreducible,
    poly_eval,
    poly_eval_int,
    supported_degree_at_least,
)


class TestCarryLess(unittest.TestCase):
    def test_small_products(self):
        self.assertEqual(clmul(0b11, 0b11), 0b101)
        self.assertEqual(clmul(0b101, 0b110), 0b11110)
        self.assertEqual(clmul(0, 12345), 0)

    def test_windowed_matches_plain(self):
        rng = random.Random(7)
        for _ in range(50):
            a = rng.getrandbits(rng.randint(1, 700))
            b = rng.getrandbits(rng.randint(1, 700))
            self.assertEqual(clmul_windowed(a, b), clmul(a, b))
            self.assertEqual(clmul_windowed(a, b, window_bits=4), clmul(a, b))


class TestPolynomials(unittest.TestCase):
    def test_irreducibility(self):
        self.assertTrue(is_irreducible(8, 0x1B))
        self.assertTrue(is_irreducible(2, 0x3))
        # x^2 + 1 = (x + 1)^2
        self.assertFalse(is_irreducible(2, 0x1))
        # no constant term means x divides it
        self.assertFalse(is_irreducible(4, 0x2))

    def test_find_irreducible(self):
        self.assertEqual(find_irreducible(2), 0x3)
        self.assertEqual(find_irreducible(4), 0x3)
        for m in (3, 5, 7, 12):
            self.assertTrue(is_irreducible(m, find_irreducible(m)))

    def test_supported_degree(self):
        self.assertEqual(supported_degree_at_least(5), 5)
        self.assertEqual(supported_degree_at_least(17), 32)
        self.assertEqual(supported_degree_at_least(100), 128)
        with self.assertRaises(ContractError):
            supported_degree_at_least(129)


class TestFieldArithmetic(unittest.TestCase):
    """Test: field products, including the AES and GF(4) worked examples."""

    def test_aes_inverse_pair(self):
        spec = FieldSpec.standard(8)
        self.assertEqual(gf_mul(spec.element(0x53), spec.element(0xCA)).value, 0x01)

    def test_gf4(self):
        spec = FieldSpec.standard(2)
        self.assertEqual(gf_mul(spec.element(2), spec.element(3)).value, 1)
        self.assertEqual(gf_add(spec.element(2), spec.element(3)).value, 1)

    def test_fast_matches_reference(self):
        rng = random.Random(11)
        for m in sorted(STANDARD_POLYNOMIALS):
            spec = FieldSpec.standard(m)
            for _ in range(200):
                a = spec.element(rng.getrandbits(m))
                b = spec.element(rng.getrandbits(m))
                self.assertEqual(gf_mul(a, b), gf_mul_reference(a, b))

    def test_exhaustive_small_field(self):
        spec = FieldSpec.standard(4)
        for a in range(16):
            for b in range(16):
                self.assertEqual(spec.mul_fast(a, b), spec.mul_reference(a, b))

    def test_multiplicative_group_order(self):
        spec = FieldSpec.standard(8)
        for value in (1, 2, 0x53, 0xFF):
            self.assertEqual(gf_pow(spec.element(value), 255).value, 1)
        self.assertEqual(gf_pow(spec.element(7), 0).value, 1)

    def test_field_mismatch(self):
        with self.assertRaises(ContractError):
            gf_add(FieldSpec.standard(8).element(1), FieldSpec.standard(4).element(1))
        with self.assertRaises(ContractError):
            gf_mul(FieldSpec.standard(8).element(1), FieldSpec.standard(16).element(1))

    def test_element_range(self):
        with self.assertRaises(ContractError):
            FieldSpec.standard(4).element(16)

    def test_reducible_polynomial_rejected(self):
        with self.assertRaises(ContractError):
            FieldSpec(2, 0x1)

    def test_negative_power(self):
        with self.assertRaises(ContractError):
            gf_pow(FieldSpec.standard(8).element(3), -1)


class TestFieldProperties(unittest.TestCase):
    """Test: field axioms, fast/reference agreement and the multiplicative group order per standard field."""

    TRIPLES_PER_FIELD = 10_000
    PAIRS_PER_FIELD = 100_000

    def test_axioms(self):
        rng = random.Random(23)
        for m in sorted(STANDARD_POLYNOMIALS):
            spec = FieldSpec.standard(m)
            mul = spec.mul_fast
            for _ in range(self.TRIPLES_PER_FIELD):
                a, b, c = rng.getrandbits(m), rng.getrandbits(m), rng.getrandbits(m)
                self.assertEqual(mul(mul(a, b), c), mul(a, mul(b, c)), f"associativity in GF(2^{m})")
                self.assertEqual(mul(a, b), mul(b, a), f"commutativity in GF(2^{m})")
                self.assertEqual(mul(a, b ^ c), mul(a, b) ^ mul(a, c), f"distributivity in GF(2^{m})")

    def test_axioms_on_elements(self):
        rng = random.Random(29)
        for m in sorted(STANDARD_POLYNOMIALS):
            spec = FieldSpec.standard(m)
            for _ in range(50):
                a, b, c = (spec.element(rng.getrandbits(m)) for _ in range(3))
                self.assertEqual((a * b) * c, a * (b * c))
                self.assertEqual(a * (b + c), a * b + a * c)
                self.assertEqual((a + a).value, 0)
                self.assertEqual(a * spec.element(1), a)

    def test_fast_matches_reference(self):
        rng = random.Random(31)
        for m in sorted(STANDARD_POLYNOMIALS):
            spec = FieldSpec.standard(m)
            for _ in range(self.PAIRS_PER_FIELD):
                a, b = rng.getrandbits(m), rng.getrandbits(m)
                if spec.mul_fast(a, b) != spec.mul_reference(a, b):
                    self.fail(f"GF(2^{m}): fast and reference products differ for {a:#x} * {b:#x}")

    def test_group_order_exhaustive(self):
        for m in range(1, 9):
            spec = FieldSpec.standard(m)
            group_order = spec.order - 1
            for value in range(1, spec.order):
                self.assertEqual(gf_pow(spec.element(value), group_order).value, 1, f"{value:#x} in GF(2^{m})")

    def test_group_order_sampled(self):
        rng = random.Random(37)
        for m in (16, 32, 64, 128):
            spec = FieldSpec.standard(m)
            for _ in range(100):
                value = rng.getrandbits(m) or 1
                self.assertEqual(gf_pow(spec.element(value), spec.order - 1).value, 1, f"{value:#x} in GF(2^{m})")

    def test_gf4_poly_eval(self):
        e = FieldSpec.standard(2).element
        # 1 + 2 * 3 = 1 + 1
        self.assertEqual(poly_eval([e(1), e(2)], e(3)).value, 0)
        self.assertEqual(poly_eval([e(2)], e(3)).value, 2)
        self.assertEqual(poly_eval([e(0), e(1)], e(3)).value, 3)


class TestPolyEval(unittest.TestCase):
    def setUp(self):
        self.spec = FieldSpec.standard(8)

    def test_empty_is_zero(self):
        self.assertEqual(poly_eval([], self.spec.element(5)).value, 0)

    def test_constant_term_first(self):
        e = self.spec.element
        coeffs = [e(3), e(1)]  # 3 + x
        self.assertEqual(poly_eval(coeffs, e(0)).value, 3)
        self.assertEqual(poly_eval(coeffs, e(1)).value, 2)
        self.assertEqual(poly_eval(coeffs, e(2)).value, 1)

    def test_matches_naive_sum(self):
        rng = random.Random(5)
        e = self.spec.element
        coeffs = [e(rng.getrandbits(8)) for _ in range(9)]
        x = e(rng.getrandbits(8) | 1)
        expected = e(0)
        for i, c in enumerate(coeffs):
            expected = expected + c * (x**i)
        self.assertEqual(poly_eval(coeffs, x), expected)
        self.assertEqual(poly_eval_int([c.value for c in coeffs], x.value, self.spec), expected.value)

    def test_counter(self):
        counter = GFOpCounter()
        e = self.spec.element
        poly_eval([e(1), e(2), e(3)], e(4), counter)
        self.assertEqual(counter.as_dict(), {"additions": 2, "multiplications": 2, "total": 4})

    def test_counter_is_optional(self):
        self.assertEqual(get_type_hints(poly_eval)["counter"], Optional[GFOpCounter])
        e = self.spec.element
        self.assertEqual(poly_eval([e(1), e(2)], e(3), None), poly_eval([e(1), e(2)], e(3)))


if __name__ == "__main__":
    unittest.main()
