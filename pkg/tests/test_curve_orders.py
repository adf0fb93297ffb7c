import pytest

from artifact import curve_orders as co
from artifact.curve_orders import (
    brute_force_count,
    cyclotomic_factor,
    empirical_dE,
    frobenius,
    group_structure,
    order_pn,
)
from artifact.factorint import is_prime


def _split_primes(lo, hi):
    return [p for p in range(lo, hi, 4) if p % 4 == 1 and is_prime(p)]


class TestFrobenius:
    def test_examples(self):
        fd = frobenius(13)
        assert fd.a_p == 6
        assert fd.pi.norm() == 13

    def test_trace_parity(self):
        for p in _split_primes(5, 500):
            fd = frobenius(p)
            assert fd.a_p % 2 == 0
            assert fd.a_p**2 <= 4 * p


class TestOrders:
    def test_matches_bruteforce_small(self):
        for p in range(3, 500, 2):
            if not is_prime(p):
                continue
            for n in (1, 2):
                assert order_pn(p, n) == brute_force_count(p, n), (p, n)

    def test_inert_supersingular(self):
        for p in (3, 7, 11, 19, 23):
            assert order_pn(p, 1) == p + 1
            assert order_pn(p, 2) == (p + 1) ** 2

    def test_divisibility_tower(self):
        for p in _split_primes(5, 300):
            n1 = order_pn(p, 1)
            assert n1 % 8 == 0
            assert order_pn(p, 2) % (4 * n1) == 0

    def test_cyclotomic_identity(self):
        for p in _split_primes(5, 2000):
            for n in (1, 2, 3, 4, 5, 6, 12):
                prod = 1
                for d in (k for k in range(1, n + 1) if n % k == 0):
                    prod *= cyclotomic_factor(p, d)
                assert prod == order_pn(p, n), (p, n)

    def test_extension_ratio_near_p(self):
        for p in _split_primes(1000, 1200):
            for ell in (3, 5, 7):
                ratio = order_pn(p, ell) // order_pn(p, 1)
                assert order_pn(p, ell) % order_pn(p, 1) == 0
                assert abs(ratio - p ** (ell - 1)) < 2 * ell * p ** (ell - 0.5)


class TestGroupStructure:
    def test_frozen_values(self):
        assert group_structure(5, 1) == (2, 4)
        assert group_structure(5, 2) == (4, 8)
        assert group_structure(13, 1) == (2, 4)
        assert group_structure(13, 2) == (4, 40)
        assert group_structure(29, 1) == (2, 20)
        assert group_structure(29, 2) == (20, 40)
        assert group_structure(1009, 2) == (280, 3640)
        assert group_structure(2017, 2) == (8, 509000)

    def test_invariants(self):
        for p in _split_primes(5, 300):
            for n in (1, 2):
                d, e = group_structure(p, n)
                assert d * e == order_pn(p, n)
                assert e % d == 0
                assert (p**n - 1) % d == 0

    def test_bounds(self):
        with pytest.raises(ValueError):
            group_structure(5, 3)
        with pytest.raises(ValueError):
            group_structure(3301, 2)

    def test_x_only_chain_matches_jacobian(self):
        for p in (13, 29, 101):
            F, xs, ys = co._field_and_points(p, 2)
            singles = [co._batch_scalar_generic(F, xs, ys, 2**j) for j in (1, 2, 3)]
            assert co._x_only_double_chain_fp2(p, 3) == singles

    def test_x_only_ladder_matches_jacobian(self):
        for p in (13, 29, 101):
            F, xs, ys = co._field_and_points(p, 2)
            for m in (3, 5, 7, 9, 27):
                assert co._x_only_scalar_count_fp2(p, m) == \
                    co._batch_scalar_generic(F, xs, ys, m)


def test_empirical_dE():
    assert empirical_dE(1, 200) == 8
    assert empirical_dE(2, 200) == 32
