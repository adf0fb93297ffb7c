import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from artifact.factorint import is_prime
from artifact.gaussian import (
    GaussInt,
    SquareFreeIdeal,
    canonical_associate,
    classify_gauss_prime,
    enumerate_primary_primes,
    exact_div,
    gauss_divides,
    gauss_divmod,
    gauss_gcd,
    ideal_d,
    ideal_from_primes,
    ideal_mobius,
    ideal_phi,
    is_primary,
    primary_associate,
    split_prime,
)

UNITS = (GaussInt(1, 0), GaussInt(-1, 0), GaussInt(0, 1), GaussInt(0, -1))

nonzero = st.tuples(
    st.integers(-200, 200), st.integers(-200, 200)
).filter(lambda t: t != (0, 0)).map(lambda t: GaussInt(*t))


class TestArithmetic:
    def test_norm_multiplicative(self):
        a, b = GaussInt(3, 2), GaussInt(-5, 7)
        assert (a * b).norm() == a.norm() * b.norm()

    @given(nonzero, nonzero)
    def test_divmod_invariant(self, a, b):
        q, r = gauss_divmod(a, b)
        assert q * b + r == a
        assert r.norm() < b.norm()

    def test_exact_div(self):
        assert exact_div(GaussInt(5, 0), GaussInt(2, 1)) == GaussInt(2, -1)
        with pytest.raises(ValueError):
            exact_div(GaussInt(3, 0), GaussInt(2, 1))

    def test_pow(self):
        z = GaussInt(3, 2)
        assert z**3 == z * z * z
        assert z**0 == GaussInt(1, 0)


class TestAssociates:
    @given(nonzero)
    def test_canonical_is_associate_and_idempotent(self, z):
        c = canonical_associate(z)
        assert any(c == z * u for u in UNITS)
        assert canonical_associate(c) == c

    @given(nonzero.filter(lambda z: z.norm() % 2 == 1))
    def test_primary_unique_for_odd_norm(self, z):
        pz = primary_associate(z)
        assert is_primary(pz)
        assert sum(1 for u in UNITS if is_primary(z * u)) == 1


class TestSplitPrime:
    def test_frozen_generators(self):
        assert split_prime(5) == GaussInt(-1, 2)
        assert split_prime(13) == GaussInt(3, 2)
        assert split_prime(17) == GaussInt(1, -4)
        assert split_prime(29) == GaussInt(-5, -2)

    def test_norm_and_primarity(self):
        for p in range(5, 2000, 4):
            if not is_prime(p):
                continue
            pi = split_prime(p)
            assert pi.norm() == p
            assert is_primary(pi)

    def test_rejects_non_split(self):
        for p in (2, 3, 7, 11):
            with pytest.raises(ValueError):
                split_prime(p)

    def test_enumerate_primary_primes(self):
        pairs = list(enumerate_primary_primes(100))
        ps = [p for p, _ in pairs]
        assert ps == sorted(ps)
        assert ps == [p for p in range(5, 101, 4) if is_prime(p)]
        for p, pi in pairs:
            assert pi.norm() == p and is_primary(pi)


class TestGcd:
    @given(nonzero, nonzero)
    def test_gcd_divides_both(self, a, b):
        g = gauss_gcd(a, b)
        assert gauss_divides(g, a)
        assert gauss_divides(g, b)

    @given(nonzero, nonzero, nonzero)
    @settings(max_examples=50)
    def test_common_divisor_divides_gcd(self, c, x, y):
        g = gauss_gcd(c * x, c * y)
        assert gauss_divides(c, g)

    def test_coprime_unit(self):
        assert gauss_gcd(GaussInt(3, 2), GaussInt(3, -2)).is_unit()


class TestIdeals:
    def test_phi_mobius_d(self):
        two_ram = ideal_from_primes([GaussInt(1, 1)])
        assert two_ram.norm() == 2
        assert ideal_phi(two_ram) == 1
        assert ideal_mobius(two_ram) == -1

        pi = split_prime(5)
        one_prime = ideal_from_primes([pi])
        assert one_prime.norm() == 5
        assert ideal_phi(one_prime) == 4

        both = ideal_from_primes([pi, pi.conjugate()])
        assert both.norm() == 25
        assert ideal_phi(both) == 16
        assert ideal_mobius(both) == 1
        assert ideal_d(both) == 5

    def test_unit_ideal(self):
        u = SquareFreeIdeal.unit_ideal()
        assert u.norm() == 1
        assert ideal_phi(u) == 1
        assert ideal_mobius(u) == 1

    def test_classification(self):
        assert classify_gauss_prime(GaussInt(1, 1)) == "ramified"
        assert classify_gauss_prime(GaussInt(3, 0)) == "inert"
        tags = {
            classify_gauss_prime(split_prime(13)),
            classify_gauss_prime(split_prime(13).conjugate()),
        }
        assert tags == {"split", "split-conjugate"}
