"""Tests for the split-prime census: records, caching, predicates, counts."""

from fractions import Fraction
from pathlib import Path

import pytest

from artifact import census as cs
from artifact.factorint import sieve_primes
from artifact.gaussian import GaussInt


class TestConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            cs.CensusConfig(x=1)
        with pytest.raises(ValueError):
            cs.CensusConfig(x=100, ell_list=(2, 4))
        with pytest.raises(ValueError):
            cs.CensusConfig(x=100, z1_exp=Fraction(1, 31), z2_exp=Fraction(1, 30))
        with pytest.raises(ValueError):
            cs.CensusConfig(x=100, z1_exp=Fraction(1, 2))
        with pytest.raises(ValueError):
            cs.CensusConfig(x=100, threads=0)

    def test_defaults(self):
        cfg = cs.CensusConfig(x=100)
        assert cfg.ell_list == (2, 3)
        assert cfg.z1_exp == Fraction(1, 30)
        assert cfg.z2_exp == Fraction(1, 31)


class TestRecords:
    def test_first_records(self):
        rec = cs.compute_record(5)
        assert (rec.p, rec.a_p, rec.A1, rec.A2) == (5, -2, 1, 1)
        assert (rec.struct_d1, rec.struct_e1) == (2, 4)
        assert (rec.struct_d2, rec.struct_e2) == (4, 8)
        rec = cs.compute_record(13)
        assert (rec.p, rec.a_p, rec.A1, rec.A2) == (13, 6, 1, 5)
        assert (rec.struct_d2, rec.struct_e2) == (4, 40)
        rec = cs.compute_record(29)
        assert (rec.A1, rec.A2, rec.gcd_A1_A2) == (5, 5, 5)

    def test_structure_skipped_above_bound(self):
        rec = cs.compute_record(3001)
        assert not rec.structure_checked
        assert rec.struct_d1 is None
        below = cs.compute_record(2999) if False else cs.compute_record(2953)
        assert below.structure_checked

    def test_rejects_non_split(self):
        with pytest.raises(ValueError):
            cs.compute_record(7)
        with pytest.raises(ValueError):
            cs.compute_record(2)


class TestAlmostPrime:
    def test_truth_table(self):
        assert cs.is_almost_prime(1, 0, 1.5)  # empty product
        assert cs.is_almost_prime(5, 1, 1.5)
        assert not cs.is_almost_prime(25, 2, 1.5)  # not square-free
        assert cs.is_almost_prime(15, 2, 1.5)
        assert not cs.is_almost_prime(15, 1, 1.5)
        assert not cs.is_almost_prime(15, 2, 3.5)  # factor 3 <= z
        assert cs.is_almost_prime(35, 2, 3.5)


class TestCensusRun:
    def test_x30_frozen(self, tmp_path):
        cfg = cs.CensusConfig(x=30, cache_path=tmp_path / "orders.csv")
        table = cs.run_census(cfg)
        assert [r.p for r in table.records] == [5, 13, 17, 29]
        assert table.counters == {
            "T1.2-omega": 4,
            "T1.2-P5": 4,
            "T1.3-pair": 3,
            "T1.3-P10": 3,
            "T1.4-structure": 3,
            "T1.5-cyclic": 3,
            "S-epsilon": 1,
        }
        assert [r.p for r in table.witnesses["S-epsilon"]] == [5]
        assert table.index_distribution == {(2, 4): 2, (4, 8): 1, (2, 20): 1}
        table.check_invariants()

    def test_resume_monotone(self, tmp_path):
        cache = tmp_path / "orders.csv"
        t1 = cs.run_census(cs.CensusConfig(x=50, cache_path=cache))
        t2 = cs.run_census(cs.CensusConfig(x=200, cache_path=cache))
        for key, count in t1.counters.items():
            assert t2.counters[key] >= count
        assert len(t2.records) > len(t1.records)
        # Re-running at the same size must be byte-stable.
        before = cache.read_bytes()
        t3 = cs.run_census(cs.CensusConfig(x=200, cache_path=cache))
        assert cache.read_bytes() == before
        assert t3.counters == t2.counters

    def test_cache_roundtrip(self, tmp_path):
        cache = tmp_path / "orders.csv"
        table = cs.run_census(cs.CensusConfig(x=100, cache_path=cache))
        loaded = cs.load_cache(cache)
        assert list(loaded.values()) == table.records
        assert sorted(loaded) == [r.p for r in table.records]

    def test_threads_deterministic(self, tmp_path):
        t1 = cs.run_census(cs.CensusConfig(x=200, cache_path=tmp_path / "a.csv"))
        t2 = cs.run_census(
            cs.CensusConfig(x=200, cache_path=tmp_path / "b.csv", threads=2)
        )
        assert t1.counters == t2.counters
        assert t1.records == t2.records
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


class TestCacheCorruption:
    def _write(self, path: Path, lines):
        path.write_text("\n".join(lines) + "\n")

    def test_bad_header(self, tmp_path):
        cache = tmp_path / "orders.csv"
        self._write(cache, ["p,a_p,nonsense"])
        with pytest.raises(cs.CacheCorruptionError, match="line 1"):
            cs.load_cache(cache)

    def test_bad_field_count(self, tmp_path):
        cache = tmp_path / "orders.csv"
        self._write(cache, [cs.CSV_HEADER, "5,-2,-1,2,1"])
        with pytest.raises(cs.CacheCorruptionError, match="line 2"):
            cs.load_cache(cache)

    def test_bad_value(self, tmp_path):
        cache = tmp_path / "orders.csv"
        good = "5,-2,-1,2,1,1,0,0,0,0,1,2,4,4,8"
        bad = good.replace("-2", "xx")
        self._write(cache, [cs.CSV_HEADER, good, bad.replace("5,", "13,", 1)])
        with pytest.raises(cs.CacheCorruptionError, match="line 3"):
            cs.load_cache(cache)

    def test_half_structure_pair(self, tmp_path):
        cache = tmp_path / "orders.csv"
        row = "5,-2,-1,2,1,1,0,0,0,0,1,2,,,"  # d1 present but e1 missing
        self._write(cache, [cs.CSV_HEADER, row])
        with pytest.raises(cs.CacheCorruptionError):
            cs.load_cache(cache)

    def test_message_names_file(self, tmp_path):
        cache = tmp_path / "orders.csv"
        self._write(cache, ["garbage"])
        with pytest.raises(cs.CacheCorruptionError, match="orders.csv"):
            cs.load_cache(cache)


class TestPredicates:
    def test_s_epsilon_members(self):
        z1, z2 = Fraction(1, 30), Fraction(1, 31)
        for p in (5, 509, 653, 797, 941):
            assert cs.s_epsilon_member(p, z1, z2), p
        for p in (13, 17, 29, 37):
            assert not cs.s_epsilon_member(p, z1, z2), p

    def test_coprimality(self):
        for p in map(int, sieve_primes(2000)):
            if p % 4 == 1:
                assert cs.verify_coprimality(p)
        with pytest.raises(ValueError):
            cs.verify_coprimality(7)

    def test_common_factor_witness(self):
        assert cs.common_factor_witness(13) == []
        assert cs.common_factor_witness(29) == [5]
        for q in cs.common_factor_witness(29):
            assert q % 4 == 1


class TestGaussianIdealCounts:
    def test_phi_values(self):
        assert cs.gauss_phi(GaussInt(1, 1)) == 1
        assert cs.gauss_phi(GaussInt(2, 2)) == 4
        assert cs.gauss_phi(GaussInt(2, 1)) == 4
        assert cs.gauss_phi(GaussInt(5, 0)) == 16
        assert cs.gauss_phi(GaussInt(3, 0)) == 8
        assert cs.gauss_phi(GaussInt(7, 0)) == 48

    def test_phi_multiplicative(self):
        # (3) and (2+i) are coprime: phi(3*(2+i)) = phi(3) * phi(2+i).
        product = GaussInt(3, 0) * GaussInt(2, 1)
        assert cs.gauss_phi(product) == 8 * 4

    def test_prime_count_reference_values(self):
        assert cs.pi_prime_count(GaussInt(2, 2), GaussInt(1, 0), 1000) == 160
        assert cs.pi_prime_count(GaussInt(2, 2), GaussInt(1, 0), 4) == 0

    def test_prime_count_requires_invertible_class(self):
        with pytest.raises(ValueError):
            cs.pi_prime_count(GaussInt(2, 2), GaussInt(1, 1), 1000)

    def test_equidistribution_at_small_range(self):
        # All four invertible classes mod (2+2i) receive comparable counts.
        counts = [
            cs.pi_prime_count(GaussInt(2, 2), alpha, 3000)
            for alpha in (GaussInt(1, 0), GaussInt(3, 0), GaussInt(1, 2), GaussInt(3, 2))
        ]
        assert all(c > 0 for c in counts)
        assert max(counts) - min(counts) < 0.2 * max(counts)
        reference = cs.pi_prime_reference(GaussInt(2, 2), 3000)
        for c in counts:
            assert c == pytest.approx(reference, rel=0.15)

    def test_logarithmic_integral(self):
        assert cs.logarithmic_integral(1e6) == pytest.approx(
            78627.54915946216, rel=1e-12
        )
        assert cs.logarithmic_integral(10.0) == pytest.approx(
            6.1655995047872979, rel=1e-12
        )
        with pytest.raises(ValueError):
            cs.logarithmic_integral(2.0)
