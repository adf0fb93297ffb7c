"""Tests for the command-line interface: exit codes, output files, manifests."""

import json
from fractions import Fraction

import pytest

from artifact import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def last_json(out: str) -> dict:
    lines = [ln for ln in out.strip().splitlines() if ln.startswith("{")]
    return json.loads(lines[-1])


class TestFormatJson:
    def test_deterministic_floats(self):
        assert cli.format_json({"v": 1 / 3}) == '{"v":0.3333333333}'
        assert cli.format_json({"v": 0.1}) == '{"v":0.1}'
        assert cli.format_json({"v": 1.0}) == '{"v":1}'

    def test_fractions_and_scalars(self):
        s = cli.format_json(
            {"f": Fraction(5, 12), "t": True, "n": None, "list": [1, 2]}
        )
        assert s == '{"f":"5/12","t":true,"n":null,"list":[1,2]}'

    def test_insertion_order_preserved(self):
        assert cli.format_json({"b": 1, "a": 2}) == '{"b":1,"a":2}'


class TestSieveCommand:
    def test_certified_case(self, capsys):
        code, out, _ = run(capsys, "sieve", "--case", "cm-ell", "--ell", "3")
        assert code == 0
        report = last_json(out)
        assert report["bound"] == 9
        assert report["value"] == pytest.approx(0.1341, abs=5e-4)

    def test_lowercase_omega_case(self, capsys):
        code, out, _ = run(capsys, "sieve", "--case", "noncm-omega", "--ell", "3")
        assert code == 0
        report = last_json(out)
        assert report["bound"] == 11
        assert report["value"] == pytest.approx(0.0818, abs=5e-3)

    def test_uncertified_pair_case(self, capsys):
        code, out, _ = run(capsys, "sieve", "--case", "CM-pair")
        assert code == 4
        report = last_json(out)
        assert report["certified"] is False
        assert report["bound"] is None
        assert report["value"] < 0

    def test_unknown_case(self, capsys):
        code, _, err = run(capsys, "sieve", "--case", "quadratic")
        assert code == 2
        assert "unknown case" in err


class TestOrdersCommand:
    def test_split_prime(self, capsys):
        code, out, _ = run(capsys, "orders", "--p", "13", "--check")
        assert code == 0
        report = last_json(out)
        assert report["a_p"] == 6
        assert report["order_n1"] == 8
        assert report["order_n2"] == 160
        assert report["structure_n1"] == [2, 4]
        assert report["structure_n2"] == [4, 40]
        assert report["A2_factors"] == {"5": 1}
        assert report["brute_force_match"] is True

    def test_inert_prime(self, capsys):
        code, out, _ = run(capsys, "orders", "--p", "7")
        assert code == 0
        report = last_json(out)
        assert report["a_p"] == 0
        assert report["order_n1"] == 8
        assert report["order_n2"] == 64
        assert report["structure_n2"] == [8, 8]

    def test_check_beyond_enumeration_bound(self, capsys):
        code, out, _ = run(capsys, "orders", "--p", "10007", "--check")
        assert code == 0
        report = last_json(out)
        assert report["brute_force_match"] is True
        assert "checked n=1 only" in report["brute_force_note"]
        assert report["structure_n2"] is None

    def test_rejects_non_prime(self, capsys):
        code, _, err = run(capsys, "orders", "--p", "9")
        assert code == 2
        assert "odd prime" in err


class TestGl2Command:
    def test_class_counts(self, capsys):
        code, out, _ = run(capsys, "gl2", "--ell", "3", "--q", "7")
        assert code == 0
        report = last_json(out)
        assert report["C_bruteforce"] == 602
        assert report["C_formula"] == 602
        assert report["group_order"] == 2016
        assert report["density"] == "602/2016"
        assert report["density_reduced"] == "43/144"

    def test_with_census(self, capsys):
        code, out, _ = run(capsys, "gl2", "--ell", "3", "--q", "7", "--x", "2000")
        assert code == 0
        census = last_json(out)["census"]
        assert census["equivalence_rate"] == 1
        assert census["empirical"] == pytest.approx(census["predicted"], abs=0.05)


class TestConstantsCommand:
    def test_pair_constant(self, capsys):
        code, out, _ = run(capsys, "constants", "--which", "c-pair", "--cutoff", "1e4")
        assert code == 0
        report = last_json(out)
        assert report["value"] == pytest.approx(0.2584541132, abs=1e-9)
        assert report["factors"] == 1229

    def test_unknown_product(self, capsys):
        code, _, err = run(capsys, "constants", "--which", "zeta", "--cutoff", "100")
        assert code == 2


class TestCensusCommand:
    def test_small_run(self, capsys, tmp_path):
        out_csv = tmp_path / "rows.csv"
        summary = tmp_path / "summary.json"
        code, out, _ = run(
            capsys,
            "census",
            "--x",
            "30",
            "--cache",
            str(tmp_path / "orders.csv"),
            "--out-csv",
            str(out_csv),
            "--summary",
            str(summary),
        )
        assert code == 0
        assert "T1.2-omega: 4" in out
        assert "records: 4" in out
        lines = out_csv.read_text().strip().splitlines()
        assert lines[0].startswith("p,a_p,")
        assert len(lines) == 5
        assert lines[1].startswith("5,-2,")
        report = json.loads(summary.read_text())
        assert report["T1.2-omega"]["count"] == 4
        assert report["S-epsilon"]["count"] == 1
        assert report["index_distribution"] == {"2x4": 2, "2x20": 1, "4x8": 1}

    def test_scientific_notation_x(self, capsys, tmp_path):
        code, out, _ = run(
            capsys,
            "census",
            "--x",
            "1e2",
            "--cache",
            str(tmp_path / "orders.csv"),
            "--out-csv",
            str(tmp_path / "rows.csv"),
            "--summary",
            str(tmp_path / "summary.json"),
        )
        assert code == 0
        assert "records: 11" in out

    def test_corrupt_cache(self, capsys, tmp_path):
        cache = tmp_path / "orders.csv"
        cache.write_text("p,a_p,bogus\n")
        code, _, err = run(
            capsys,
            "census",
            "--x",
            "30",
            "--cache",
            str(cache),
            "--out-csv",
            str(tmp_path / "rows.csv"),
            "--summary",
            str(tmp_path / "s.json"),
        )
        assert code == 3
        assert "cache corruption" in err

    def test_bad_arguments(self, capsys, tmp_path):
        code, _, err = run(
            capsys, "census", "--x", "30", "--ell", "2,4",
            "--cache", str(tmp_path / "orders.csv"),
        )
        assert code == 2


class TestManifest:
    def test_round_trip(self, capsys, tmp_path):
        out_csv = tmp_path / "rows.csv"
        summary = tmp_path / "summary.json"
        manifest = tmp_path / "manifest.json"
        args = [
            "census",
            "--x", "30",
            "--cache", str(tmp_path / "orders.csv"),
            "--out-csv", str(out_csv),
            "--summary", str(summary),
            "--manifest", str(manifest),
        ]
        assert cli.main(args) == 0
        capsys.readouterr()
        first_csv = out_csv.read_bytes()
        first_summary = summary.read_bytes()

        record = json.loads(manifest.read_text())
        assert record["subcommand"] == "census"
        assert record["parameters"]["x"] == "30"
        assert str(out_csv) in record["outputs"]
        assert "wall_time_s" in record

        assert cli.main(["--from-manifest", str(manifest)]) == 0
        capsys.readouterr()
        assert out_csv.read_bytes() == first_csv
        assert summary.read_bytes() == first_summary


class TestVerifyCommand:
    def test_quick_suite_passes(self, capsys):
        code, out, _ = run(capsys, "verify", "--quick")
        assert code == 0
        lines = [ln for ln in out.strip().splitlines() if ln]
        assert all(ln.startswith("ok ") for ln in lines[:-1])
        assert len([ln for ln in lines if ln.startswith("ok ")]) == 15


class TestArgumentErrors:
    def test_unknown_subcommand(self, capsys):
        assert cli.main(["bogus"]) == 2
        capsys.readouterr()

    def test_missing_required(self, capsys):
        assert cli.main(["orders"]) == 2
        capsys.readouterr()
