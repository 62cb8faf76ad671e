"""End-to-end command tests, run in-process through main(argv)."""

import csv
import io
import json
import math
from fractions import Fraction

import pytest

from xxzgap.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err or out
    return json.loads(out)


class TestGap:
    def test_matches_dispersion_closed_form(self, capsys):
        record = run_json(
            capsys, "gap", "--two-j", "1", "--length", "10",
            "--delta", "2", "--two-m", "0",
        )
        expected = 1.0 - 0.5 * math.cos(math.pi / 10.0)
        assert record["payload"]["gap"] == pytest.approx(expected, abs=1e-10)
        assert record["payload"]["ground_energy"] == pytest.approx(0.0, abs=1e-11)
        assert record["command"] == "gap"
        assert record["wall_time"] is None

    def test_spin_flag_is_equivalent_to_two_j(self, capsys):
        a = run_json(capsys, "gap", "--two-j", "3", "--length", "4",
                     "--delta-inv", "0.5", "--two-m", "0")
        b = run_json(capsys, "gap", "--spin", "3/2", "--length", "4",
                     "--delta-inv", "0.5", "--two-m", "0")
        assert a["payload"] == b["payload"]

    def test_delta_and_delta_inv_are_interchangeable(self, capsys):
        a = run_json(capsys, "gap", "--two-j", "1", "--length", "6",
                     "--delta", "4", "--two-m", "0")
        b = run_json(capsys, "gap", "--two-j", "1", "--length", "6",
                     "--delta-inv", "0.25", "--two-m", "0")
        assert a["payload"]["gap"] == b["payload"]["gap"]

    def test_reruns_are_byte_identical(self, capsys):
        args = ("gap", "--two-j", "2", "--length", "5", "--delta", "3", "--two-m", "2")
        _, first, _ = run(capsys, *args)
        _, second, _ = run(capsys, *args)
        assert first == second

    def test_timing_flag_records_wall_time(self, capsys):
        record = run_json(capsys, "gap", "--two-j", "1", "--length", "4",
                          "--delta", "2", "--two-m", "0", "--timing")
        assert isinstance(record["wall_time"], float)


class TestUsageErrors:
    def test_conflicting_anisotropy_flags(self, capsys):
        code, out, err = run(capsys, "gap", "--two-j", "1", "--length", "4",
                             "--delta", "2", "--delta-inv", "0.5", "--two-m", "0")
        assert code == 2
        assert "exactly one of" in err
        assert out == ""

    def test_missing_spin_flags(self, capsys):
        code, _, err = run(capsys, "gap", "--length", "4", "--delta", "2",
                           "--two-m", "0")
        assert code == 2
        assert "exactly one of" in err

    def test_domain_violation_exits_two(self, capsys):
        code, _, err = run(capsys, "gap", "--two-j", "1", "--length", "4",
                           "--delta", "0.5", "--two-m", "0")
        assert code == 2
        assert "--delta must be > 1" in err

    def test_oversized_sector_is_refused_without_force(self, capsys):
        code, _, err = run(capsys, "spectrum", "--two-j", "6", "--length", "12",
                           "--delta", "2", "--two-m", "0")
        assert code == 2
        assert "--force" in err

    def test_bad_spin_string(self, capsys):
        code, _, err = run(capsys, "gap", "--spin", "2/3", "--length", "4",
                           "--delta", "2", "--two-m", "0")
        assert code == 2


class TestNumericalFailure:
    def test_unconverged_zero_mode_reports_diagnostic_record(self, capsys):
        code, out, err = run(capsys, "optimal-delta", "--truncation", "100")
        assert code == 1
        record = json.loads(out)
        assert record["error"]["type"] == "ConsistencyError"
        assert "zero mode" in record["error"]["message"]


class TestSpectrum:
    def test_full_spectrum_of_a_small_sector(self, capsys):
        record = run_json(capsys, "spectrum", "--two-j", "1", "--length", "4",
                          "--delta", "2", "--two-m", "0", "--full")
        sector = record["payload"]["sectors"][0]
        assert len(sector["eigenvalues"]) == 6  # C(4,2)
        assert sector["eigenvalues"] == sorted(sector["eigenvalues"])

    def test_all_sectors_csv_has_one_row_per_level(self, capsys):
        code, out, err = run(capsys, "spectrum", "--two-j", "1", "--length", "3",
                             "--delta", "2", "--all-sectors", "--k", "2",
                             "--format", "csv")
        assert code == 0
        rows = list(csv.DictReader(io.StringIO(out)))
        # interior sectors -1 and 1 (the edge sectors are one-dimensional)
        assert len(rows) == 4
        assert set(r["two_m"] for r in rows) == {"-1", "1"}


class TestCurvature:
    def test_table_as_csv_carries_exact_rationals(self, capsys):
        code, out, err = run(capsys, "curvature", "--table", "--format", "csv")
        assert code == 0
        rows = list(csv.DictReader(io.StringIO(out)))
        by_key = {(int(r["two_j"]), int(r["n"])): r for r in rows}
        assert by_key[(4, 2)]["curvature"] == "-46/5"
        assert by_key[(6, 2)]["curvature"] == "0"
        assert by_key[(1, 0)]["curvature"] == "-inf"
        assert Fraction(by_key[(5, 0)]["curvature"]) == Fraction(97, 24)

    def test_single_entry_with_numeric_check(self, capsys):
        record = run_json(capsys, "curvature", "--two-j", "2", "--n", "0",
                          "--numeric", "--length", "8", "--h", "0.02")
        payload = record["payload"]
        assert payload["curvature"] == "-1/3"
        assert payload["rel_error"] < 0.05


class TestSosBound:
    def test_n_down_and_two_m_agree(self, capsys):
        a = run_json(capsys, "sos-bound", "--two-j", "3", "--length", "4",
                     "--n-down", "5", "--delta-inv", "0.25")
        b = run_json(capsys, "sos-bound", "--two-j", "3", "--length", "4",
                     "--two-m", "2", "--delta-inv", "0.25")
        assert a["payload"] == b["payload"]


class TestOutputFile:
    def test_output_lands_in_the_file_not_stdout(self, capsys, tmp_path):
        target = tmp_path / "record.json"
        code, out, err = run(capsys, "gap", "--two-j", "1", "--length", "4",
                             "--delta", "2", "--two-m", "0",
                             "--output", str(target))
        assert code == 0
        assert out == ""
        record = json.loads(target.read_text())
        assert record["command"] == "gap"


class TestFigures:
    def test_boson_comparison_dataset(self, capsys, tmp_path):
        record = run_json(capsys, "figures", "--which", "3",
                          "--outdir", str(tmp_path))
        written = record["payload"]["written"]
        assert sorted(p.rsplit(".", 1)[1] for p in written) == ["csv", "json"]
        rows = list(csv.DictReader(open(written[0])))
        series = set(r["series"] for r in rows)
        assert series == {"exact", "boson"}
