import csv
import json

import pytest

from qfriction.cli import SCAN_COLUMNS, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def small_scan(*extra):
    return ["scan", "--set", "scan.points=4", "--set", "scan.z_min=\"5 lambda_tf\"",
            "--set", "scan.z_max=\"200 lambda_tf\"", *extra]


class TestScales:
    def test_fig1_parameters(self, capsys):
        code, out, _ = run(capsys, "scales")
        assert code == 0
        line = next(l for l in out.splitlines() if l.startswith("ell"))
        assert abs(float(line.split("=")[1].split()[0]) - 48.6) < 2  # about 50 nm

    def test_collisionless(self, capsys):
        code, out, _ = run(capsys, "scales", "--set", "metal.gamma_ev=0")
        assert code == 0 and "ell = inf" in out

    def test_malformed_ev(self, capsys):
        code, _, err = run(capsys, "scales", "--set", "metal.omega_p_ev=nine")
        assert code == 2 and "omega_p_ev" in err

    def test_unknown_field(self, capsys):
        code, _, err = run(capsys, "scales", "--set", "metal.colour=1")
        assert code == 2 and "metal.colour" in err

    def test_bad_json_file(self, capsys, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text('{"metal": {"omega_p_ev": 9,}}', encoding="utf-8")
        code, _, err = run(capsys, "scales", "--config", str(cfg))
        assert code == 2 and "line 1" in err


class TestScan:
    def test_columns_and_round_trip(self, capsys, tmp_path):
        path = tmp_path / "scan.csv"
        code, _, _ = run(capsys, *small_scan("--output", str(path)))
        assert code == 0
        text = path.read_text(encoding="utf-8")
        rows = list(csv.DictReader(text.splitlines()))
        assert list(rows[0]) == SCAN_COLUMNS and len(rows) == 4
        for row in rows:
            z = float(row["z_m"])
            assert format(z, ".17e") == row["z_m"]
            assert row["converged"] == "true"
        assert rows[0]["asymp_ratio_lte"] != ""

    def test_deterministic(self, capsys, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        run(capsys, *small_scan("--output", str(a)))
        run(capsys, *small_scan("--output", str(b), "--set", "scan.workers=2"))
        assert a.read_bytes() == b.read_bytes()

    def test_json_mirrors_csv(self, capsys):
        code, out, _ = run(capsys, *small_scan("--format", "json"))
        records = json.loads(out)
        assert code == 0 and len(records) == 4 and list(records[0]) == SCAN_COLUMNS

    def test_drude_plateau(self, capsys):
        code, out, _ = run(capsys, "scan", "--set", "scan.model=\"drude\"", "--set", "scan.points=12",
                           "--format", "json")
        assert code == 0
        for rec in json.loads(out):
            assert rec["ratio_total"] == pytest.approx(64 / 35, rel=1e-6)
            assert rec["asymp_ratio_lte"] is None

    def test_absolute_forces_need_atom(self, capsys):
        code, _, err = run(capsys, *small_scan("--set", "scan.normalize=false", "--set", "scan.v_x=10"))
        assert code == 2 and "atom" in err

    def test_absolute_forces(self, capsys):
        code, out, _ = run(capsys, *small_scan("--set", "scan.normalize=false", "--set", "scan.v_x=10",
                                               "--set", "scan.atom.alpha0_a3=47.3", "--set",
                                               "scan.atom.omega_a_ev=1.6", "--format", "json"))
        rec = json.loads(out)[0]
        assert code == 0 and rec["F_total"] < 0
        assert rec["ratio_total"] == pytest.approx(rec["F_total"] / rec["F_local_ref"], rel=1e-12)

    def test_intrinsic_leaves_j_empty(self, capsys):
        code, out, _ = run(capsys, *small_scan("--set", "scan.damping=\"intrinsic\"",
                                               "--set", "scan.gamma_int_ev=0.001"))
        rows = list(csv.DictReader(out.splitlines()))
        assert code == 0 and rows[0]["F_j"] == "" and rows[0]["asymp_ratio_j"] == ""

    def test_non_convergence_exit_code(self, capsys):
        code, out, _ = run(capsys, *small_scan("--set", "quadrature.max_subdivisions=1"))
        assert code == 3
        assert "false" in out

    def test_reversed_range(self, capsys):
        code, _, _ = run(capsys, "scan", "--set", "scan.z_min=1e-6", "--set", "scan.z_max=1e-7")
        assert code == 2


class TestProbes:
    def test_reflect(self, capsys):
        code, out, _ = run(capsys, "reflect", "--set", "probe.omega_ev=0.01", "--format", "json")
        rec = json.loads(out)[0]
        assert code == 0 and rec["r_im"] > 0

    def test_dn(self, capsys):
        code, out, _ = run(capsys, "dn")
        rows = list(csv.DictReader(out.splitlines()))
        assert code == 0 and all(float(rows[0][k]) > 0 for k in ("D0", "D1", "D2"))


@pytest.mark.slow
def test_validate_detects_loose_tolerance(capsys):
    code, out, _ = run(capsys, "validate", "--set", "quadrature.rel_tol=1e-2")
    assert code == 1
    assert "FAIL  tolerance honesty" in out
    assert "29/35" in out
