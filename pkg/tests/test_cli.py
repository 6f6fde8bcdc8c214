import json

import pytest

from qgalilei.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def test_classify_standard(capsys):
    code, rep = run(capsys, "classify", "--family", "Ia-standard", "--xi", "1", "--beta1", "1")
    assert code == 0
    assert rep["cocycle"] == "pass"
    assert rep["type"] == "quasi-triangular"
    assert rep["schema"] == "v1"


def test_classify_r_fails_mcybe(capsys):
    code, rep = run(capsys, "classify", "--r", "a3=1")
    assert code == 0  # a classification outcome, not a failed check
    assert rep["mcybe"] == "fail"


def test_classify_trivial(capsys):
    assert run(capsys, "classify", "--delta", "zero")[1]["family"] == "trivial"


def test_classify_cojacobi_violation(capsys):
    code, rep = run(capsys, "classify", "--alpha", "1", "--beta5", "1")
    assert rep["family"] is None
    assert code == 1


def test_verify_hopf_iib(capsys):
    code, rep = run(capsys, "verify-hopf", "--family", "IIb", "--order", "6")
    assert code == 0
    assert all(c["ok"] for c in rep["checks"].values())


def test_verify_hopf_iia_not_implemented(capsys):
    code, rep = run(capsys, "verify-hopf", "--family", "IIa")
    assert code == 3
    assert rep["status"] == "not-implemented"


def test_verify_rmatrix_qybe(capsys):
    code, rep = run(capsys, "verify-rmatrix", "--type", "nonstandard", "--order", "3", "--qybe")
    assert code == 0
    assert "lowest_nonzero_order" in rep["qybe"]


def test_simulate_standard(capsys, tmp_path):
    csv = tmp_path / "traj.csv"
    code, rep = run(capsys, "simulate", "--family", "standard", "--N", "3",
                    "--potential", "harmonic", "--t-end", "1", "--csv", str(csv))
    assert code == 0
    assert max(rep["conservation"]["relative_drift"].values()) < 1e-8
    assert csv.read_text().splitlines()[0] == "t,q1,q2,q3,p1,p2,p3,H,C2_2,C2_3"


def test_simulate_iib_energy_breakdown(capsys):
    code, rep = run(capsys, "simulate", "--family", "IIb", "--alpha", "0.1", "--t-end", "0.2")
    parts = rep["energy_breakdown"]
    assert code == 0
    assert parts["kinetic"] != parts["undeformed_kinetic"]


def test_simulate_blow_up(capsys):
    code, rep = run(capsys, "simulate", "--family", "none", "--N", "2", "--potential", "cubic",
                    "--masses", "1,1", "--x0", "1,1,0,0", "--t-end", "20", "--dt", "0.01")
    assert code == 1
    assert rep["status"] == "blow-up"


def test_pde_convergence_and_symmetry(capsys):
    code, rep = run(capsys, "pde", "--alpha", "0.05", "--refine", "3", "--check-symmetry")
    assert code == 0
    assert 1.8 <= rep["convergence"]["exponent"] <= 2.2
    assert rep["symmetry"]["ok"]


def test_pde_degenerate_alpha(capsys):
    code, rep = run(capsys, "pde", "--alpha", "1e-9")
    assert code == 0
    assert rep["continuum_max_error"] <= 1e-8


def test_pde_instability(capsys):
    code, rep = run(capsys, "pde", "--alpha", "0.1", "--scheme", "explicit", "--dt", "0.01")
    assert code == 1
    assert "cn" in rep["diagnostics"]


def test_reports_are_reproducible(tmp_path):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        assert main(["simulate", "--seed", "7", "--t-end", "0.1", "--out", str(p)]) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_config_file_and_override(capsys, tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"family": "Ib", "order": 2}))
    _, rep = run(capsys, "verify-hopf", "--config", str(cfg))
    assert rep["family"] == "Ib" and rep["order"] == 2
    _, rep = run(capsys, "verify-hopf", "--config", str(cfg), "--order", "3")
    assert rep["order"] == 3


@pytest.mark.parametrize("argv", [
    ["nope"],
    ["simulate", "--N", "x"],
    ["simulate", "--N", "1"],
    ["verify-hopf", "--family", "Zz"],
    ["classify", "--r", "a9=1"],
])
def test_usage_errors(argv, capsys):
    assert main(argv) == 2
