"""Command-line front end, golden files, exit codes and figures."""

import json
from pathlib import Path

import pytest

from lmverify import cli_report as cli
from lmverify.exterior_wedge import ChartSpec

GOLDEN = Path(__file__).parent / "golden"


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_emit_final_ideal(capsys):
    code, out, _ = run(capsys, "emit-ideal", "--n", "6", "--kappa", "1", "--which", "final")
    lines = out.splitlines()
    assert code == 0
    assert lines[0].startswith("order: grevlex a_1_1 > a_1_2")
    assert "a_1_4 + a_2_3 + a_3_2 + a_4_1" in out          # tr(𝐀H)
    assert "a_1_2 - a_2_1" in out or "-a_1_2 + a_2_1" in out


def test_emit_json_has_provenance(capsys):
    code, out, _ = run(capsys, "emit-ideal", "--n", "5", "--kappa", "1", "--which", "full",
                       "--format", "json")
    doc = json.loads(out)
    assert code == 0 and len(doc["generators"]) == len(doc["provenance"])


@pytest.mark.parametrize("nk", [(5, 1), (7, 2)])
def test_worst_terms_regenerate_golden(tmp_path, capsys, nk):
    out = tmp_path / "w.txt"
    run(capsys, "worst-terms", "--n", str(nk[0]), "--kappa", str(nk[1]), "--out", str(out))
    golden = GOLDEN / f"worst_terms_{nk[0]}_{nk[1]}.txt"
    assert out.read_bytes() == golden.read_bytes()
    code, diff, _ = run(capsys, "golden-diff", str(out), str(golden))
    assert code == 0 and diff == ""


def test_spin_basis_golden(tmp_path, capsys):
    out = tmp_path / "s.txt"
    run(capsys, "spin-basis", "--n", "5", "--kappa", "1", "--out", str(out))
    assert out.read_text() == (GOLDEN / "spin_basis_5_1.txt").read_text()


def test_perturbed_sign_gives_single_line_diff(tmp_path, capsys):
    lines = (GOLDEN / "worst_terms_5_1.txt").read_text().splitlines()
    k = next(i for i, ln in enumerate(lines) if "dual(vi)" in ln)
    S, case, v, terms = lines[k].split("; ")
    lines[k] = "; ".join([S, case, v, terms[1:] if terms.startswith("-") else "-" + terms])
    bad = tmp_path / "bad.txt"
    bad.write_text("\n".join(lines) + "\n")
    code, diff, _ = run(capsys, "golden-diff", str(bad), str(GOLDEN / "worst_terms_5_1.txt"))
    assert code == 1
    (line,) = diff.splitlines()
    assert line.startswith(S) and "[dual(vi)]" in line


def test_schema_mismatch(tmp_path, capsys):
    other = tmp_path / "x.txt"
    other.write_text((GOLDEN / "worst_terms_5_1.txt").read_text().replace("schema=1", "schema=2"))
    code, _, err = run(capsys, "golden-diff", str(other), str(GOLDEN / "worst_terms_5_1.txt"))
    assert code == cli.EXIT_USAGE and "schema" in err
    junk = tmp_path / "junk.txt"
    junk.write_text("hello\n")
    assert run(capsys, "golden-diff", str(junk), str(junk))[0] == cli.EXIT_USAGE


def test_verify_all_matches_committed_report(tmp_path, capsys):
    out = tmp_path / "r.json"
    code, text, _ = run(capsys, "verify", "--n", "5", "--kappa", "1", "--suite", "all",
                        "--json", str(out), "--no-timing")
    assert code == 0 and "checks pass; exit 0" in text
    assert out.read_text() == (GOLDEN / "report_5_1.json").read_text()
    code, diff, _ = run(capsys, "golden-diff", str(out), str(GOLDEN / "report_5_1.json"))
    assert code == 0


def test_report_schema(tmp_path, capsys):
    out = tmp_path / "r.json"
    run(capsys, "verify", "--n", "5", "--kappa", "1", "--suite", "groebner", "--json", str(out))
    rows = json.loads(out.read_text())
    for r in rows:
        assert {"check_id", "claim_ref", "status", "timing_ms", "chart"} <= set(r)
        assert r["status"] in ("pass", "fail", "skipped-budget")
        assert "witness" in r or r["status"] == "pass"


def test_special_chart_warns_and_still_runs_basis(capsys):
    code, out, err = run(capsys, "verify", "--n", "5", "--kappa", "0", "--suite", "components",
                         "--suite", "basis")
    assert code == 0
    assert "not strongly non-special" in err and "components" in err
    assert "basis/spin-basis" in out and "components/" not in out


def test_budget_overrun_exit_code(capsys):
    code, _, _ = run(capsys, "verify", "--n", "5", "--kappa", "1", "--suite", "simplify",
                     "--budget-pairs", "5", "--quiet")
    assert code == cli.EXIT_BUDGET


def test_budget_env_override(monkeypatch, capsys):
    monkeypatch.setenv("LMVERIFY_BUDGET_PAIRS", "5")
    assert run(capsys, "verify", "--n", "5", "--kappa", "1", "--suite", "simplify", "--quiet")[0] == 3


@pytest.mark.parametrize("argv", [
    ["verify", "--n", "5", "--kappa", "3"],
    ["verify", "--n", "5", "--kappa", "1", "--field", "2"],
    ["verify", "--n", "5", "--kappa", "1", "--field", "15"],
    ["verify", "--n", "5", "--kappa", "1", "--threads", "0"],
])
def test_invalid_configs(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == cli.EXIT_USAGE and err.startswith("error:")


def test_failed_check_sets_exit_code(monkeypatch, capsys):
    from lmverify.report import CheckResult, VerificationReport

    def broken(cfg):
        return VerificationReport(str(cfg.chart), [CheckResult("x/broken", "demo", "fail", "w")])

    monkeypatch.setitem(cli.SUITE_FUNCS, "groebner", broken)
    assert run(capsys, "verify", "--n", "5", "--kappa", "1", "--suite", "groebner")[0] == 1


def test_thread_count_does_not_change_report():
    a = cli.run(cli.RunConfig(5, 1, suites=("basis", "groebner", "components"), threads=1))[1]
    b = cli.run(cli.RunConfig(5, 1, suites=("basis", "groebner", "components"), threads=3))[1]
    assert a.dumps(timing=False) == b.dumps(timing=False)


def test_figures(tmp_path, capsys):
    code, _, err = run(capsys, "worst-terms", "--n", "5", "--kappa", "1", "--out",
                       str(tmp_path / "w.txt"), "--figures", str(tmp_path / "figs"))
    assert code == 0
    png = tmp_path / "figs" / "case_grid_5_1.png"
    assert png.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
    rep = cli.run(cli.RunConfig(5, 1, suites=("groebner",)))[1]
    paths = cli.render_figures(ChartSpec(5, 1), tmp_path / "f2", rep)
    assert [p.name for p in paths] == ["case_grid_5_1.png", "checks_5_1.png"]


def test_module_entry_point():
    import subprocess
    import sys
    r = subprocess.run([sys.executable, "-m", "lmverify", "emit-ideal", "--n", "5", "--kappa", "1",
                        "--which", "I12"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.startswith("order:")
