"""
Command-line front end: ideal export, verification suites, worst-term tables,
spin bases, golden-file diffs.

    lmverify verify --n 5 --kappa 1 --suite all --json out.json
    lmverify emit-ideal --n 6 --kappa 1 --which final
    lmverify worst-terms --n 5 --kappa 1 --out table.txt
    lmverify golden-diff table.txt tests/golden/worst_terms_5_1.txt

Exit codes: 0 all selected checks pass, 1 some check failed, 2 usage or
schema error, 3 no failure but a Gröbner budget was exhausted.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field
from pathlib import Path
from typing import Callable, Sequence

from . import exterior_wedge as ew
from . import geometry_verifier as gv
from . import model_ideals as mi
from .exterior_wedge import ChartSpec
from .groebner import Budget, Ideal, format_ideal
from .poly_core import GF, QQ
from .report import VerificationReport

SCHEMA_VERSION = 1
EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3
SUITES = ("basis", "simplify", "groebner", "components", "integral")
NEEDS_NON_SPECIAL = {"simplify", "groebner", "components", "integral"}
WHICH = ("full", "step1", "step2", "step3", "final", "I1", "I2", "I12", "integral",
         "integral_final", "naive")


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------- configuration

@dataclass
class RunConfig:
    n: int
    kappa: int
    field: str = "QQ"                 # "QQ" or a prime p != 2
    order: str = "grevlex"
    suites: tuple = SUITES
    budget: Budget = dc_field(default_factory=Budget.from_env)
    threads: int = 1
    timing: bool = True
    json_path: str | None = None
    figures: str | None = None

    def __post_init__(self):
        try:
            self.chart = ChartSpec(self.n, self.kappa)
        except ValueError as e:
            raise ConfigError(str(e)) from None
        self.ring_field = parse_field(self.field)
        if self.order not in ("grevlex", "lex"):
            raise ConfigError(f"unknown order {self.order!r}")
        bad = [s for s in self.suites if s not in SUITES]
        if bad:
            raise ConfigError(f"unknown suite {bad[0]!r}")
        if self.threads < 1:
            raise ConfigError("--threads must be >= 1")

    def admissibility_warnings(self) -> list[str]:
        reason = self.chart.non_special_reason()
        if reason is None:
            return []
        hit = [s for s in self.suites if s in NEEDS_NON_SPECIAL]
        return [f"warning: {self.chart} is not strongly non-special ({reason}); "
                f"skipping suite {s}" for s in hit]

    def runnable_suites(self) -> list[str]:
        if self.chart.strongly_non_special:
            return list(self.suites)
        return [s for s in self.suites if s not in NEEDS_NON_SPECIAL]


def parse_field(spec: str):
    if spec in ("QQ", "Q", "rationals"):
        return QQ
    try:
        p = int(spec)
    except ValueError:
        raise ConfigError(f"field must be QQ or a prime, got {spec!r}") from None
    if p == 2:
        raise ConfigError("characteristic 2 is excluded (the equations divide by 2)")
    if p < 2 or any(p % d == 0 for d in range(2, int(p ** 0.5) + 1)):
        raise ConfigError(f"{p} is not prime")
    return GF(p)


# ---------------------------------------------------------------- suites

def suite_basis(cfg: RunConfig) -> VerificationReport:
    rep = gv.check_sign_oracle(max_n=6)
    rep.chart = str(cfg.chart)
    rep.extend(gv.check_spin_basis_membership(cfg.chart))
    return rep


def suite_simplify(cfg: RunConfig) -> VerificationReport:
    rep = mi.verify_simplification_chain(cfg.chart, cfg.budget)
    rep.extend(mi.verify_component_substitution(cfg.chart, cfg.budget))
    return rep


def suite_groebner(cfg: RunConfig) -> VerificationReport:
    rep = gv.check_groebner_claim(cfg.chart.s, cfg.chart.t, cfg.budget, cfg.ring_field)
    rep.chart = str(cfg.chart)
    return rep


def suite_components(cfg: RunConfig) -> VerificationReport:
    c = cfg.chart
    rep = gv.check_components(c, cfg.budget, field=cfg.ring_field)
    rep.extend(gv.check_jacobian(c, cfg.budget))
    for p in range(1, c.s + 1):
        for q in range(1, c.n + 1):
            rep.extend(gv.check_chart_presentations(c, p, q, budget=cfg.budget))
    return rep


def suite_integral(cfg: RunConfig) -> VerificationReport:
    return mi.verify_integral(cfg.chart, cfg.budget)


SUITE_FUNCS: dict[str, Callable[[RunConfig], VerificationReport]] = {
    "basis": suite_basis, "simplify": suite_simplify, "groebner": suite_groebner,
    "components": suite_components, "integral": suite_integral}


def run(cfg: RunConfig) -> tuple[int, VerificationReport]:
    """Run the selected suites; reports are merged and sorted by check id."""
    suites = cfg.runnable_suites()
    merged = VerificationReport(str(cfg.chart))
    if cfg.threads > 1 and len(suites) > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            reports = list(pool.map(lambda s: SUITE_FUNCS[s](cfg), suites))
    else:
        reports = [SUITE_FUNCS[s](cfg) for s in suites]
    for r in reports:
        merged.extend(r)
    return exit_code(merged), merged.sorted()


def exit_code(rep: VerificationReport) -> int:
    if rep.failures():
        return EXIT_FAIL
    if rep.budget_exceeded:
        return EXIT_BUDGET
    return EXIT_OK


# ---------------------------------------------------------------- worst-term tables & golden files

def worst_terms_text(chart: ChartSpec) -> str:
    head = f"# lmverify worst-terms schema={SCHEMA_VERSION} n={chart.n} kappa={chart.kappa}"
    return "\n".join([head] + ew.worst_term_report(chart)) + "\n"


def spin_basis_text(chart: ChartSpec) -> str:
    lines = [f"# lmverify spin-basis schema={SCHEMA_VERSION} n={chart.n} kappa={chart.kappa}"]
    lines += [f"{e.case_id}; {e}" for e in ew.spin_basis(chart)]
    lines.append(f"# trace constraint on the (x)/(xi) span: {ew.trace_constraint(chart)}")
    return "\n".join(lines) + "\n"


@dataclass
class GoldenFile:
    path: Path
    text: str
    kind: str
    schema: int

    @property
    def sha256(self) -> str:
        return hashlib.sha256(self.text.encode()).hexdigest()

    @staticmethod
    def load(path) -> "GoldenFile":
        path = Path(path)
        text = path.read_text(encoding="utf-8")
        kind, schema = _sniff(text)
        return GoldenFile(path, text, kind, schema)


class SchemaMismatch(ValueError):
    pass


def _sniff(text: str) -> tuple[str, int]:
    s = text.lstrip()
    if s.startswith("["):
        return "report", SCHEMA_VERSION
    first = s.splitlines()[0] if s else ""
    if first.startswith("# lmverify "):
        parts = first.split()
        meta = dict(p.split("=", 1) for p in parts[3:] if "=" in p)
        return parts[2], int(meta.get("schema", 0))
    raise SchemaMismatch("unrecognized file: no lmverify header and not a JSON report")


def golden_diff(current: GoldenFile, golden: GoldenFile) -> list[str]:
    """Structural diff; the empty list means the files agree."""
    if (current.kind, current.schema) != (golden.kind, golden.schema):
        raise SchemaMismatch(f"{current.kind} v{current.schema} vs {golden.kind} v{golden.schema}")
    if current.kind == "report":
        return _diff_reports(json.loads(current.text), json.loads(golden.text))
    return _diff_tables(current.text, golden.text)


def _keyed_lines(text: str) -> tuple[str, dict]:
    lines = text.splitlines()
    out = {}
    for ln in lines[1:]:
        if not ln.strip() or ln.startswith("#"):
            continue
        key, _, rest = ln.partition(";")
        out.setdefault(key.strip(), []).append(rest.strip())
    return lines[0], out


def _diff_tables(cur: str, gold: str) -> list[str]:
    hc, c = _keyed_lines(cur)
    hg, g = _keyed_lines(gold)
    diffs = []
    if hc != hg:
        diffs.append(f"header: golden {hg!r} current {hc!r}")
    for key in sorted(set(c) | set(g), key=lambda k: (k not in g, k)):
        a, b = c.get(key), g.get(key)
        if a == b:
            continue
        if a is None or b is None:
            diffs.append(f"{key}: {'missing from current' if a is None else 'not in golden'}")
            continue
        for x, y in zip(a, b):
            if x != y:
                case = y.split(";")[0].strip()
                diffs.append(f"{key} [{case}]: golden {y!r} current {x!r}")
        if len(a) != len(b):
            diffs.append(f"{key}: {len(b)} golden lines vs {len(a)} current")
    return diffs


def _strip_timing(rows: list) -> dict:
    return {r["check_id"]: {k: v for k, v in r.items() if k != "timing_ms"} for r in rows}


def _diff_reports(cur: list, gold: list) -> list[str]:
    c, g = _strip_timing(cur), _strip_timing(gold)
    diffs = []
    for cid in sorted(set(c) | set(g)):
        if c.get(cid) != g.get(cid):
            if cid not in c:
                diffs.append(f"{cid}: missing from current")
            elif cid not in g:
                diffs.append(f"{cid}: not in golden")
            else:
                keys = sorted(k for k in set(c[cid]) | set(g[cid]) if c[cid].get(k) != g[cid].get(k))
                diffs.append(f"{cid}: differs in {', '.join(keys)}")
    return diffs


# ---------------------------------------------------------------- figures

def render_figures(chart: ChartSpec, outdir, report: VerificationReport | None = None) -> list[Path]:
    """Case grid of the balanced S (by (i, j)) coloured by worst-term valuation,
    plus a pass/fail strip for the report when one is given."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    n = chart.n
    grid = [[float("nan")] * n for _ in range(n)]
    labels = {}
    for S in ew.balanced_sets(n):
        i, j = ew.ij_of(S)
        w = ew.dual_element(chart, S)
        grid[i - 1][j - 1] = w.valuation()
        labels[(i - 1, j - 1)] = ew.dual_case(chart, S).case_id.replace("dual", "")
    fig, ax = plt.subplots(figsize=(1.0 + 0.7 * n, 0.8 + 0.7 * n))
    im = ax.imshow(grid, cmap="viridis", origin="upper")
    for (r, c), lab in sorted(labels.items()):
        ax.text(c, r, lab, ha="center", va="center", fontsize=7, color="white")
    ax.set_xticks(range(n), [str(j + 1) for j in range(n)])
    ax.set_yticks(range(n), [str(i + 1) for i in range(n)])
    ax.set_xlabel("j")
    ax.set_ylabel("i")
    ax.set_title(f"worst-term valuation, n={n}, kappa={chart.kappa}", fontsize=9)
    vals = sorted({v for row in grid for v in row if v == v})
    fig.colorbar(im, ax=ax, shrink=0.8, label="valuation", ticks=vals)
    fig.tight_layout()
    paths = [outdir / f"case_grid_{n}_{chart.kappa}.png"]
    fig.savefig(paths[0], dpi=120, metadata={"Software": None})
    plt.close(fig)
    if report is not None and report.checks:
        colours = {"pass": "#4c9a2a", "fail": "#c0392b", "skipped-budget": "#e0a800"}
        checks = report.sorted().checks
        fig, ax = plt.subplots(figsize=(8, 0.25 * len(checks) + 0.8))
        ax.barh(range(len(checks)), [1] * len(checks),
                color=[colours.get(c.status, "grey") for c in checks])
        ax.set_yticks(range(len(checks)), [c.check_id for c in checks], fontsize=6)
        ax.invert_yaxis()
        ax.set_xticks([])
        ax.set_title(f"verification status {chart}", fontsize=9)
        fig.tight_layout()
        paths.append(outdir / f"checks_{n}_{chart.kappa}.png")
        fig.savefig(paths[1], dpi=100, metadata={"Software": None})
        plt.close(fig)
    return paths


# ---------------------------------------------------------------- argument parsing

def _chart_args(p: argparse.ArgumentParser):
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--kappa", type=int, required=True)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lmverify", description=__doc__.split("\n\n")[0].strip())
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("emit-ideal", help="print a chart ideal in the plain-text generator format")
    _chart_args(p)
    p.add_argument("--which", choices=WHICH, default="final")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--labels", action="store_true", help="append provenance comments")
    p.add_argument("--basis", action="store_true", help="emit the reduced Groebner basis instead")

    p = sub.add_parser("verify", help="run verification suites")
    _chart_args(p)
    p.add_argument("--suite", choices=SUITES + ("all",), action="append",
                   help="repeatable; default all")
    p.add_argument("--json", dest="json_path", metavar="OUT")
    p.add_argument("--budget-pairs", type=int)
    p.add_argument("--budget-degree", type=int)
    p.add_argument("--budget-terms", type=int)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--field", default="QQ", help="QQ (default) or an odd prime")
    p.add_argument("--no-timing", action="store_true", help="omit timing_ms from JSON")
    p.add_argument("--figures", metavar="DIR", help="render the case grid and status chart")
    p.add_argument("--quiet", action="store_true")

    for name, helptext in (("worst-terms", "worst-term table: S; case-id; valuation; leading terms"),
                           ("spin-basis", "special-fiber basis of the spin lattice")):
        p = sub.add_parser(name, help=helptext)
        _chart_args(p)
        p.add_argument("--out", metavar="FILE")
        if name == "worst-terms":
            p.add_argument("--figures", metavar="DIR")

    p = sub.add_parser("golden-diff", help="structural diff of a table or JSON report against a golden file")
    p.add_argument("current")
    p.add_argument("golden")
    return ap


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_emit(args) -> int:
    chart = ChartSpec(args.n, args.kappa)
    I = mi.build_named_ideal(chart, args.which)
    if args.basis:
        I = Ideal(I.basis(), I.ring, I.name + " (reduced basis)")
    if args.format == "json":
        doc = {"name": I.name, "order": I.ring.order.describe([v.name for v in I.ring.gens]),
               "generators": [str(g) for g in I.gens], "provenance": I.provenance}
        sys.stdout.write(json.dumps(doc, indent=2, ensure_ascii=False) + "\n")
    else:
        sys.stdout.write(format_ideal(I, labels=args.labels))
    return EXIT_OK


def cmd_verify(args) -> int:
    suites = SUITES if not args.suite or "all" in args.suite else tuple(dict.fromkeys(args.suite))
    overrides = {k: v for k, v in (("max_pairs", args.budget_pairs), ("max_degree", args.budget_degree),
                                   ("max_terms", args.budget_terms)) if v is not None}
    cfg = RunConfig(args.n, args.kappa, field=args.field, suites=suites,
                    budget=Budget.from_env(**overrides), threads=args.threads,
                    timing=not args.no_timing, json_path=args.json_path, figures=args.figures)
    if cfg.ring_field is not QQ:
        print(f"note: field {args.field} applies to the groebner and component-decomposition "
              "checks; the other suites compute over the rationals", file=sys.stderr)
    for w in cfg.admissibility_warnings():
        print(w, file=sys.stderr)
    code, rep = run(cfg)
    if cfg.json_path:
        Path(cfg.json_path).write_text(rep.dumps(timing=cfg.timing) + "\n", encoding="utf-8")
    if cfg.figures:
        for p in render_figures(cfg.chart, cfg.figures, rep):
            print(f"wrote {p}", file=sys.stderr)
    if not args.quiet:
        print(rep.summary())
        npass = sum(c.ok for c in rep.checks)
        print(f"{npass}/{len(rep.checks)} checks pass; exit {code}")
    return code


def cmd_table(args, text_fn) -> int:
    chart = ChartSpec(args.n, args.kappa)
    _emit(text_fn(chart), args.out)
    if getattr(args, "figures", None):
        for p in render_figures(chart, args.figures):
            print(f"wrote {p}", file=sys.stderr)
    return EXIT_OK


def cmd_golden_diff(args) -> int:
    try:
        diffs = golden_diff(GoldenFile.load(args.current), GoldenFile.load(args.golden))
    except SchemaMismatch as e:
        print(f"schema mismatch: {e}", file=sys.stderr)
        return EXIT_USAGE
    for d in diffs:
        print(d)
    return EXIT_FAIL if diffs else EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "emit-ideal":
            return cmd_emit(args)
        if args.command == "verify":
            return cmd_verify(args)
        if args.command == "worst-terms":
            return cmd_table(args, worst_terms_text)
        if args.command == "spin-basis":
            return cmd_table(args, spin_basis_text)
        return cmd_golden_diff(args)
    except (ConfigError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
