"""Command-line experiment runner.

Every subcommand writes ``summary.json`` and ``trials.csv`` into ``--out`` and
exits 0 when all checks pass, 2 when a check fails and 1 on errors.
"""

import argparse
import csv
import dataclasses
import io
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .deflation import DeflationState, deflation_doubling_check, roots_to_json
from .eigen import eigenvalues
from .errors import ConfigError, EiglabError
from .jordan import JordanSpec, build_matrix, random_spec, suite_spec
from .krylov import DEFAULT_TOL, gmres, krylov_grade, theorem2_check
from .mmio import read_matrix
from .perturbation import MG_RTOL, run_trial, theorem1_bound, tightness_construction, trial_rng
from .suites import default_deflation_run
from .structure import DEFAULT_WEYR_RTOL, analyze, cluster_eigenvalues, structure_summary

log = logging.getLogger("eiglab")

MODES = ("analyze", "perturb", "krylov", "deflate", "tightness")


@dataclasses.dataclass
class ExperimentConfig:
    mode: str
    seed: int
    spec: str = None
    matrix: str = None
    rank: int = None
    trials: int = None
    cluster_tol: float = None
    rank_tol: float = None
    gmres_tol: float = DEFAULT_TOL
    out: str = "out"
    k: int = 5
    cond_cap: float = 100.0

    def validate(self):
        if self.mode not in MODES:
            raise ConfigError(f"mode: must be one of {', '.join(MODES)}, got {self.mode!r}")
        if self.seed is None:
            raise ConfigError("seed: a seed is mandatory (--seed or config file)")
        if not isinstance(self.seed, int) or isinstance(self.seed, bool):
            raise ConfigError(f"seed: must be an integer, got {self.seed!r}")
        for name in ("cluster_tol", "rank_tol", "gmres_tol"):
            value = getattr(self, name)
            if value is not None and not value > 0:
                raise ConfigError(f"{name}: tolerances must be positive, got {value!r}")
        if self.rank is not None and self.rank < 0:
            raise ConfigError(f"rank: must be >= 0, got {self.rank}")
        if self.trials is not None and self.trials < 1:
            raise ConfigError(f"trials: must be >= 1, got {self.trials}")
        if self.k < 1:
            raise ConfigError(f"k: must be >= 1, got {self.k}")
        if self.cond_cap < 1:
            raise ConfigError(f"cond_cap: must be >= 1, got {self.cond_cap}")
        if self.mode == "analyze" and not (self.spec or self.matrix):
            raise ConfigError("analyze: needs --matrix or --spec")
        return self


def load_spec(value):
    """A JordanSpec from inline JSON or from a path to a JSON file."""
    text = value if value.lstrip().startswith("{") else Path(value).read_text()
    try:
        return JordanSpec.from_json(text)
    except (ValueError, json.JSONDecodeError) as exc:
        raise ConfigError(f"spec: {exc}") from None


def _csv_text(rows):
    if not rows:
        return ""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: json.dumps(v) if isinstance(v, (dict, list)) else v for k, v in row.items()})
    return buf.getvalue()


def _jsonable(obj):
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj)}")


def _spec_row(spec):
    return {"distinctA": spec.distinct, "defectA": spec.defect, "n": spec.n, "mpdA": spec.mpd}


def run_analyze(cfg):
    if cfg.matrix:
        a = read_matrix(cfg.matrix)
        spec = None
    else:
        spec = load_spec(cfg.spec)
        a, _ = build_matrix(spec, cfg.cond_cap, seed=cfg.seed)
    defective = spec is not None and spec.defect > 0
    tol = None
    if cfg.cluster_tol is not None:
        tol = cfg.cluster_tol * max(1.0, float(np.linalg.norm(a)))
    structure = analyze(a, tol=tol, rank_rtol=cfg.rank_tol or DEFAULT_WEYR_RTOL, defective=defective)
    rows = [
        {"re": float(np.real(c.value)), "im": float(np.imag(c.value)), "m_a": c.algebraic,
         "m_g": c.geometric, "d": c.defect, "blockSizes": list(c.block_sizes)}
        for c in structure.clusters
    ]
    checks = {
        "algebraicSum": sum(c.algebraic for c in structure.clusters) == structure.dimension,
        "multiplicityOrder": all(c.algebraic >= c.geometric >= 1 for c in structure.clusters),
    }
    summary = {"structure": structure.to_dict()}
    if spec is not None:
        checks["matchesSpec"] = structure_summary(structure) == spec.summary()
        summary["boundInputs"] = _spec_row(spec)
    else:
        summary["boundInputs"] = {"distinctA": structure.distinct, "defectA": structure.total_defect}
    return summary, rows, checks


def run_perturb(cfg):
    trials = cfg.trials or 100
    fixed = load_spec(cfg.spec) if cfg.spec else None
    suite_rng = np.random.default_rng([cfg.seed, 2**31])
    reports = []
    for t in range(trials):
        spec = fixed if fixed is not None else suite_spec(suite_rng)
        r = cfg.rank if cfg.rank is not None else int(suite_rng.integers(0, 4))
        if r > spec.n:
            raise ConfigError(f"rank: {r} exceeds n = {spec.n}")
        reports.append(
            run_trial(spec, r, t, cfg.seed, cfg.cond_cap, mg_rtol=cfg.rank_tol or MG_RTOL,
                      cluster_rtol=cfg.cluster_tol)
        )
    rows = [rep.to_row() for rep in reports]
    checks = {
        "distinctBound": all(rep.bound_ok for rep in reports),
        "geometricDrop": all(rep.drop_ok for rep in reports),
        "noErrors": not any(rep.error for rep in reports),
    }
    summary = {
        "trials": trials,
        "boundViolations": sum(not rep.bound_ok for rep in reports),
        "dropViolations": sum(not rep.drop_ok for rep in reports),
        "errors": sum(bool(rep.error) for rep in reports),
        "boundFormula": "(r + 1) * distinctA + defectA",
    }
    if fixed is not None:
        r = reports[0].rank
        summary["boundInputs"] = {**_spec_row(fixed), "r": r, "bound": theorem1_bound(fixed.distinct, fixed.defect, r)}
    return summary, rows, checks


def run_krylov(cfg):
    tol = cfg.gmres_tol
    if cfg.matrix:
        a = read_matrix(cfg.matrix)
        n = a.shape[0]
        b = trial_rng(cfg.seed, 0).standard_normal(n)
        structure = analyze(a, rank_rtol=cfg.rank_tol or DEFAULT_WEYR_RTOL)
        try:
            _, trace = gmres(a, b, tol=tol)
            converged = trace.converged_at
        except EiglabError as exc:
            trace = exc.partial[1] if getattr(exc, "partial", None) else None
            converged = None
        rows = [{"iteration": i, "residual": r} for i, r in enumerate(trace.residual_norms)] if trace else []
        summary = {"convergedAt": converged, "grade": krylov_grade(a, b), "mpd": structure.mpd,
                   "boundInputs": {"distinctA": structure.distinct, "defectA": structure.total_defect}}
        checks = {"finiteTermination": converged is not None and converged <= structure.mpd}
        return summary, rows, checks

    trials = cfg.trials or 100
    fixed = load_spec(cfg.spec) if cfg.spec else None
    if fixed is not None and fixed.defect:
        raise ConfigError("spec: krylov mode needs a diagonalizable spec (defect 0)")
    rank = 1 if cfg.rank is None else cfg.rank
    suite_rng = np.random.default_rng([cfg.seed, 2**31])
    rows = []
    for t in range(trials):
        if fixed is not None:
            spec = fixed
        else:
            n = int(suite_rng.integers(4, 11))
            spec = random_spec(suite_rng, n, int(suite_rng.integers(1, 5)), 0, avoid_zero=True)
        rep = theorem2_check(spec, [cfg.seed, t, 1], [cfg.seed, t, 2], tol=tol, cond_cap=cfg.cond_cap,
                             rank=rank)
        rows.append({"trial": t, **_spec_row(spec), "r": rank, **rep.to_row()})
    checks = {
        "doubling": all(r["pass"] for r in rows),
        "jordanBlockBound": all(r["blockOk"] for r in rows),
        "finiteTermination": all(r["itersA"] is not None and r["itersA"] <= r["distinctA"] for r in rows),
    }
    summary = {
        "trials": trials,
        "countViolations": sum(r["failure"].startswith("count") for r in rows),
        "stagnations": sum(r["failure"].startswith("stagnation") for r in rows),
        "exactTermination": sum(r["itersA"] == r["distinctA"] for r in rows),
    }
    if fixed is not None:
        summary["boundInputs"] = {**_spec_row(fixed), "r": rank}
    return summary, rows, checks


def run_deflate(cfg):
    # The toy problem is fixed; the seed only drives the evaluation points.
    problem, u0, found = default_deflation_run()
    roots = [r.root for r in found]
    points = cfg.trials or 50
    rng = trial_rng(cfg.seed, 3)
    rows = []
    if roots:
        state = DeflationState(roots[:1])
        for t in range(points):
            u = rng.standard_normal(problem.n)
            rhs = rng.standard_normal(problem.n)
            rows.append({"point": t, **deflation_doubling_check(problem, state, u, rhs, tol=cfg.gmres_tol).to_row()})
    distinct = all(
        np.linalg.norm(a - b) > 0.1 for i, a in enumerate(roots) for b in roots[i + 1:]
    )
    checks = {
        "multipleRoots": len(roots) >= 2,
        "rootResiduals": all(r.residual_norm <= 1e-10 for r in found),
        "rootsDistinct": distinct,
        "doubling": bool(rows) and all(r["pass"] for r in rows),
        "rankOne": bool(rows) and all(r["sigmaRatio"] < 1e-10 for r in rows),
    }
    summary = {
        "roots": json.loads(roots_to_json(problem, found))["roots"],
        "u0": u0.tolist(),
        "deflation": {"power": 2.0, "shifted": True, "damping": "backtracking halving on ||G||"},
        "boundInputs": {"distinctA": 3, "defectA": 0, "r": 1},
    }
    return summary, rows, checks


def run_tightness(cfg):
    seeds = cfg.trials or 100
    rows = []
    for k in range(1, cfg.k + 1):
        for s in range(seeds):
            a, b, expected = tightness_construction(k, [cfg.seed, k, s])
            c = a + b
            rtol = cfg.cluster_tol or 1e-6
            tol = rtol * max(1.0, float(np.linalg.norm(c)))
            measured = len(cluster_eigenvalues(eigenvalues(c), tol))
            rows.append({"k": k, "seed": s, "expected": expected, "measured": measured,
                         "exact": measured == expected, "withinBound": measured <= expected})
    checks = {"withinBound": all(r["withinBound"] for r in rows)}
    for k in range(1, cfg.k + 1):
        hits = sum(r["exact"] for r in rows if r["k"] == k)
        checks[f"exactRate_k{k}"] = hits >= 0.95 * seeds
    summary = {"seedsPerK": seeds, "boundInputs": {"defectA": 0, "r": 1, "distinctA": list(range(1, cfg.k + 1))}}
    return summary, rows, checks


RUNNERS = {
    "analyze": run_analyze,
    "perturb": run_perturb,
    "krylov": run_krylov,
    "deflate": run_deflate,
    "tightness": run_tightness,
}


def run(cfg):
    """Execute ``cfg``; returns the exit status (0 pass, 2 check failure, 1 error)."""
    out = Path(cfg.out)
    try:
        cfg.validate()
        summary, rows, checks = RUNNERS[cfg.mode](cfg)
    except (EiglabError, OSError, ValueError) as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        out.mkdir(parents=True, exist_ok=True)
        (out / "summary.json").write_text(json.dumps(
            {"config": dataclasses.asdict(cfg), "version": __version__,
             "error": f"{type(exc).__name__}: {exc}"}, indent=2, default=_jsonable))
        return 1
    passed = all(checks.values())
    report = {
        "config": dataclasses.asdict(cfg),
        "version": __version__,
        "checks": checks,
        "passed": passed,
        **summary,
    }
    out.mkdir(parents=True, exist_ok=True)
    (out / "summary.json").write_text(json.dumps(report, indent=2, default=_jsonable) + "\n")
    (out / "trials.csv").write_text(_csv_text(rows))
    for name, ok in checks.items():
        log.info("%-20s %s", name, "PASS" if ok else "FAIL")
    return 0 if passed else 2


def build_parser():
    parser = argparse.ArgumentParser(prog="eiglab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"eiglab {__version__}")
    sub = parser.add_subparsers(dest="mode", required=True)
    for mode in MODES:
        p = sub.add_parser(mode)
        p.add_argument("--config", help="JSON config file; flags override its fields")
        p.add_argument("--spec", help="JordanSpec as inline JSON or a path to a JSON file")
        p.add_argument("--matrix", help="Matrix Market file")
        p.add_argument("--rank", type=int)
        p.add_argument("--trials", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--cluster-tol", type=float, help="relative eigenvalue cluster gap")
        p.add_argument("--rank-tol", type=float, help="relative numerical rank cutoff")
        p.add_argument("--gmres-tol", type=float, help="relative GMRES residual tolerance")
        p.add_argument("--out", help="output directory")
        p.add_argument("--k", type=int, help="largest k for tightness")
        p.add_argument("--cond-cap", type=float, help="condition cap for similarity transforms")
    return parser


def config_from_args(args):
    fields = {f.name for f in dataclasses.fields(ExperimentConfig)}
    values = {}
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"config: {exc}") from None
        unknown = set(data) - fields
        if unknown:
            raise ConfigError(f"config: unknown fields {sorted(unknown)}")
        values.update(data)
    for name in fields - {"mode"}:
        flag = getattr(args, name, None)
        if flag is not None:
            values[name] = flag
    values["mode"] = args.mode
    values.setdefault("seed", None)
    return ExperimentConfig(**values)


def main(argv=None):
    logging.basicConfig(level=logging.INFO, format="%(message)s", stream=sys.stderr)
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
    except (ConfigError, TypeError) as exc:
        log.error("ConfigError: %s", exc)
        return 1
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
