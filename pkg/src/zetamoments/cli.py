"""Command-line entry point: ``zetamoments {zeros,extrema,moments,verify,fit}``.

Options may also come from a ``key = value`` file given with ``--config``
(keys are the long flag names with dashes or underscores); flags given on
the command line win.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import arithmetic as ar
from . import moments as mo
from .config import PrecisionConfig, ZetaMomentsError
from .zerofinder import build_cache, count_audit, extend_cache, load_cache, save_cache
from .verify import run_verify

MAX_T = 1.0e6


@dataclass
class RunConfig:
    command: str
    t_max: float = 1000.0
    k: list[int] = field(default_factory=lambda: [1])
    ell: list[int] = field(default_factory=lambda: [0])
    rel_tol: float = 1e-10
    abs_floor: float = 1e-11
    workers: int = 1
    cache: str | None = None
    format: str = "csv"
    seed: int = 0
    kind: str = "discrete"
    sigma: float = 0.5
    arith: bool = False
    xi_max: int = 1_000_000
    timings: bool = False

    def __post_init__(self):
        if not 0 < self.t_max <= MAX_T:
            raise ValueError(f"--t-max must lie in (0, {MAX_T:g}]")
        if self.workers < 1:
            raise ValueError("--workers must be >= 1")
        if self.format not in ("csv", "json"):
            raise ValueError("--format must be csv or json")
        if not self.k:
            raise ValueError("--k needs at least one value")

    @property
    def precision(self) -> PrecisionConfig:
        return PrecisionConfig(rel_tol=self.rel_tol, abs_floor=self.abs_floor)


def _int_list(text: str) -> list[int]:
    items = [x for x in str(text).replace(" ", "").split(",") if x]
    if not items:
        raise argparse.ArgumentTypeError("expected a comma-separated list of integers")
    try:
        return [int(x) for x in items]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _read_config_file(path: str) -> dict:
    out = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line or line.startswith("["):
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key = value")
        key, val = (x.strip() for x in line.split("=", 1))
        out[key.replace("-", "_")] = val.strip('"').strip("'")
    return out


_CONVERT = {
    "t_max": float, "rel_tol": float, "abs_floor": float, "sigma": float,
    "workers": int, "seed": int, "xi_max": lambda x: int(float(x)),
    "k": _int_list, "ell": _int_list,
    "arith": lambda x: str(x).lower() in ("1", "true", "yes"),
    "timings": lambda x: str(x).lower() in ("1", "true", "yes"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value file with defaults for these flags")
    common.add_argument("--t-max", type=float)
    common.add_argument("--k", type=_int_list, help="comma-separated moment orders")
    common.add_argument("--ell", type=_int_list, help="comma-separated derivative orders")
    common.add_argument("--rel-tol", type=float)
    common.add_argument("--abs-floor", type=float)
    common.add_argument("--workers", type=int)
    common.add_argument("--cache", help="zero cache file (read, extended and written back)")
    common.add_argument("--format", choices=["csv", "json"])
    common.add_argument("--seed", type=int)

    p = argparse.ArgumentParser(prog="zetamoments",
                                description="Moments of the Riemann zeta function on the critical line.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("zeros", parents=[common], help="scan zeros and write the cache")
    sub.add_parser("extrema", parents=[common], help="list gaps and their extrema")
    m = sub.add_parser("moments", parents=[common], help="discrete and continuous moments")
    m.add_argument("--kind", choices=["discrete", *mo.CONTINUOUS_KINDS, "windowed"])
    m.add_argument("--sigma", type=float)
    v = sub.add_parser("verify", parents=[common], help="run the verification suite")
    v.add_argument("--timings", action="store_true", default=None,
                   help="include runtimes (the report is then not byte-reproducible)")
    f = sub.add_parser("fit", parents=[common], help="trend fits and divisor-sum constants")
    f.add_argument("--kind", choices=["discrete", *mo.CONTINUOUS_KINDS])
    f.add_argument("--arith", action="store_true", default=None)
    f.add_argument("--xi-max", type=lambda x: int(float(x)))
    return p


def parse_config(argv=None) -> RunConfig:
    parser = build_parser()
    args = parser.parse_args(argv)
    values = {}
    if args.config:
        for key, val in _read_config_file(args.config).items():
            values[key] = _CONVERT.get(key, str)(val)
    for key, val in vars(args).items():
        if key in ("config", "command") or val is None:
            continue
        values[key] = val
    if args.command == "verify":
        values.setdefault("t_max", 500.0)
        values.setdefault("format", "json")
    known = RunConfig.__dataclass_fields__
    unknown = set(values) - set(known)
    if unknown:
        parser.error(f"unknown config keys: {', '.join(sorted(unknown))}")
    try:
        return RunConfig(command=args.command, **values)
    except ValueError as exc:
        parser.error(str(exc))


# ------------------------------------------------------------- helpers --

@contextmanager
def _pool(workers: int):
    if workers <= 1:
        yield None
        return
    with ProcessPoolExecutor(max_workers=workers) as ex:
        yield ex.map


def _num(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def _csv(header, rows) -> str:
    lines = [",".join(header)]
    lines += [",".join(v if isinstance(v, str) else _num(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def obtain_cache(rc: RunConfig, pmap=None, t_max: float | None = None):
    """Load the cache file if given, extend it to cover t_max, write it back."""
    T = rc.t_max if t_max is None else t_max
    cfg = rc.precision
    path = Path(rc.cache) if rc.cache else None
    if path is not None and path.exists():
        cache = load_cache(path, cfg)
        if not cache.covers(T):
            cache = extend_cache(cache, T, cfg, workers=rc.workers, pmap=pmap)
            save_cache(cache, path)
    else:
        cache = build_cache(T, cfg, workers=rc.workers, pmap=pmap)
        if path is not None:
            save_cache(cache, path)
    return cache


# ------------------------------------------------------------ commands --

def cmd_zeros(rc: RunConfig, out) -> int:
    with _pool(rc.workers) as pmap:
        cache = obtain_cache(rc, pmap)
    zeros = cache.zeros_up_to(rc.t_max)
    audit = count_audit(rc.t_max, len(zeros)) if rc.t_max >= 10 else None
    g = np.array([z.gamma for z in zeros])
    gaps = np.diff(cache.gammas[: len(zeros) + 1]) if zeros else np.empty(0)
    summary = {
        "t_max": rc.t_max,
        "count": len(zeros),
        "expected": audit.expected if audit else None,
        "drift": audit.drift if audit else None,
        "drift_bound": audit.bound if audit else None,
        "min_gap": float(gaps.min()) if gaps.size else None,
        "max_gap": float(gaps.max()) if gaps.size else None,
        "first": float(g[0]) if g.size else None,
        "last": float(g[-1]) if g.size else None,
    }
    if rc.format == "json":
        out.write(json.dumps(mo._jsonable(summary), indent=2, sort_keys=True) + "\n")
    else:
        keys = list(summary)
        out.write(_csv(keys, [["" if summary[k] is None else summary[k] for k in keys]]))
    return 0 if audit is None or audit.ok else 1


def cmd_extrema(rc: RunConfig, out) -> int:
    with _pool(rc.workers) as pmap:
        cache = obtain_cache(rc, pmap)
    gaps = cache.gaps_from_zeros_up_to(rc.t_max)
    rows = [[i + 1, g.gamma, g.gamma_plus, g.lambda_, g.z_lambda] for i, g in enumerate(gaps)]
    head = ["index", "gamma", "gamma_plus", "lambda", "Z_lambda"]
    if rc.format == "json":
        doc = {"gaps": [dict(zip(head, r)) for r in rows],
               "initial_extrema": [{"t": t, "z": z} for t, z in
                                   mo.initial_critical_points(cache.zeros[0].gamma)]}
        out.write(json.dumps(mo._jsonable(doc), indent=2, sort_keys=True) + "\n")
    else:
        out.write(_csv(head, rows))
    return 0


def cmd_moments(rc: RunConfig, out) -> int:
    cfg = rc.precision
    results = []
    identities = []
    if rc.kind == "windowed":
        for k in rc.k:
            results.append(mo.windowed_moment(k, rc.sigma, rc.t_max, cfg))
    else:
        with _pool(rc.workers) as pmap:
            cache = obtain_cache(rc, pmap)
        for k in rc.k:
            if rc.kind == "discrete":
                results.append(mo.discrete_moment(k, rc.t_max, cache))
                continue
            ells = rc.ell if rc.kind in ("continuous_Zderiv", "continuous_zeta_deriv") else [0]
            for ell in ells:
                spec = mo.MomentSpec(k, rc.kind, rc.t_max, ell=ell)
                res = mo.continuous_moment(spec, cfg, cache)
                if rc.kind == "mixed_abs":
                    gaps = cache.gaps_from_zeros_up_to(rc.t_max)
                    total = float(np.sum(np.array([g.z_lambda for g in gaps]) ** (2 * k)))
                    res.extra = {"extrema_sum": total, "k_value": k * res.value,
                                 "relative_discrepancy": abs(k * res.value - total) / total}
                    identities.append(dict(res.extra, k=k, T=rc.t_max))
                results.append(res)
    if rc.format == "json":
        out.write(mo.results_json(results, identities))
    else:
        out.write(mo.results_csv(results))
    return 0


def cmd_verify(rc: RunConfig, out) -> int:
    with _pool(rc.workers) as pmap:
        cache = obtain_cache(rc, pmap) if rc.cache else None
        report = run_verify(rc.t_max, rc.precision, rc.seed, cache, pmap, rc.workers)
    if rc.format == "json":
        out.write(report.to_json(rc.timings))
    else:
        out.write(report.to_csv())
    for c in report.checks:
        if c.failed:
            print(f"FAILED {c.name}: {_num(c.value)}", file=sys.stderr)
    return 0 if report.passed else 1


def cmd_fit(rc: RunConfig, out) -> int:
    rows = []
    if rc.arith:
        grid = np.unique(np.geomspace(10, rc.xi_max, 8).astype(np.int64))
        head = ["k", "xi_max", "C_k", "exponent", "target_exponent", "loglog_intercept"]
        for k in rc.k:
            fit = ar.fit_Ck(k, grid)
            rows.append([k, rc.xi_max, fit.C_k, fit.exponent, fit.target_exponent,
                         fit.loglog_intercept])
    else:
        T = np.geomspace(rc.t_max / 10, rc.t_max, 5)
        with _pool(rc.workers) as pmap:
            cache = obtain_cache(rc, pmap)
        head = ["kind", "k", "ell", "T", "value", "ratio", "p", "exponent", "slope_vs_logT",
                "spread", "bounded"]
        ells = rc.ell if rc.kind in ("continuous_Zderiv", "continuous_zeta_deriv") else [0]
        for k in rc.k:
            for ell in ells:
                fit = mo.trend_fit(rc.kind, k, T, cache, rc.precision, ell=ell)
                for t, v, r in zip(fit.T_grid, fit.values, fit.ratios):
                    rows.append([fit.kind, k, ell, t, v, r, fit.p, fit.exponent,
                                 fit.slope_vs_logT, fit.spread, str(fit.bounded).lower()])
    if rc.format == "json":
        out.write(json.dumps(mo._jsonable([dict(zip(head, r)) for r in rows]),
                             indent=2, sort_keys=True) + "\n")
    else:
        out.write(_csv(head, rows))
    return 0


COMMANDS = {"zeros": cmd_zeros, "extrema": cmd_extrema, "moments": cmd_moments,
            "verify": cmd_verify, "fit": cmd_fit}


def main(argv=None, out=None) -> int:
    rc = parse_config(argv)
    out = sys.stdout if out is None else out
    try:
        return COMMANDS[rc.command](rc, out)
    except ZetaMomentsError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
