"""Batch command line: ranges, kernels, moments, blow-up series, Schur test, A_p scans, probe.

Each run emits one record (JSON) or one result table (CSV) on stdout.
Exit codes: 0 success, 2 invalid input, 3 divergent integral or a weight that
is not locally integrable (a record is still written).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from datetime import datetime, timezone
from typing import Any, Sequence

import numpy as np

from . import __version__
from .errors import AnalyticNonintegrable, BergmanLabError, DivergentIntegral
from .kernels import (
    NonVanishingHolomorphic,
    cayley,
    cayley_inverse,
    disk_kernel,
    g_weighted_kernel,
    hartogs_kernel_series,
    hartogs_kernel_transform,
    punctured_kernel,
)
from .muckenhoupt import (
    NONINTEGRABLE,
    DiskFamily,
    TilingSquare,
    ap_plus_scan,
    indicator,
    cayley_power_pair,
    sigma_weight,
    stderr_progress,
    two_weight_probe,
)
from .projection_lab import blowup_experiment, schur_box, schur_feasible, schur_numeric_check
from .quadrature import QuadratureSpec, weighted_moment, weighted_moment_quadrature
from .ranges import (
    GeneralizedHartogsSpec,
    alpha_example_range,
    range_disk_star,
    range_generalized,
    range_hartogs,
    range_two_weight,
)

EXIT_OK, EXIT_INVALID, EXIT_DIVERGENT = 0, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"cannot parse {text!r} as a complex number") from exc


def _int_range(text: str) -> list[int]:
    """``a:b`` inclusive, or a comma list."""
    if ":" in text:
        a, b = text.split(":")
        a, b = int(a), int(b)
        step = 1 if b >= a else -1
        return list(range(a, b + step, step))
    return _int_list(text)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--output", choices=("json", "csv"), default="json")
    common.add_argument("--rtol", type=float, default=None, help="relative tolerance (default: $BERGMAN_LAB_RTOL or 1e-10)")
    common.add_argument("--atol", type=float, default=None, help="absolute tolerance (default 1e-14)")
    common.add_argument("--max-depth", type=int, default=None, help="maximum bisection depth (default 40)")
    common.add_argument("--progress", action="store_true", help="stream progress lines to stderr")

    parser = _Parser(prog="bergman-lab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"bergman-lab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("ranges", parents=[common], help="sharp L^p ranges")
    p.add_argument("--domain", choices=("disk", "hartogs", "two-weight", "generalized", "alpha"), default="hartogs")
    p.add_argument("--s-prime", type=str, default=None)
    p.add_argument("--t", type=str, default=None, help="target exponent for --domain two-weight")
    p.add_argument("--alpha", type=str, default=None)
    p.add_argument("--dims", type=_int_list, default=None, help="ball dimensions n_1,...,n_l")
    p.add_argument("--exponents", type=str, default=None, help="weight exponents s_1,...,s_l (comma separated)")

    p = sub.add_parser("kernel", parents=[common], help="evaluate a Bergman kernel")
    p.add_argument("--kind", choices=("disk", "punctured", "g-weighted", "hartogs", "cayley", "cayley-inverse"), default="punctured")
    p.add_argument("--s-prime", type=str, default="0")
    p.add_argument("--z", type=_complex, default=None)
    p.add_argument("--zeta", type=_complex, default=None)
    p.add_argument("--z1", type=_complex, default=None)
    p.add_argument("--z2", type=_complex, default=None)
    p.add_argument("--zeta1", type=_complex, default=None)
    p.add_argument("--zeta2", type=_complex, default=None)
    p.add_argument("--method", choices=("closed", "homotopy", "transform", "series"), default=None)
    p.add_argument("--M", type=int, default=40)
    p.add_argument("--alpha", type=float, default=None, help="g(z) = (z-1)^alpha; omit for g = 1")

    p = sub.add_parser("moments", parents=[common], help="weighted moment of |z|^(2m)")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--s-prime", type=str, required=True)

    p = sub.add_parser("blowup", parents=[common], help="endpoint blow-up ratios")
    p.add_argument("--s-prime", type=str, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--n", type=_int_list, default=[10, 30, 100, 300])

    p = sub.add_parser("schur", parents=[common], help="Schur test feasibility")
    p.add_argument("--s-prime", type=str, required=True)
    p.add_argument("--p", type=str, required=True)
    p.add_argument("--check", type=_float_list, default=None, help="sample radii for the numerical check")

    p = sub.add_parser("apcheck", parents=[common], help="A_p / A_p^+ scan")
    p.add_argument("--weights", choices=("cayley-power", "sigma"), default="cayley-power")
    p.add_argument("--s", type=float, default=1.0)
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--mode", choices=("special", "general"), default="special")
    p.add_argument("--centers", type=_float_list, default=None)
    p.add_argument("--radius-exponents", type=_int_range, default=None, help="radii 2^m, e.g. --radius-exponents=-10:10")

    p = sub.add_parser("probe", parents=[common], help="two-weight probe for the absolute Bergman operator")
    p.add_argument("--weights", choices=("cayley-power", "sigma", "unit"), default="unit")
    p.add_argument("--s", type=float, default=1.0)
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--levels", type=_int_range, default=[1, 0, -1, -2, -3], help="levels k of test tiles S_{0,k}, e.g. --levels=1:-3")
    p.add_argument("--n-sub", type=int, default=4)
    p.add_argument("--min-level", type=int, default=-4)
    return parser


# ---------------------------------------------------------------------------
# serialization


def _num(x: Any) -> Any:
    if isinstance(x, (bool, str)) or x is None:
        return x
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(x, (complex, np.complexfloating)):
        return {"re": _num(x.real), "im": _num(x.imag)}
    if isinstance(x, dict):
        return {str(k): _num(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_num(v) for v in x]
    return str(x)


def _cx(z: complex) -> dict:
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def to_json(record: dict) -> str:
    # json uses repr for floats: the shortest string that round-trips (at most 17 digits)
    return json.dumps(_num(record), indent=2, allow_nan=False)


def _flatten(row: dict, prefix: str = "") -> dict:
    out = {}
    for k, v in row.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        else:
            out[key] = v
    return out


def _cell(v: Any) -> str:
    v = _num(v)
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return ""
    if isinstance(v, (dict, list)):
        return json.dumps(v)
    return str(v)


def result_rows(record: dict) -> list[dict]:
    res = record.get("results", {})
    if isinstance(res, dict) and "rows" in res:
        return res["rows"]
    if isinstance(res, list):
        return res
    return [res]


def to_csv(record: dict) -> str:
    rows = [_flatten(_num(r)) for r in result_rows(record)]
    cols: list[str] = []
    for r in rows:
        for c in r:
            if c not in cols:
                cols.append(c)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        w.writerow([_cell(r.get(c)) for c in cols])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# handlers


def _range_result(r) -> dict:
    d = r.to_dict()
    return {"lo": d["lo"], "hi": d["hi"], "open": d["open"], "empty": d.get("empty", False)}


def _req(value, name):
    if value is None:
        raise UsageError(f"--{name} is required here")
    return value


def cmd_ranges(a, spec):
    if a.domain == "disk":
        return _range_result(range_disk_star(_req(a.s_prime, "s-prime"))), {}
    if a.domain == "hartogs":
        return _range_result(range_hartogs(_req(a.s_prime, "s-prime"))), {}
    if a.domain == "two-weight":
        v = range_two_weight(_req(a.s_prime, "s-prime"), _req(a.t, "t"))
        return _range_result(v.range), {"notes": v.notes}
    if a.domain == "alpha":
        return _range_result(alpha_example_range(_req(a.alpha, "alpha"))), {}
    dims = _req(a.dims, "dims")
    exps = [x.strip() for x in _req(a.exponents, "exponents").split(",")]
    return _range_result(range_generalized(GeneralizedHartogsSpec(tuple(dims), tuple(exps)))), {}


def cmd_kernel(a, spec):
    kind = a.kind
    if kind in ("cayley", "cayley-inverse"):
        z = _req(a.z, "z")
        w = cayley(z) if kind == "cayley" else cayley_inverse(z)
        return {"value": _cx(w)}, {}
    if kind == "hartogs":
        z = (_req(a.z1, "z1"), _req(a.z2, "z2"))
        zeta = (_req(a.zeta1, "zeta1"), _req(a.zeta2, "zeta2"))
        if a.method == "series":
            r = hartogs_kernel_series(a.s_prime, z, zeta, a.M)
            return {"value": _cx(r.value), "tail_bound": r.tail_bound, "n_terms": r.n_terms}, {}
        return {"value": _cx(hartogs_kernel_transform(a.s_prime, z, zeta))}, {}
    z, zeta = _req(a.z, "z"), _req(a.zeta, "zeta")
    if kind == "disk":
        return {"value": _cx(disk_kernel(z, zeta))}, {}
    if kind == "g-weighted":
        g = NonVanishingHolomorphic.identity() if a.alpha is None else NonVanishingHolomorphic.power_of_z_minus_1(a.alpha)
        return {"value": _cx(g_weighted_kernel(g, z, zeta)), "g": g.tag}, {}
    method = a.method or "closed"
    if method not in ("closed", "homotopy"):
        raise UsageError("punctured kernel methods are closed or homotopy")
    return {"value": _cx(punctured_kernel(a.s_prime, z, zeta, method))}, {}


def cmd_moments(a, spec):
    from .ranges import as_exact

    sp = float(as_exact(a.s_prime))
    closed = weighted_moment(a.m, sp)
    value = weighted_moment_quadrature(a.m, sp, spec)
    return {"value": value, "closed_form": closed}, {}


def cmd_blowup(a, spec):
    series = blowup_experiment(a.s_prime, a.p, a.n, spec)
    rows = [
        {"n": n, "norm_f": f, "norm_Bf": b, "ratio": r}
        for n, f, b, r in zip(series.n_values, series.norms_f, series.norms_Bf, series.ratios)
    ]
    verdicts = {
        "image_in_Lp": series.image_in_Lp,
        "strictly_increasing": series.strictly_increasing(),
        "growth": series.growth(),
        "endpoint_p": series.endpoint_p,
        "log_ratios": series.log_ratios,
    }
    return {"rows": rows}, verdicts


def cmd_schur(a, spec):
    params = schur_feasible(a.s_prime, a.p)
    box = schur_box(a.s_prime, a.p)
    res: dict = {"feasible": params is not None}
    if params is not None:
        (d_lo, d_hi), (s_lo, s_hi) = box
        res.update(delta=params.delta, sigma=params.sigma,
                   delta_interval=[float(d_lo), float(d_hi)], sigma_interval=[float(s_lo), float(s_hi)])
        if a.check:
            res["sup_ratio"] = schur_numeric_check(a.s_prime, params, a.check, spec)
    return res, {}


def _weights(a):
    if a.weights == "sigma":
        w = sigma_weight(a.p)
        return w, w
    if a.weights == "unit":
        from .weights import HalfPlaneWeight

        w = HalfPlaneWeight.constant()
        return w, w
    return cayley_power_pair(a.s, a.k, a.p)


def cmd_apcheck(a, spec):
    mu1, mu2 = _weights(a)
    kw = {}
    if a.centers is not None:
        kw["centers"] = tuple(a.centers)
    if a.radius_exponents is not None:
        kw["radii"] = tuple(2.0**m for m in a.radius_exponents)
    family = DiskFamily(**kw)
    v = ap_plus_scan(mu1, mu2, a.p, family, a.mode, spec, progress=stderr_progress if a.progress else None)
    d = v.to_dict()
    verdict = d.pop("verdict")
    return d, {"verdict": verdict, "mu1": mu1.describe(), "mu2": mu2.describe()}


def cmd_probe(a, spec):
    mu1, mu2 = _weights(a)
    fam = [indicator(TilingSquare(0, k)) for k in a.levels]
    r = two_weight_probe(mu1, mu2, a.p, fam, min_level=a.min_level, n_sub=a.n_sub)
    skipped = {f["index"] for f in r.flagged}
    kept = [k for i, k in enumerate(a.levels) if i not in skipped]
    rows = [{"level": k, "ratio": q} for k, q in zip(kept, r.ratios)]
    return {"rows": rows}, {
        "max_ratio": r.max_ratio,
        "median_ratio": r.median_ratio,
        "e_domination_c": r.e_domination_c,
        "flagged": r.flagged,
        "n_points": r.n_points,
        "note": "exploratory numbers only",
    }


HANDLERS = {
    "ranges": cmd_ranges,
    "kernel": cmd_kernel,
    "moments": cmd_moments,
    "blowup": cmd_blowup,
    "schur": cmd_schur,
    "apcheck": cmd_apcheck,
    "probe": cmd_probe,
}


def _spec_from(a) -> QuadratureSpec:
    over = {}
    if a.rtol is not None:
        over["rel_tol"] = a.rtol
    if a.atol is not None:
        over["abs_tol"] = a.atol
    if a.max_depth is not None:
        over["max_subdivision_depth"] = a.max_depth
    return QuadratureSpec.from_env(**over)


def run(argv: Sequence[str]) -> tuple[dict | None, int, str]:
    """Parse and execute; returns ``(record, exit_code, error_message)``."""
    argv = list(argv)
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
        spec = _spec_from(a)
    except UsageError as exc:
        return None, EXIT_INVALID, str(exc)
    except BergmanLabError as exc:
        return None, EXIT_INVALID, f"invalid input: {exc}"
    params = {k: v for k, v in vars(a).items() if k not in ("command", "output", "rtol", "atol", "max_depth", "progress")}
    record = {
        "request": {"subcommand": a.command, "argv": argv, "parameters": params, "output": a.output},
        "version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "tolerances": spec.to_dict(),
        "results": {},
        "verdicts": {},
    }
    try:
        results, verdicts = HANDLERS[a.command](a, spec)
    except UsageError as exc:
        return None, EXIT_INVALID, str(exc)
    except AnalyticNonintegrable as exc:
        record["results"] = {"error": str(exc), "factor": exc.factor, "threshold": exc.threshold}
        record["verdicts"] = {"verdict": NONINTEGRABLE}
        return record, EXIT_DIVERGENT, ""
    except DivergentIntegral as exc:
        record["results"] = {"error": str(exc)}
        record["verdicts"] = {"verdict": "divergent-integral"}
        return record, EXIT_DIVERGENT, ""
    except BergmanLabError as exc:
        return None, EXIT_INVALID, f"invalid input: {exc}"
    record["results"] = results
    record["verdicts"] = verdicts
    code = EXIT_DIVERGENT if verdicts.get("verdict") == NONINTEGRABLE else EXIT_OK
    return record, code, ""


def replay(record: dict) -> tuple[dict | None, int, str]:
    """Re-run the request echoed in ``record`` with the tolerances it recorded."""
    tol = record["tolerances"]
    argv = list(record["request"]["argv"])
    argv += ["--rtol", repr(float(tol["rel_tol"])), "--atol", repr(float(tol["abs_tol"])),
             "--max-depth", str(int(tol["max_subdivision_depth"]))]
    return run(argv)


def main(argv: Sequence[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    record, code, err = run(argv)
    if err:
        print(err, file=sys.stderr)
    if record is not None:
        out = to_csv(record) if record["request"]["output"] == "csv" else to_json(record) + "\n"
        sys.stdout.write(out)
    return code


if __name__ == "__main__":
    sys.exit(main())
