"""Two-weight A_p and A_p^+ quotients on the upper half plane, dyadic tiles and the averaging operator.

Scans report *evidence*: a supremum over infinitely many disks is estimated
from a finite dyadic family, and the verdict records how the running supremum
behaves as the family is refined.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np
from scipy.special import roots_legendre

from .errors import AnalyticNonintegrable, DomainError, InvalidArgument
from .quadrature import (
    ConvexRegion,
    GeneralDisk,
    QuadratureSpec,
    SpecialDisk,
    check_local_integrability,
    integrate_half_disk,
    integrate_region,
)
from .weights import DIST_TO_MINUS_I, HalfPlaneWeight

BOUNDED = "bounded-evidence"
DIVERGENT = "divergent"
NONINTEGRABLE = "analytic-nonintegrable"

# ---------------------------------------------------------------------------
# Weight families


def sigma_weight(p: float) -> HalfPlaneWeight:
    """``|1/(i+z)^2|^(2-p)``."""
    if not p > 1:
        raise InvalidArgument("p must exceed 1")
    return HalfPlaneWeight(((DIST_TO_MINUS_I, -2.0 * (2.0 - p)),))


def cayley_power_pair(s: float, k: int, p: float, *, with_sigma: bool = False) -> tuple[HalfPlaneWeight, HalfPlaneWeight]:
    """Powers of the Cayley modulus separating A_p^+ from A_p.

    ``mu1 = |phi|^(-(k+1)p + s + 2k)``, ``mu2 = |phi|^((1-s-k)p + s + 2k)`` with
    ``phi(z) = (i-z)/(i+z)``.  ``with_sigma`` multiplies both by ``4*sigma``.
    """
    if not (0 < s <= 2) or int(k) != k or not p > 1:
        raise InvalidArgument("need 0 < s <= 2, integer k, p > 1")
    e1 = -(k + 1) * p + s + 2 * k
    e2 = (1 - s - k) * p + s + 2 * k
    mu1 = HalfPlaneWeight.cayley_power(e1)
    mu2 = HalfPlaneWeight.cayley_power(e2)
    if with_sigma:
        sig = sigma_weight(p).scaled(4.0)
        mu1, mu2 = mu1 * sig, mu2 * sig
    return mu1, mu2


def cayley_power_condition(s: float, k: int, p: float) -> bool:
    """``s+2k+2 > (k+1)p`` and ``p(s+k+1) > s+2k+2``."""
    return s + 2 * k + 2 > (k + 1) * p and p * (s + k + 1) > s + 2 * k + 2


# ---------------------------------------------------------------------------
# A_p quotients


def dual_weight(mu2: HalfPlaneWeight, p: float) -> HalfPlaneWeight:
    """``mu2^(-p'/p) = mu2^(-1/(p-1))``."""
    return mu2.power(-1.0 / (p - 1.0))


def _area(disk) -> float:
    return disk.normalized_area()


def ap_quotient(mu1: HalfPlaneWeight, mu2: HalfPlaneWeight, p: float, disk, spec: QuadratureSpec | None = None) -> float:
    """``avg(mu1) * avg(mu2^(-p'/p))^(p/p')`` over ``disk`` cut to the upper half plane."""
    if not p > 1:
        raise InvalidArgument("p must exceed 1")
    region = disk.region()
    dual = dual_weight(mu2, p)
    check_local_integrability(mu1, region)
    try:
        check_local_integrability(dual, region)
    except AnalyticNonintegrable as exc:
        raise AnalyticNonintegrable(
            f"mu2^(-p'/p) = {dual.describe()} is not integrable at i (exponent must exceed -2)",
            factor=exc.factor,
            threshold=exc.threshold,
        ) from None
    area = _area(disk)
    a1 = integrate_half_disk(mu1, region, spec) / area
    a2 = integrate_half_disk(dual, region, spec) / area
    return a1 * a2 ** (p - 1.0)


@dataclass(frozen=True)
class DiskFamily:
    centers: tuple = (0.0, 1.0, -1.0, 4.0, -4.0, 16.0, -16.0)
    radii: tuple = tuple(2.0**m for m in range(-10, 11))

    def __post_init__(self):
        object.__setattr__(self, "centers", tuple(float(c) for c in self.centers))
        object.__setattr__(self, "radii", tuple(float(r) for r in self.radii))
        if not self.centers or not self.radii:
            raise InvalidArgument("disk family must be nonempty")
        if min(self.radii) <= 0:
            raise InvalidArgument("radii must be positive")

    def disks(self, mode: str) -> list:
        out = [SpecialDisk(c, R) for c in self.centers for R in self.radii]
        if mode == "general":
            out += [GeneralDisk(complex(c, 1.0), R) for c in self.centers for R in self.radii]
        elif mode != "special":
            raise InvalidArgument(f"mode must be 'special' or 'general', got {mode!r}")
        return out


@dataclass
class ApVerdict:
    sup_quotient: float
    witnesses: list
    verdict: str
    refinement_trace: list
    mode: str = "special"
    log_slope_at_i: float | None = None
    detail: str = ""

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "mode": self.mode,
            "sup_quotient": self.sup_quotient,
            "log_slope_at_i": self.log_slope_at_i,
            "detail": self.detail,
            "refinement_trace": [{"level": lv, "sup": s} for lv, s in self.refinement_trace],
            "witnesses": [{"disk": describe_disk(d), "quotient": q} for d, q in self.witnesses[:10]],
        }


def describe_disk(d) -> dict:
    if isinstance(d, SpecialDisk):
        return {"kind": "special", "center": [d.x0, 0.0], "R": d.R}
    if isinstance(d, GeneralDisk):
        return {"kind": "general", "center": [d.center.real, d.center.imag], "R": d.R}
    return {"kind": type(d).__name__}


def refinement_levels(radii: Sequence[float]) -> dict:
    """Level of each distinct radius: distance in dyadic steps from the middle of the family.

    Level 0 holds the median scale; each further level adds the next smaller
    and next larger radius, so refinement goes toward both tiny and huge disks.
    """
    logs = sorted({round(math.log2(r), 9) for r in radii})
    mid = (len(logs) - 1) / 2
    return {lr: int(math.ceil(abs(i - mid) - 1e-12)) for i, lr in enumerate(logs)}


def verdict_from_trace(trace: Sequence[tuple], factor: float = 4.0, span: int = 3) -> str:
    """Divergent when the running sup grew by more than ``factor`` over the last ``span`` levels."""
    if len(trace) <= span:
        return BOUNDED
    last, before = trace[-1][1], trace[-1 - span][1]
    return DIVERGENT if last > factor * before else BOUNDED


def _fit_slope(radii, values) -> float | None:
    if len(radii) < 2:
        return None
    x = np.log(np.asarray(radii))
    y = np.log(np.asarray(values))
    return float(np.polyfit(x, y, 1)[0])


def ap_plus_scan(
    mu1: HalfPlaneWeight,
    mu2: HalfPlaneWeight,
    p: float,
    family: DiskFamily | None = None,
    mode: str = "special",
    spec: QuadratureSpec | None = None,
    *,
    progress: Callable[[str], None] | None = None,
) -> ApVerdict:
    """Scan the A_p quotient over a dyadic disk family.

    ``mode="special"`` uses disks centered on the real axis; ``"general"`` adds
    disks centered at ``x0 + i`` (which for ``x0 = 0`` shrink onto ``i``).
    """
    family = family or DiskFamily()
    disks = family.disks(mode)
    levels = refinement_levels(family.radii)
    results = []
    for idx, d in enumerate(disks):
        try:
            q = ap_quotient(mu1, mu2, p, d, spec)
        except AnalyticNonintegrable as exc:
            return ApVerdict(
                math.inf, [(d, math.inf)], NONINTEGRABLE, [], mode, None,
                f"{exc} (factor {exc.factor}, threshold exponent > {exc.threshold:g})",
            )
        results.append((idx, d, q))
        if progress is not None:
            progress(f"disk {idx + 1}/{len(disks)} {describe_disk(d)} quotient={q:.6g}")
    by_level: dict[int, float] = {}
    for _, d, q in results:
        lv = levels[round(math.log2(d.R), 9)]
        by_level[lv] = max(by_level.get(lv, 0.0), q)
    trace, running = [], 0.0
    for lv in sorted(by_level):
        running = max(running, float(by_level[lv]))
        trace.append((lv, running))
    witnesses = [(d, q) for _, d, q in sorted(results, key=lambda t: (-t[2], t[0]))]
    at_i = [(d.R, q) for _, d, q in results if isinstance(d, GeneralDisk) and d.center == 1j]
    slope = _fit_slope([r for r, _ in at_i], [q for _, q in at_i]) if at_i else None
    return ApVerdict(
        sup_quotient=witnesses[0][1],
        witnesses=witnesses,
        verdict=verdict_from_trace(trace),
        refinement_trace=trace,
        mode=mode,
        log_slope_at_i=slope,
    )


# ---------------------------------------------------------------------------
# Dyadic tiling


@dataclass(frozen=True, order=True)
class TilingSquare:
    """``[j 2^k, (j+1) 2^k] x [2^k, 2^(k+1)]``."""

    j: int
    k: int

    @property
    def side(self) -> float:
        return math.ldexp(1.0, self.k)

    @property
    def bounds(self) -> tuple[float, float, float, float]:
        s = self.side
        return self.j * s, (self.j + 1) * s, s, 2 * s

    @property
    def area(self) -> float:
        """Normalized area ``side^2 / pi``."""
        return self.side**2 / math.pi

    @property
    def center(self) -> complex:
        x0, x1, y0, y1 = self.bounds
        return complex((x0 + x1) / 2, (y0 + y1) / 2)

    def contains(self, z: complex) -> bool:
        x0, x1, y0, y1 = self.bounds
        return x0 <= z.real <= x1 and y0 <= z.imag <= y1

    def region(self) -> ConvexRegion:
        return ConvexRegion.rectangle(*self.bounds)

    def subgrid(self, n: int) -> np.ndarray:
        """``n x n`` cell midpoints, rows indexed by y then columns by x."""
        x0, x1, y0, y1 = self.bounds
        t = (np.arange(n) + 0.5) / n
        xs = x0 + (x1 - x0) * t
        ys = y0 + (y1 - y0) * t
        return xs[None, :] + 1j * ys[:, None]


def tile_of(z) -> TilingSquare:
    """Tile containing ``z``; ``Im z = 2^k`` belongs to level ``k`` and ``Re z = j 2^k`` to column ``j``."""
    z = complex(getattr(z, "value", z))
    if not z.imag > 0 or not math.isfinite(z.imag) or not math.isfinite(z.real):
        raise DomainError("tile_of needs a finite point with Im z > 0")
    _, e = math.frexp(z.imag)
    k = e - 1
    j = math.floor(math.ldexp(z.real, -k))
    # subnormal real parts can round across a column edge when rescaled
    if math.ldexp(j, k) > z.real:
        j -= 1
    elif math.ldexp(j + 1, k) <= z.real:
        j += 1
    return TilingSquare(j, k)


def tiles_in_rectangle(x0: float, x1: float, y1: float, min_level: int) -> list[TilingSquare]:
    """All tiles inside ``[x0, x1] x [2^min_level, y1]``."""
    out = []
    top = tile_of(complex(0.0, y1)).k
    if math.ldexp(1.0, top) == y1:
        top -= 1
    for k in range(min_level, top + 1):
        s = math.ldexp(1.0, k)
        if 2 * s > y1:
            continue
        for j in range(math.ceil(x0 / s), math.floor(x1 / s)):
            out.append(TilingSquare(j, k))
    return out


# ---------------------------------------------------------------------------
# Step functions and the averaging operator


def _as_grid(v) -> np.ndarray:
    a = np.atleast_2d(np.asarray(v, dtype=float))
    n = a.shape[0]
    if a.shape != (n, n) or n & (n - 1):
        raise InvalidArgument("tile values must be square arrays with power-of-two side")
    if np.any(a < 0) or not np.all(np.isfinite(a)):
        raise InvalidArgument("step functions are finite and nonnegative")
    return a


def _refine(a: np.ndarray, n: int) -> np.ndarray:
    m = a.shape[0]
    return a if m == n else np.kron(a, np.ones((n // m, n // m)))


@dataclass(frozen=True)
class StepFunction:
    """Nonnegative function, piecewise constant on dyadic sub-squares of finitely many tiles.

    Each tile carries a ``2^d x 2^d`` array of values on its equal sub-squares
    (``d = 0`` is a constant on the tile).  Finer resolution than the tiling is
    what makes the averaging operator nontrivial on this class.
    """

    values: Mapping[TilingSquare, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "values", {t: _as_grid(v) for t, v in dict(self.values).items()})

    @classmethod
    def constant_on(cls, tiles: Mapping[TilingSquare, float]) -> "StepFunction":
        return cls({t: np.array([[float(v)]]) for t, v in tiles.items()})

    @property
    def support(self) -> list[TilingSquare]:
        return sorted(self.values)

    def _pair(self, other: "StepFunction"):
        for t in sorted(set(self.values) | set(other.values)):
            a = self.values.get(t)
            b = other.values.get(t)
            n = max(x.shape[0] for x in (a, b) if x is not None)
            a = np.zeros((n, n)) if a is None else _refine(a, n)
            b = np.zeros((n, n)) if b is None else _refine(b, n)
            yield t, a, b

    def __mul__(self, other: "StepFunction") -> "StepFunction":
        return StepFunction({t: a * b for t, a, b in self._pair(other)})

    def power(self, q: float) -> "StepFunction":
        return StepFunction({t: v**q for t, v in self.values.items()})

    def integral(self) -> float:
        """Normalized integral (finite sum over sub-squares)."""
        return math.fsum(t.area * float(np.mean(v)) for t, v in self.values.items())

    def inner(self, other: "StepFunction") -> float:
        return (self * other).integral()

    def __call__(self, z: complex) -> float:
        t = tile_of(z)
        v = self.values.get(t)
        if v is None:
            return 0.0
        n = v.shape[0]
        x0, x1, y0, y1 = t.bounds
        col = min(int((z.real - x0) / (x1 - x0) * n), n - 1)
        row = min(int((z.imag - y0) / (y1 - y0) * n), n - 1)
        return float(v[row, col])


def averaging_E(f, support: Iterable[TilingSquare] | None = None, spec: QuadratureSpec | None = None) -> StepFunction:
    """Tile-wise means of ``f``.

    Step functions are averaged exactly (mean of sub-square values).  A
    :class:`HalfPlaneWeight` is integrated over each tile in ``support`` with
    its singularity at ``i`` handled analytically; a vectorized callable must be
    smooth on the closed tiles.
    """
    if isinstance(f, StepFunction):
        tiles = f.support if support is None else list(support)
        return StepFunction.constant_on({t: float(np.mean(f.values[t])) if t in f.values else 0.0 for t in tiles})
    if support is None:
        raise InvalidArgument("averaging a function needs an explicit list of tiles")
    out = {}
    for t in support:
        if isinstance(f, HalfPlaneWeight):
            out[t] = tile_average(f, t, spec)
        else:
            out[t] = integrate_region(f, t.region(), spec) / t.area
    return StepFunction.constant_on(out)


_N_TILE = 12


@lru_cache(maxsize=1 << 16)
def tile_average(weight: HalfPlaneWeight, tile: TilingSquare, spec: QuadratureSpec | None = None) -> float:
    """Mean of ``weight`` over ``tile``; product Gauss rule away from ``i``, polar rule near it."""
    x0, x1, y0, y1 = tile.bounds
    gap = max(x0 - 0.0, 0.0 - x1, y0 - 1.0, 1.0 - y1, 0.0)
    if gap >= tile.side:
        x, w = roots_legendre(_N_TILE)
        xs = (x0 + x1) / 2 + (x1 - x0) / 2 * x
        ys = (y0 + y1) / 2 + (y1 - y0) / 2 * x
        vals = weight(xs[None, :] + 1j * ys[:, None])
        return float(w @ vals @ w) / 4.0
    return integrate_half_disk(weight, tile.region(), spec) / tile.area


@dataclass(frozen=True)
class EPropertyReport:
    a: bool
    b: bool
    c: bool
    a_gap: float
    b_gap: float
    c_gap: float

    def __iter__(self):
        return iter((self.a, self.b, self.c))


def check_E_properties(f: StepFunction, g: StepFunction, p: float, rtol: float = 1e-12) -> EPropertyReport:
    """Check three identities/inequalities of ``E`` by finite sums.

    (a) ``int E(f) g = int E(f) E(g)``;
    (b) ``int E(f)^p g <= int E(f^p) g``;
    (c) ``E(fg) <= E(f^p)^(1/p) E(g^p')^(1/p')`` on every tile.
    ``rtol`` absorbs accumulated rounding only.
    """
    if not p > 1:
        raise InvalidArgument("p must exceed 1")
    q = p / (p - 1)
    a_l, a_r, b_l, b_r = [], [], [], []
    c_gap = 0.0
    for t, fv, gv in f._pair(g):
        area = t.area
        ef, eg = fv.mean(), gv.mean()
        a_l.append(area * float(np.mean(ef * gv)))
        a_r.append(area * ef * eg)
        b_l.append(area * float(np.mean(ef**p * gv)))
        b_r.append(area * float(np.mean((fv**p).mean() * gv)))
        left = float(np.mean(fv * gv))
        right = float(np.mean(fv**p)) ** (1 / p) * float(np.mean(gv**q)) ** (1 / q)
        if right > 0:
            c_gap = max(c_gap, (left - right) / right)
        elif left > 0:
            c_gap = math.inf
    lhs_a, rhs_a = math.fsum(a_l), math.fsum(a_r)
    a_gap = abs(lhs_a - rhs_a) / max(abs(lhs_a), abs(rhs_a), 1e-300)
    lhs_b, rhs_b = math.fsum(b_l), math.fsum(b_r)
    b_gap = (lhs_b - rhs_b) / max(abs(rhs_b), 1e-300)
    return EPropertyReport(a_gap <= rtol, b_gap <= rtol, c_gap <= rtol, a_gap, b_gap, c_gap)


def random_step_function(rng: np.random.Generator, tiles: Sequence[TilingSquare], max_depth: int = 2, density: float = 0.7) -> StepFunction:
    out = {}
    for t in tiles:
        if rng.random() < density:
            d = int(rng.integers(0, max_depth + 1))
            n = 2**d
            v = rng.exponential(1.0, size=(n, n))
            v[rng.random((n, n)) < 0.2] = 0.0
            out[t] = v
    return StepFunction(out)


# ---------------------------------------------------------------------------
# Averaged pair over unions of tiles


def tiles_for_disk(disk, depth: int = 4) -> list[TilingSquare]:
    """Tiles whose centers lie in ``disk``, down to ``depth`` levels below its radius.

    Falls back to the tile holding the disk center when no tile center is inside.
    """
    c = disk.center if isinstance(disk, GeneralDisk) else complex(disk.x0, 0.0)
    R = disk.R
    kmax = tile_of(complex(0.0, max(c.imag + R, 1e-300))).k
    kmin = tile_of(complex(0.0, R)).k - depth
    out = []
    for k in range(kmin, kmax + 1):
        s = math.ldexp(1.0, k)
        if 1.5 * s > c.imag + R or 1.5 * s < c.imag - R:
            continue
        for j in range(math.floor((c.real - R) / s) - 1, math.ceil((c.real + R) / s) + 1):
            t = TilingSquare(j, k)
            if abs(t.center - c) < R:
                out.append(t)
    if not out:
        anchor = c if c.imag > 0 else complex(c.real, R / 2)
        out = [tile_of(anchor)]
    return out


def averaged_quotient(mu1: HalfPlaneWeight, mu2: HalfPlaneWeight, p: float, tiles: Sequence[TilingSquare], spec=None) -> float:
    """A_p quotient of the step pair ``(E mu1, E mu2)`` over the union of ``tiles``."""
    areas = np.array([t.area for t in tiles])
    e1 = np.array([tile_average(mu1, t, spec) for t in tiles])
    e2 = np.array([tile_average(mu2, t, spec) for t in tiles])
    tot = areas.sum()
    avg1 = math.fsum(areas * e1) / tot
    avg2 = math.fsum(areas * e2 ** (-1.0 / (p - 1.0))) / tot
    return avg1 * avg2 ** (p - 1.0)


def averaged_pair_scan(
    mu1: HalfPlaneWeight,
    mu2: HalfPlaneWeight,
    p: float,
    family: DiskFamily | None = None,
    spec: QuadratureSpec | None = None,
    depth: int = 4,
) -> ApVerdict:
    """General-disk scan of ``(E mu1, E mu2)`` with each disk replaced by a union of whole tiles."""
    family = family or DiskFamily(centers=(0.0, 1.0, -1.0, 4.0), radii=tuple(2.0**m for m in range(-4, 5)))
    disks = family.disks("general")
    levels = refinement_levels(family.radii)
    results = []
    for idx, d in enumerate(disks):
        q = averaged_quotient(mu1, mu2, p, tiles_for_disk(d, depth), spec)
        results.append((idx, d, float(q)))
    by_level: dict[int, float] = {}
    for _, d, q in results:
        lv = levels[round(math.log2(d.R), 9)]
        by_level[lv] = max(by_level.get(lv, 0.0), q)
    trace, running = [], 0.0
    for lv in sorted(by_level):
        running = max(running, float(by_level[lv]))
        trace.append((lv, running))
    witnesses = [(d, q) for _, d, q in sorted(results, key=lambda t: (-t[2], t[0]))]
    return ApVerdict(witnesses[0][1], witnesses, verdict_from_trace(trace), trace, "general-averaged")


# ---------------------------------------------------------------------------
# Two-weight probe for the absolute Bergman operator


@dataclass
class ProbeResult:
    ratios: list
    max_ratio: float
    median_ratio: float
    flagged: list
    e_domination_c: float
    n_points: int

    def to_dict(self) -> dict:
        return {
            "ratios": self.ratios,
            "max_ratio": self.max_ratio,
            "median_ratio": self.median_ratio,
            "flagged": self.flagged,
            "e_domination_c": self.e_domination_c,
            "n_points": self.n_points,
        }


class _Grid:
    def __init__(self, tiles: Sequence[TilingSquare], n: int):
        self.tiles = list(tiles)
        self.n = n
        pts = [t.subgrid(n).ravel() for t in self.tiles]
        self.z = np.concatenate(pts)
        self.cell = np.repeat([t.area / n**2 for t in self.tiles], n * n)
        self.tile_index = np.repeat(np.arange(len(self.tiles)), n * n)

    def tile_mean(self, v: np.ndarray) -> np.ndarray:
        sums = np.bincount(self.tile_index, weights=v * self.cell, minlength=len(self.tiles))
        areas = np.array([t.area for t in self.tiles])
        return (sums / areas)[self.tile_index]

    def B_abs(self, f: np.ndarray, chunk: int = 2048) -> np.ndarray:
        """``int f(w) / |z - conj(w)|^2 dA(w)`` at every grid point (normalized measure)."""
        src = np.nonzero(f)[0]
        w = np.conj(self.z[src])
        mass = f[src] * self.cell[src]
        out = np.empty(len(self.z))
        for a in range(0, len(self.z), chunk):
            d = self.z[a : a + chunk, None] - w[None, :]
            out[a : a + chunk] = (1.0 / (d.real**2 + d.imag**2)) @ mass
        return out


def two_weight_probe(
    mu1: HalfPlaneWeight,
    mu2: HalfPlaneWeight,
    p: float,
    test_family: Sequence[StepFunction],
    truncation: tuple = (-8.0, 8.0, 8.0),
    *,
    min_level: int = -4,
    n_sub: int = 4,
) -> ProbeResult:
    """Sampled ``||B~f||_{p,mu1} / ||f||_{p,mu2}`` over a family of step functions.

    ``truncation = (x0, x1, y1)`` bounds the grid, which covers every tile in
    ``[x0, x1] x [2^min_level, y1]`` with ``n_sub x n_sub`` midpoints per tile.
    Also reports the smallest ``c`` with ``B~f <= c E B~ E f`` on the grid.
    Exploratory only.
    """
    if not p > 1:
        raise InvalidArgument("p must exceed 1")
    x0, x1, y1 = truncation
    grid = _Grid(tiles_in_rectangle(x0, x1, y1, min_level), n_sub)
    w1, w2 = mu1(grid.z), mu2(grid.z)
    ratios, flagged, cs = [], [], []
    bad1 = mu1.exponent_at_i <= -2
    bad2 = mu2.exponent_at_i <= -2
    for idx, f in enumerate(test_family):
        fv = np.array([f(z) for z in grid.z])
        if not fv.any():
            flagged.append({"index": idx, "reason": "test function vanishes on the grid"})
            continue
        on_i = any(t.contains(1j) for t in f.support)
        if bad1 or (bad2 and on_i):
            flagged.append({"index": idx, "reason": "weighted norm diverges at i"})
            continue
        bf = grid.B_abs(fv)
        num = math.fsum(bf**p * w1 * grid.cell) ** (1 / p)
        den = math.fsum(fv**p * w2 * grid.cell) ** (1 / p)
        ratios.append(num / den)
        ebe = grid.tile_mean(grid.B_abs(grid.tile_mean(fv)))
        mask = ebe > 0
        cs.append(float(np.max(bf[mask] / ebe[mask])))
    return ProbeResult(
        ratios=ratios,
        max_ratio=max(ratios) if ratios else math.nan,
        median_ratio=float(np.median(ratios)) if ratios else math.nan,
        flagged=flagged,
        e_domination_c=max(cs) if cs else math.nan,
        n_points=len(grid.z),
    )


def indicator(tile: TilingSquare, value: float = 1.0) -> StepFunction:
    return StepFunction.constant_on({tile: value})


def stderr_progress(msg: str) -> None:
    print(msg, file=sys.stderr, flush=True)
