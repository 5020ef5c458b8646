"""Weighted integration on the disk, the punctured disk and pieces of the upper half plane.

Every area integral uses the normalized measure ``dA = dx dy / pi``, so the unit
disk has area 1.  Pure-power singularities are removed by exact substitutions
before any Gauss rule is applied, and divergence is decided from exponents, not
from overflowing sums.
"""

from __future__ import annotations

import heapq
import math
import os
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.special import logsumexp, roots_jacobi, roots_legendre

from .errors import (
    AnalyticNonintegrable,
    DivergentIntegral,
    DomainError,
    InvalidArgument,
    QuadratureError,
)
from .weights import HalfPlaneWeight

RTOL_ENV = "BERGMAN_LAB_RTOL"


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    max_subdivision_depth: int = 40

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise InvalidArgument("tolerances must be positive")
        if int(self.max_subdivision_depth) < 1:
            raise InvalidArgument("max_subdivision_depth must be >= 1")

    @classmethod
    def from_env(cls, **overrides) -> "QuadratureSpec":
        """Default spec, with ``rel_tol`` taken from ``BERGMAN_LAB_RTOL`` when set."""
        raw = os.environ.get(RTOL_ENV)
        if raw is not None and "rel_tol" not in overrides:
            try:
                overrides["rel_tol"] = float(raw)
            except ValueError as exc:
                raise InvalidArgument(f"{RTOL_ENV}={raw!r} is not a number") from exc
        return cls(**overrides)

    def tightened(self, factor: float = 0.5) -> "QuadratureSpec":
        return QuadratureSpec(self.rel_tol * factor, self.abs_tol * factor, self.max_subdivision_depth)

    def to_dict(self) -> dict:
        return {
            "rel_tol": self.rel_tol,
            "abs_tol": self.abs_tol,
            "max_subdivision_depth": self.max_subdivision_depth,
        }


DEFAULT_SPEC = QuadratureSpec()


def _spec(spec: QuadratureSpec | None) -> QuadratureSpec:
    return DEFAULT_SPEC if spec is None else spec


# ---------------------------------------------------------------------------
# Gauss-Kronrod 7/15

_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

GK_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
GK_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
_G_WEIGHTS = np.zeros(15)
_G_WEIGHTS[1::2] = [_WG[0], _WG[1], _WG[2], _WG[3], _WG[2], _WG[1], _WG[0]]

_EPS = np.finfo(float).eps
_TINY = np.finfo(float).tiny


@dataclass
class QuadResult:
    value: complex | float
    error: float
    n_eval: int
    n_intervals: int
    converged: bool = True


def _gk_panels(f, lo: np.ndarray, hi: np.ndarray):
    """Apply GK15 to many panels in one vectorized call."""
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    x = mid[:, None] + half[:, None] * GK_NODES[None, :]
    fx = np.asarray(f(x.ravel())).reshape(x.shape)
    k = half * (fx @ GK_WEIGHTS)
    g = half * (fx @ _G_WEIGHTS)
    # QUADPACK-style error scaling
    mean = k / np.where(half == 0, 1.0, 2 * half)
    resabs = np.abs(half) * (np.abs(fx) @ GK_WEIGHTS)
    resasc = np.abs(half) * (np.abs(fx - mean[:, None]) @ GK_WEIGHTS)
    err = np.abs(k - g)
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = resasc * np.minimum(1.0, (200.0 * err / resasc) ** 1.5)
    err = np.where((resasc > 0) & np.isfinite(scaled), scaled, err)
    floor = 50.0 * _EPS * resabs
    err = np.where(resabs > _TINY / (50 * _EPS), np.maximum(err, floor), err)
    if not np.all(np.isfinite(k)):
        raise QuadratureError("integrand returned a non-finite value")
    return k, err


def _fsum(values) -> complex | float:
    values = np.asarray(values)
    if np.iscomplexobj(values):
        return complex(math.fsum(values.real), math.fsum(values.imag))
    return math.fsum(values)


def adaptive_gk(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    spec: QuadratureSpec | None = None,
    *,
    points: Sequence[float] = (),
    max_intervals: int = 20000,
    strict: bool = True,
) -> QuadResult:
    """Globally adaptive Gauss-Kronrod 7/15 on ``[a, b]``.

    ``f`` must accept and return 1-D arrays.  Panels are bisected worst-first
    until the summed error estimate meets ``max(abs_tol, rel_tol*|I|)``.  Panels
    deeper than ``max_subdivision_depth`` are frozen; if the target is still
    missed a :class:`QuadratureError` is raised (or, with ``strict=False``, a
    result flagged ``converged=False`` is returned).
    """
    spec = _spec(spec)
    if a == b:
        return QuadResult(0.0, 0.0, 0, 0)
    edges = np.unique(np.clip(np.array([a, b, *points], dtype=float), min(a, b), max(a, b)))
    if a > b:
        res = adaptive_gk(f, b, a, spec, points=points, max_intervals=max_intervals, strict=strict)
        res.value = -res.value
        return res
    lo, hi = edges[:-1], edges[1:]
    k, err = _gk_panels(f, lo, hi)
    n_eval = 15 * len(lo)
    panels = [(-err[i], i, lo[i], hi[i], k[i], err[i], 0) for i in range(len(lo))]
    heapq.heapify(panels)
    frozen: list = []
    counter = len(panels)
    while True:
        live = panels + frozen
        total = _fsum([p[4] for p in live])
        total_err = math.fsum(p[5] for p in live)
        if total_err <= max(spec.abs_tol, spec.rel_tol * abs(total)):
            return QuadResult(total, total_err, n_eval, len(live))
        if not panels or len(live) >= max_intervals:
            msg = (
                f"adaptive quadrature stalled on [{a}, {b}]: error {total_err:.3g} "
                f"vs target {max(spec.abs_tol, spec.rel_tol * abs(total)):.3g}"
            )
            if strict:
                exc = QuadratureError(msg)
                exc.estimate = total
                exc.error = total_err
                raise exc
            return QuadResult(total, total_err, n_eval, len(live), converged=False)
        # split a batch of the worst panels together to amortize the call
        batch = []
        while panels and len(batch) < 8:
            item = heapq.heappop(panels)
            if item[6] >= spec.max_subdivision_depth:
                frozen.append(item)
                continue
            batch.append(item)
            if not panels or -panels[0][0] < 0.25 * item[5]:
                break
        if not batch:
            continue
        blo = np.array([p[2] for p in batch])
        bhi = np.array([p[3] for p in batch])
        bmid = 0.5 * (blo + bhi)
        k2, e2 = _gk_panels(f, np.concatenate([blo, bmid]), np.concatenate([bmid, bhi]))
        n_eval += 30 * len(batch)
        nb = len(batch)
        for j, item in enumerate(batch):
            depth = item[6] + 1
            for idx, (l, h) in ((j, (blo[j], bmid[j])), (j + nb, (bmid[j], bhi[j]))):
                counter += 1
                heapq.heappush(panels, (-e2[idx], counter, l, h, k2[idx], e2[idx], depth))


def integrate_power_singular(
    g: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    left_exponent: float = 0.0,
    right_exponent: float = 0.0,
    spec: QuadratureSpec | None = None,
    *,
    split: float | None = None,
) -> float:
    """``int_a^b (x-a)**left_exponent * (b-x)**right_exponent * g(x) dx`` for smooth ``g``.

    On each half the substitution ``x - a = L*u**(1/(1+left_exponent))`` (and its
    mirror image) makes the power factor and the Jacobian cancel exactly, so
    ``g`` is the only thing the Gauss rule sees near the endpoints.
    """
    spec = _spec(spec)
    if left_exponent <= -1 or right_exponent <= -1:
        raise DivergentIntegral(
            f"endpoint exponent {min(left_exponent, right_exponent)} <= -1 is not integrable"
        )
    if not b > a:
        raise InvalidArgument("need a < b")
    m = 0.5 * (a + b) if split is None else float(split)
    total = []
    if left_exponent == 0.0:
        res = adaptive_gk(lambda x: (b - x) ** right_exponent * g(x), a, m, spec)
        total.append(res.value)
    else:
        L = m - a
        kap = 1.0 / (1.0 + left_exponent)

        def left(u):
            x = a + L * u**kap
            return (b - x) ** right_exponent * g(x)

        res = adaptive_gk(left, 0.0, 1.0, spec)
        total.append(L ** (1.0 + left_exponent) * kap * res.value)
    if right_exponent == 0.0:
        res = adaptive_gk(lambda x: (x - a) ** left_exponent * g(x), m, b, spec)
        total.append(res.value)
    else:
        L = b - m
        kap = 1.0 / (1.0 + right_exponent)

        def right(u):
            x = b - L * u**kap
            return (x - a) ** left_exponent * g(x)

        res = adaptive_gk(right, 0.0, 1.0, spec)
        total.append(L ** (1.0 + right_exponent) * kap * res.value)
    return _fsum(total)


# ---------------------------------------------------------------------------
# Radial profiles and moments


@dataclass(frozen=True)
class RadialPiece:
    """``coeff * r**exponent`` on ``(exp(log_lo), exp(log_hi)]``; ``log_lo = -inf`` means 0.

    Endpoints are stored as logarithms because the blow-up sequences use
    breakpoints like ``j**-j`` that underflow long before the sums converge.
    """

    log_lo: float
    log_hi: float
    exponent: float
    coeff: complex | float = 1.0

    def __post_init__(self):
        if not self.log_hi > self.log_lo:
            raise InvalidArgument("radial piece must have lo < hi")
        if self.log_hi > 1e-15:
            raise InvalidArgument("radial pieces must lie in (0, 1]")

    @property
    def lo(self) -> float:
        return math.exp(self.log_lo)

    @property
    def hi(self) -> float:
        return math.exp(self.log_hi)

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore"):
            lr = np.log(r)
        inside = (lr > self.log_lo) & (lr <= self.log_hi)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            val = self.coeff * np.exp(self.exponent * lr)
        return np.where(inside, val, 0.0)


@dataclass(frozen=True)
class RadialProfile:
    """A radial function on ``(0, 1]``.

    Either an ordered tuple of disjoint :class:`RadialPiece` (closed form
    available) or a generic callable with optional power-law hints
    ``f(r) ~ r**exponent_at_zero`` near 0 and ``~ (1-r)**exponent_at_one`` near 1.
    """

    pieces: tuple = ()
    func: Callable | None = field(default=None, compare=False)
    exponent_at_zero: float = 0.0
    exponent_at_one: float = 0.0

    def __post_init__(self):
        if self.func is None:
            ps = tuple(sorted(self.pieces, key=lambda p: p.log_lo))
            for p, q in zip(ps, ps[1:]):
                if q.log_lo < p.log_hi - 1e-15 * max(1.0, abs(p.log_hi)):
                    raise InvalidArgument("radial pieces overlap")
            object.__setattr__(self, "pieces", ps)

    @property
    def closed_form(self) -> bool:
        return self.func is None

    @classmethod
    def monomial(cls, exponent: float, coeff=1.0, lo: float = 0.0, hi: float = 1.0) -> "RadialProfile":
        return cls((_piece(lo, hi, exponent, coeff),))

    @classmethod
    def from_pieces(cls, pieces: Iterable[tuple]) -> "RadialProfile":
        """Build from ``(lo, hi, exponent, coeff)`` tuples."""
        return cls(tuple(_piece(*p) for p in pieces))

    @classmethod
    def from_function(cls, func, exponent_at_zero: float = 0.0, exponent_at_one: float = 0.0):
        return cls((), func, float(exponent_at_zero), float(exponent_at_one))

    def __call__(self, r):
        if self.func is not None:
            return self.func(np.asarray(r, dtype=float))
        r = np.asarray(r, dtype=float)
        out = np.zeros(r.shape, dtype=complex if self.is_complex else float)
        for p in self.pieces:
            out = out + p(r)
        return out

    @property
    def is_complex(self) -> bool:
        return any(isinstance(p.coeff, complex) and p.coeff.imag != 0 for p in self.pieces)

    def times_power(self, m: float) -> "RadialProfile":
        """Multiply by ``r**m``."""
        if self.func is not None:
            f = self.func
            return RadialProfile.from_function(
                lambda r: f(r) * r**m, self.exponent_at_zero + m, self.exponent_at_one
            )
        return RadialProfile(
            tuple(RadialPiece(p.log_lo, p.log_hi, p.exponent + m, p.coeff) for p in self.pieces)
        )

    def scaled(self, c) -> "RadialProfile":
        if self.func is not None:
            f = self.func
            return RadialProfile.from_function(lambda r: c * f(r), self.exponent_at_zero, self.exponent_at_one)
        return RadialProfile(
            tuple(RadialPiece(p.log_lo, p.log_hi, p.exponent, c * p.coeff) for p in self.pieces)
        )

    def abs_power(self, q: float) -> "RadialProfile":
        """``|profile|**q``."""
        if self.func is not None:
            f = self.func
            return RadialProfile.from_function(
                lambda r: np.abs(f(r)) ** q, self.exponent_at_zero * q, self.exponent_at_one * q
            )
        return RadialProfile(
            tuple(RadialPiece(p.log_lo, p.log_hi, p.exponent * q, abs(p.coeff) ** q) for p in self.pieces)
        )


def _piece(lo, hi, exponent, coeff=1.0) -> RadialPiece:
    log_lo = -math.inf if lo <= 0 else math.log(lo)
    return RadialPiece(log_lo, math.log(hi), float(exponent), coeff)


def _piece_closed(p: RadialPiece, w: float):
    """``int_lo^hi c r**(gamma+w+1) dr`` evaluated without cancellation."""
    e = p.exponent + w + 2.0
    if p.log_lo == -math.inf:
        if e <= 0:
            raise DivergentIntegral(
                f"piece r^{p.exponent:g} against r^{w + 1:g} dr diverges at 0 (total exponent {e - 1:g} <= -1)"
            )
        return p.coeff * math.exp(e * p.log_hi) / e
    if e == 0.0:
        return p.coeff * (p.log_hi - p.log_lo)
    if e > 0:
        return p.coeff * math.exp(e * p.log_hi) * -math.expm1(e * (p.log_lo - p.log_hi)) / e
    return p.coeff * math.exp(e * p.log_lo) * -math.expm1(e * (p.log_hi - p.log_lo)) / -e


def _piece_log(p: RadialPiece, w: float) -> float:
    e = p.exponent + w + 2.0
    if p.log_lo == -math.inf:
        if e <= 0:
            raise DivergentIntegral(f"piece diverges at 0 (total exponent {e - 1:g} <= -1)")
        return e * p.log_hi - math.log(e)
    if e == 0.0:
        return math.log(p.log_hi - p.log_lo)
    if e > 0:
        return e * p.log_hi + math.log(-math.expm1(e * (p.log_lo - p.log_hi))) - math.log(e)
    return e * p.log_lo + math.log(-math.expm1(e * (p.log_hi - p.log_lo))) - math.log(-e)


def _piece_quadrature(p: RadialPiece, w: float, spec: QuadratureSpec):
    e = p.exponent + w + 2.0
    c = p.coeff
    parts = []
    log_hi = p.log_hi
    log_lo = p.log_lo
    if log_lo == -math.inf:
        if e <= 0:
            raise DivergentIntegral(f"piece diverges at 0 (total exponent {e - 1:g} <= -1)")
        # (0, hi/2] with the power flattened, (hi/2, hi] in the log variable
        h2 = math.exp(log_hi) / 2
        parts.append(integrate_power_singular(lambda r: np.ones_like(r), 0.0, h2, e - 1.0, 0.0, spec, split=h2))
        log_lo = log_hi - math.log(2.0)
    res = adaptive_gk(lambda x: np.exp(e * x), log_lo, log_hi, spec)
    parts.append(res.value)
    return c * _fsum(parts)


def integrate_radial(
    profile: RadialProfile,
    weight_exponent: float,
    spec: QuadratureSpec | None = None,
    method: str = "auto",
):
    """``2 * int_0^1 profile(r) * r**(weight_exponent+1) dr``.

    The factor 2 is the normalized angular integral of a matched pair of modes.
    ``method`` is ``"closed"``, ``"quadrature"`` or ``"auto"`` (closed whenever
    the profile is piecewise power).
    """
    spec = _spec(spec)
    w = float(weight_exponent)
    if method not in ("auto", "closed", "quadrature"):
        raise InvalidArgument(f"unknown method {method!r}")
    if profile.closed_form:
        if method in ("auto", "closed"):
            vals = [_piece_closed(p, w) for p in profile.pieces]
        else:
            vals = [_piece_quadrature(p, w, spec) for p in profile.pieces]
        return 2 * _fsum(vals) if vals else 0.0
    if method == "closed":
        raise InvalidArgument("profile has no closed form")
    a0 = profile.exponent_at_zero + w + 1.0
    a1 = profile.exponent_at_one
    if a0 <= -1 or a1 <= -1:
        raise DivergentIntegral(f"radial integrand exponents {a0:g} at 0, {a1:g} at 1 not integrable")
    f = profile.func

    def regular(r):
        return f(r) * r ** (w + 1.0 - a0) / ((1.0 - r) ** a1 if a1 else 1.0)

    return 2 * integrate_power_singular(regular, 0.0, 1.0, a0, a1, spec)


def log_integrate_radial(profile: RadialProfile, weight_exponent: float) -> float:
    """Natural log of :func:`integrate_radial` for profiles with positive coefficients."""
    if not profile.closed_form:
        raise InvalidArgument("log-space integration needs a piecewise-power profile")
    logs = []
    for p in profile.pieces:
        c = p.coeff
        if isinstance(c, complex) or c <= 0:
            raise InvalidArgument("log-space integration needs positive coefficients")
        logs.append(math.log(c) + _piece_log(p, float(weight_exponent)))
    return math.log(2.0) + float(logsumexp(logs))


def weighted_moment(m: int, s_prime: float) -> float:
    """Normalized ``int_D |z|^(2m) |z|^s' dA = 2/(2m+2+s')``."""
    den = 2 * m + 2 + float(s_prime)
    if den <= 0:
        raise DivergentIntegral(f"moment diverges: 2m+2+s' = {den:g} <= 0")
    return 2.0 / den


def weighted_moment_quadrature(m: int, s_prime: float, spec: QuadratureSpec | None = None) -> float:
    """Same moment by adaptive radial quadrature (independent of the closed form)."""
    den = 2 * m + 2 + float(s_prime)
    if den <= 0:
        raise DivergentIntegral(f"moment diverges: 2m+2+s' = {den:g} <= 0")
    return float(integrate_radial(RadialProfile.monomial(2 * m), s_prime, spec, method="quadrature"))


def checked_weighted_moment(m: int, s_prime: float, spec: QuadratureSpec | None = None) -> float:
    """Closed-form moment, cross-checked against quadrature at ``spec.rel_tol``."""
    spec = _spec(spec)
    exact = weighted_moment(m, s_prime)
    approx = weighted_moment_quadrature(m, s_prime, spec)
    if abs(approx - exact) > 10 * spec.rel_tol * abs(exact):
        raise QuadratureError(f"moment ({m}, {s_prime}) mismatch: {approx!r} vs {exact!r}")
    return exact


# ---------------------------------------------------------------------------
# Regions in the plane


@dataclass(frozen=True)
class SpecialDisk:
    """Disk centered at the real point ``x0``; only its upper half is integrated over."""

    x0: float
    R: float

    def __post_init__(self):
        if not self.R > 0:
            raise InvalidArgument("disk radius must be positive")
        if isinstance(self.x0, complex) and self.x0.imag != 0:
            raise InvalidArgument("special disk center must be real")

    @property
    def center(self) -> complex:
        return complex(self.x0, 0.0)

    def region(self) -> "ConvexRegion":
        return ConvexRegion((_UPPER,), (self.center, float(self.R)))

    def contains_closure(self, z: complex) -> bool:
        return abs(z - self.center) <= self.R * (1 + 1e-14) and z.imag >= 0

    def normalized_area(self) -> float:
        return self.R**2 / 2


@dataclass(frozen=True)
class GeneralDisk:
    """Disk centered in the closed upper half plane, intersected with it."""

    center: complex
    R: float

    def __post_init__(self):
        object.__setattr__(self, "center", complex(self.center))
        if not self.R > 0:
            raise InvalidArgument("disk radius must be positive")
        if self.center.imag < 0:
            raise InvalidArgument("disk center must lie in the closed upper half plane")

    def region(self) -> "ConvexRegion":
        return ConvexRegion((_UPPER,), (self.center, float(self.R)))

    def contains_closure(self, z: complex) -> bool:
        return abs(z - self.center) <= self.R * (1 + 1e-14) and z.imag >= 0

    def normalized_area(self) -> float:
        d, R = self.center.imag, self.R
        if d >= R:
            return R**2
        segment = R**2 * math.acos(d / R) - d * math.sqrt(R * R - d * d)
        return (math.pi * R**2 - segment) / math.pi


_UPPER = (0.0, -1.0, 0.0)  # -y <= 0


@dataclass(frozen=True)
class ConvexRegion:
    """Intersection of half planes ``nx*x + ny*y <= c`` and an optional disk."""

    halfplanes: tuple = ()
    disk: tuple | None = None

    @classmethod
    def rectangle(cls, x0: float, x1: float, y0: float, y1: float) -> "ConvexRegion":
        if not (x1 > x0 and y1 > y0):
            raise InvalidArgument("degenerate rectangle")
        return cls(((-1.0, 0.0, -x0), (1.0, 0.0, x1), (0.0, -1.0, -y0), (0.0, 1.0, y1)))

    @classmethod
    def full_disk(cls, center: complex = 0.0, R: float = 1.0) -> "ConvexRegion":
        return cls((), (complex(center), float(R)))

    def scale(self) -> float:
        s = 1.0
        if self.disk is not None:
            s = max(s, abs(self.disk[0]) + self.disk[1])
        for nx, ny, c in self.halfplanes:
            s = max(s, abs(c) / math.hypot(nx, ny))
        return s

    def contains(self, z: complex, tol: float = 0.0) -> bool:
        for nx, ny, c in self.halfplanes:
            if nx * z.real + ny * z.imag > c + tol * math.hypot(nx, ny):
                return False
        if self.disk is not None and abs(z - self.disk[0]) > self.disk[1] + tol:
            return False
        return True

    def interior_point(self) -> complex:
        """A point well inside the region (centroid of a vertex cloud)."""
        pts = self._boundary_points()
        if self.disk is not None:
            c, R = self.disk
            ring = c + R * np.exp(2j * np.pi * np.arange(64) / 64)
            pts.extend(z for z in ring if self.contains(z, 1e-12 * self.scale()))
        if not pts:
            raise DomainError("region is empty")
        p = complex(np.mean(pts))
        if not self.contains(p):
            raise DomainError("could not locate an interior point")
        return p

    def radius_about(self, P: complex) -> float:
        """Largest distance from ``P`` to the region (sampled on 256 rays)."""
        theta = 2 * np.pi * np.arange(256) / 256
        rin, rout = self.ray_interval(P, theta)
        return float(np.max(np.where(rout > rin, rout, 0.0)))

    def _boundary_points(self) -> list:
        tol = 1e-12 * self.scale()
        pts = []
        hp = self.halfplanes
        for i in range(len(hp)):
            for j in range(i + 1, len(hp)):
                a1, b1, c1 = hp[i]
                a2, b2, c2 = hp[j]
                det = a1 * b2 - a2 * b1
                if abs(det) < 1e-14:
                    continue
                z = complex((c1 * b2 - c2 * b1) / det, (a1 * c2 - a2 * c1) / det)
                if self.contains(z, tol):
                    pts.append(z)
            if self.disk is not None:
                pts.extend(z for z in _line_circle(hp[i], *self.disk) if self.contains(z, tol))
        return pts

    def breakpoint_angles(self, P: complex) -> np.ndarray:
        """Directions from ``P`` at which the ray/region intersection changes form."""
        tol = 1e-12 * self.scale()
        angles = [np.angle(z - P) for z in self._boundary_points() if abs(z - P) > tol]
        for nx, ny, c in self.halfplanes:
            g = c - (nx * P.real + ny * P.imag)
            if abs(g) <= tol * math.hypot(nx, ny):
                t = math.atan2(nx, -ny)
                angles += [t, t + math.pi]
        if self.disk is not None:
            C, R = self.disk
            d = abs(C - P)
            base = np.angle(C - P) if d > 0 else 0.0
            if d > R + tol:
                half = math.asin(R / d)
                angles += [base + half, base - half]
            elif abs(d - R) <= tol:
                angles += [base + math.pi / 2, base - math.pi / 2]
        if not angles:
            return np.zeros(0)
        a = np.sort(np.mod(np.array(angles, dtype=float), 2 * math.pi))
        keep = np.concatenate([[True], np.diff(a) > 1e-13])
        a = a[keep]
        if len(a) > 1 and a[-1] - a[0] > 2 * math.pi - 1e-13:
            a = a[:-1]
        return a

    def ray_interval(self, P: complex, theta: np.ndarray):
        """``(rho_in, rho_out)`` of the ray ``P + rho*e^{i theta}`` inside the region."""
        ct, st = np.cos(theta), np.sin(theta)
        rin = np.zeros_like(theta)
        rout = np.full_like(theta, np.inf)
        tol = 1e-12 * self.scale()
        for nx, ny, c in self.halfplanes:
            g = c - (nx * P.real + ny * P.imag)
            if abs(g) <= tol * math.hypot(nx, ny):
                g = 0.0
            nu = nx * ct + ny * st
            with np.errstate(divide="ignore", invalid="ignore"):
                q = g / nu
            rout = np.where(nu > 0, np.minimum(rout, q), rout)
            rin = np.where(nu < 0, np.maximum(rin, q), rin)
            if g < 0:
                rout = np.where(nu == 0, -1.0, rout)
        if self.disk is not None:
            C, R = self.disk
            dx, dy = P.real - C.real, P.imag - C.imag
            b = dx * ct + dy * st
            # b^2 - (|d|^2 - R^2) = R^2 - cross^2, without cancellation when |d| >> R
            cross = dx * st - dy * ct
            disc = (R - cross) * (R + cross)
            if abs(math.hypot(dx, dy) - R) <= tol:
                # pole on the circle: the chord through it has one end exactly at rho = 0
                disc = b * b
            sq = np.sqrt(np.maximum(disc, 0.0))
            rin = np.maximum(rin, -b - sq)
            rout = np.minimum(rout, np.where(disc >= 0, -b + sq, -1.0))
        rin = np.maximum(rin, 0.0)
        if not np.all(np.isfinite(rout[rout > rin])):
            raise DomainError("region is unbounded")
        return rin, rout


def _line_circle(line, C: complex, R: float) -> list:
    nx, ny, c = line
    n = math.hypot(nx, ny)
    nx, ny, c = nx / n, ny / n, c / n
    d = c - (nx * C.real + ny * C.imag)
    if abs(d) > R:
        return []
    foot = C + d * complex(nx, ny)
    h = math.sqrt(max(R * R - d * d, 0.0))
    t = complex(-ny, nx)
    return [foot + h * t, foot - h * t]


@lru_cache(maxsize=64)
def _jacobi_rule(n: int, beta: float):
    x, w = roots_jacobi(n, 0.0, beta)
    return x, w


@lru_cache(maxsize=8)
def _legendre_rule(n: int):
    return roots_legendre(n)


_N_RADIAL = 16


def integrate_region(
    f: Callable[[np.ndarray], np.ndarray],
    region: ConvexRegion,
    spec: QuadratureSpec | None = None,
    *,
    pole: complex | None = None,
    pole_exponent: float = 0.0,
    inner_radius: float | None = None,
) -> float:
    """Normalized ``int_region |z - pole|**pole_exponent * f(z) dA(z)``.

    Polar coordinates about ``pole`` (default: an interior point).  Angles are
    split wherever the ray/region geometry changes and integrated adaptively
    after a cosine substitution; radially, a Gauss-Jacobi panel absorbs the
    pole's power and geometric Gauss-Legendre panels take over beyond it.
    ``f`` must be smooth on the closed region; the only singularity allowed
    is the explicit power at the pole.
    """
    spec = _spec(spec)
    P = region.interior_point() if pole is None else complex(pole)
    a = float(pole_exponent)
    if a <= -2 and region.contains(P, 1e-12 * region.scale()):
        raise DivergentIntegral(f"|z - pole|^{a:g} is not integrable at the pole")
    r_first = 0.5 if inner_radius is None else float(inner_radius)
    xj, wj = _jacobi_rule(_N_RADIAL, 1.0 + a) if a > -2 else (None, None)
    xl, wl = _legendre_rule(_N_RADIAL)

    def radial(theta):
        theta = np.asarray(theta, dtype=float)
        rin, rout = region.ray_interval(P, theta)
        ok = rout > rin
        out = np.zeros_like(theta)
        if not ok.any():
            return out
        th, rin, rout = theta[ok], rin[ok], rout[ok]
        u = np.exp(1j * th)
        acc = np.zeros_like(th)
        start = rin.copy()
        at_pole = rin == 0.0
        if at_pole.any():
            r1 = np.minimum(rout[at_pole], r_first)
            rho = 0.5 * r1[:, None] * (1.0 + xj[None, :])
            vals = f(P + rho * u[at_pole][:, None])
            acc[at_pole] = (0.5 * r1) ** (2.0 + a) * (np.real(vals) @ wj)
            start[at_pole] = r1
        ratio = rout / np.where(start > 0, start, 1.0)
        need = rout > start * (1 + 1e-15)
        if need.any():
            n_pan = int(max(1, math.ceil(math.log2(max(ratio[need].max(), 1.0)))))
            s0, r0 = start[need], rout[need]
            q = (r0 / s0) ** (1.0 / n_pan)
            k = np.arange(n_pan + 1)
            edges = s0[:, None] * q[:, None] ** k[None, :]
            edges[:, -1] = r0
            lo, hi = edges[:, :-1], edges[:, 1:]
            half = 0.5 * (hi - lo)
            rho = (0.5 * (hi + lo))[..., None] + half[..., None] * xl[None, None, :]
            z = P + rho * u[need][:, None, None]
            vals = np.real(f(z)) * rho ** (1.0 + a)
            acc[need] += np.einsum("ijk,k,ij->i", vals, wl, half)
        out[ok] = acc
        return out

    cuts = region.breakpoint_angles(P)
    if len(cuts) == 0:
        intervals = [(0.0, 2 * math.pi)]
    else:
        intervals = list(zip(cuts[:-1], cuts[1:])) + [(cuts[-1], cuts[0] + 2 * math.pi)]
    parts = []
    for ta, tb in intervals:
        if tb - ta < 1e-14:
            continue
        mid = np.array([0.5 * (ta + tb)])
        r_in, r_out = region.ray_interval(P, mid)
        if not r_out[0] > r_in[0]:
            continue
        span = tb - ta

        def g(v, ta=ta, span=span):
            theta = ta + 0.5 * span * (1 - np.cos(np.pi * v))
            return radial(theta) * (0.5 * span * np.pi * np.sin(np.pi * v))

        parts.append(adaptive_gk(g, 0.0, 1.0, spec).value)
    return _fsum(parts) / math.pi


def integrate_disk(f, center: complex = 0.0, R: float = 1.0, spec: QuadratureSpec | None = None) -> float:
    """Normalized integral of ``f`` over a full disk (no half-plane cut)."""
    return integrate_region(f, ConvexRegion.full_disk(center, R), spec, pole=complex(center))


def region_of(disk) -> ConvexRegion:
    if isinstance(disk, ConvexRegion):
        return disk
    return disk.region()


def check_local_integrability(weight: HalfPlaneWeight, region: ConvexRegion) -> None:
    """Raise :class:`AnalyticNonintegrable` when the weight blows up non-integrably at ``i``."""
    a = weight.exponent_at_i
    if a <= -2 and region.contains(1j, 1e-12 * region.scale()):
        raise AnalyticNonintegrable(
            f"weight {weight.describe()} has |z-i|^{a:g} at i; need exponent > -2",
            factor=weight.describe(),
            threshold=-2.0,
        )


def integrate_half_disk(weight: HalfPlaneWeight, disk, spec: QuadratureSpec | None = None) -> float:
    """Normalized integral of a :class:`HalfPlaneWeight` over ``disk`` cut to the upper half plane."""
    region = region_of(disk)
    check_local_integrability(weight, region)
    a = weight.exponent_at_i
    center = region.interior_point()
    if abs(center - 1j) > 3 * region.radius_about(center):
        # i is far away: the weight is smooth on the region, use its own center
        return integrate_region(weight, region, spec, pole=center)
    return integrate_region(weight.regular_at_i, region, spec, pole=1j, pole_exponent=a)


def average_over(weight: HalfPlaneWeight, disk, spec: QuadratureSpec | None = None) -> float:
    region = region_of(disk)
    area = disk.normalized_area() if hasattr(disk, "normalized_area") else region_area(region, spec)
    return integrate_half_disk(weight, region, spec) / area


def region_area(region: ConvexRegion, spec: QuadratureSpec | None = None) -> float:
    return integrate_region(lambda z: np.ones(np.shape(z)), region, spec)


# ---------------------------------------------------------------------------
# The I_{alpha,beta} integral


def _theta_integral(rho: np.ndarray) -> np.ndarray:
    """``int_{-pi}^{pi} dphi / (1 - 2 rho cos phi + rho^2)`` on graded panels about ``phi = 0``."""
    rho = np.asarray(rho, dtype=float)
    xl, wl = _legendre_rule(_N_RADIAL)
    delta = np.clip(1.0 - rho, 1e-300, math.pi)
    n_pan = int(max(1, math.ceil(math.log2(math.pi / delta.min()))))
    q = (math.pi / delta) ** (1.0 / n_pan)
    k = np.arange(n_pan + 1)
    edges = np.concatenate([np.zeros((len(rho), 1)), delta[:, None] * q[:, None] ** k[None, :]], axis=1)
    edges[:, -1] = math.pi
    lo, hi = edges[:, :-1], edges[:, 1:]
    half = 0.5 * (hi - lo)
    phi = (0.5 * (hi + lo))[..., None] + half[..., None] * xl[None, None, :]
    s = np.sin(0.5 * phi)
    den = (1.0 - rho[:, None, None]) ** 2 + 4.0 * rho[:, None, None] * s * s
    return 2.0 * np.einsum("ijk,k,ij->i", 1.0 / den, wl, half)


def _I_general(alpha: float, beta: float, z: complex, spec: QuadratureSpec | None = None) -> float:
    """``int_D (1-|w|^2)^alpha |w|^beta / |1 - z conj(w)|^2 dA(w)`` for ``alpha > -1, beta > -2``."""
    if not (alpha > -1 and beta > -2):
        raise InvalidArgument(f"need alpha > -1 and beta > -2, got ({alpha}, {beta})")
    az = abs(complex(z))
    if az >= 1:
        raise DomainError("z must lie in the open unit disk")

    def regular(r):
        # (1-r)^alpha and r^(beta+1) are handled by the endpoint substitutions
        return (1.0 + r) ** alpha * _theta_integral(az * r)

    val = integrate_power_singular(regular, 0.0, 1.0, beta + 1.0, alpha, spec)
    return val / math.pi


def eval_I_alpha_beta(alpha: float, beta: float, z, spec: QuadratureSpec | None = None) -> float:
    """Normalized ``int (1-|w|^2)^alpha |w|^beta / |1 - z conj(w)|^2 dA(w)`` over the punctured disk.

    Requires ``-1 < alpha < 0`` and ``beta > -2``.  The angular integral is taken
    numerically about ``arg z`` on panels graded toward the near-singularity,
    the radial one adaptively with both endpoint powers substituted away.
    """
    if not (-1 < alpha < 0):
        raise InvalidArgument(f"alpha must lie in (-1, 0), got {alpha}")
    if not beta > -2:
        raise InvalidArgument(f"beta must exceed -2, got {beta}")
    z = complex(z)
    if z == 0 or abs(z) >= 1:
        raise DomainError("z must lie in the punctured unit disk")
    return _I_general(alpha, beta, z, spec)
