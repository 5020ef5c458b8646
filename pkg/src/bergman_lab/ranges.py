"""Sharp L^p ranges for weighted Bergman projections.

Everything here is exact: exponents that arrive as ints, Fractions or decimal
strings stay rational, and floats are converted through their shortest decimal
representation (snapping to an integer when within ``FLOAT_SLACK``).  Range
endpoints are :class:`fractions.Fraction` values or the distinguished
:data:`INF`.

The exponent bookkeeping follows one convention throughout: a weight exponent
``s'`` is split as ``s' = s + 2k`` with ``k`` an integer and ``s`` in the
half-open interval ``(0, 2]``.  Even integers therefore get ``s = 2`` and
``k = s'/2 - 1``; an off-by-one in ``k`` shifts every range, so all callers go
through :func:`decompose_exponent`.
"""

from __future__ import annotations

import math
import numbers
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from typing import Callable, Sequence, Union

import numpy as np

from .errors import InvalidArgument, UnsupportedCase

FLOAT_SLACK = 1e-12


class _Infinity:
    """Positive infinity as an extended-real endpoint, ordered above every number."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __float__(self):
        return math.inf

    def __hash__(self):
        return hash(math.inf)

    def __eq__(self, other):
        return other is self or (isinstance(other, float) and other == math.inf)

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return self == other

    def __gt__(self, other):
        return not self == other

    def __ge__(self, other):
        return True

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()

Endpoint = Union[Fraction, _Infinity]


def as_exact(x) -> Fraction:
    """Convert a finite real to a Fraction.

    Floats go through ``repr`` so that ``0.1`` means one tenth; a float within
    ``FLOAT_SLACK`` of an integer snaps to it, since every case boundary of the
    range formulas sits on an integer.
    """
    if isinstance(x, bool):
        raise InvalidArgument("booleans are not exponents")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, numbers.Rational):
        return Fraction(int(x.numerator), int(x.denominator))
    if isinstance(x, Decimal):
        if not x.is_finite():
            raise InvalidArgument(f"non-finite value {x!r}")
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidArgument(f"cannot parse {x!r} as a rational") from exc
    if isinstance(x, numbers.Real):
        xf = float(x)
        if not math.isfinite(xf):
            raise InvalidArgument(f"non-finite value {x!r}")
        nearest = round(xf)
        if abs(xf - nearest) <= FLOAT_SLACK:
            return Fraction(nearest)
        return Fraction(repr(xf))
    raise InvalidArgument(f"expected a real number, got {type(x).__name__}")


def _ratio(num: Fraction, den: Fraction) -> Endpoint:
    # den == 0 only occurs with num > 0 in the formulas below (k + 1 = 0 or k + 2 = 0)
    if den == 0:
        return INF
    return num / den


@dataclass(frozen=True)
class ExponentDecomposition:
    s_prime: Fraction
    k: int
    s: Fraction

    def __post_init__(self):
        if not (0 < self.s <= 2):
            raise InvalidArgument(f"s={self.s} outside (0, 2]")
        if self.s + 2 * self.k != self.s_prime:
            raise InvalidArgument("s + 2k must equal s'")


def decompose_exponent(s_prime) -> ExponentDecomposition:
    """Split ``s'`` into ``s + 2k`` with ``s`` in (0, 2].

    >>> decompose_exponent(0)
    ExponentDecomposition(s_prime=Fraction(0, 1), k=-1, s=Fraction(2, 1))
    """
    sp = as_exact(s_prime)
    k = math.ceil(sp / 2) - 1
    return ExponentDecomposition(sp, k, sp - 2 * k)


@dataclass(frozen=True)
class PRange:
    """Open interval ``(lo, hi)`` of exponents ``p``; ``hi`` may be :data:`INF`.

    An empty range keeps its nominal endpoints for reporting but contains no
    ``p``.
    """

    lo: Fraction
    hi: Endpoint
    empty: bool = False

    def __post_init__(self):
        if not isinstance(self.lo, Fraction):
            object.__setattr__(self, "lo", as_exact(self.lo))
        if self.hi is not INF and not isinstance(self.hi, Fraction):
            object.__setattr__(self, "hi", as_exact(self.hi))
        if not self.empty:
            if self.lo < 1:
                raise InvalidArgument(f"range lower endpoint {self.lo} < 1")
            if not self.lo < self.hi:
                raise InvalidArgument(f"non-empty range needs lo < hi, got ({self.lo}, {self.hi})")

    @classmethod
    def full(cls) -> "PRange":
        return cls(Fraction(1), INF)

    @classmethod
    def from_endpoints(cls, lo, hi) -> "PRange":
        """Build a range, flagging it empty instead of raising when ``lo >= hi``."""
        lo = lo if isinstance(lo, Fraction) else as_exact(lo)
        if hi is not INF and not isinstance(hi, Fraction):
            hi = as_exact(hi)
        return cls(lo, hi, empty=not lo < hi)

    def contains(self, p) -> bool:
        if self.empty:
            return False
        p = as_exact(p) if not isinstance(p, Fraction) else p
        return self.lo < p < self.hi

    __contains__ = contains

    def intersect(self, other: "PRange") -> "PRange":
        lo = max(self.lo, other.lo)
        hi = min(self.hi, other.hi, key=_endpoint_key)
        return PRange(lo, hi, empty=self.empty or other.empty or not lo < hi)

    def as_floats(self) -> tuple[float, float]:
        return float(self.lo), float(self.hi)

    @property
    def is_full(self) -> bool:
        return not self.empty and self.lo == 1 and self.hi is INF

    def to_dict(self) -> dict:
        return {
            "lo": float(self.lo),
            "hi": "inf" if self.hi is INF else float(self.hi),
            "open": True,
            "empty": self.empty,
        }

    def __str__(self):
        if self.empty:
            return "(empty)"
        return f"({self.lo}, {'inf' if self.hi is INF else self.hi})"


def _endpoint_key(x):
    return math.inf if x is INF else x


def intersect_ranges(a: PRange, b: PRange) -> PRange:
    return a.intersect(b)


def range_disk_star(s_prime) -> PRange:
    """Sharp range for the projection on the punctured disk with weight ``|z|^{s'}``."""
    d = decompose_exponent(s_prime)
    sp, s, k = d.s_prime, d.s, d.k
    if sp > 0:
        return PRange(_ratio(s + 2 * k + 2, s + k + 1), _ratio(s + 2 * k + 2, Fraction(k + 1)))
    if sp >= -3:
        return PRange.full()
    if sp > -4:
        return PRange(2 - s, (2 - s) / (1 - s))
    if sp == -4:
        return PRange.full()
    return PRange(_ratio(s + 2 * k + 2, Fraction(k + 1)), _ratio(s + 2 * k + 2, s + k + 1))


def range_hartogs(s_prime) -> PRange:
    """Sharp range for the projection on the Hartogs triangle with weight ``|z_2|^{s'}``.

    Coded from the Hartogs-triangle case list itself rather than by shifting
    :func:`range_disk_star`, so the two can be checked against each other.
    """
    d = decompose_exponent(s_prime)
    sp, s, k = d.s_prime, d.s, d.k
    if sp > -2:
        return PRange(_ratio(s + 2 * k + 4, s + k + 2), _ratio(s + 2 * k + 4, Fraction(k + 2)))
    if sp >= -5:
        return PRange.full()
    if sp > -6:
        return PRange(2 - s, (2 - s) / (1 - s))
    if sp == -6:
        return PRange.full()
    return PRange(_ratio(s + 2 * k + 4, Fraction(k + 2)), _ratio(s + 2 * k + 4, s + k + 2))


def shrinking_weight_exponent(p0) -> Fraction:
    """Weight exponent ``-(p0 + 4)`` whose Hartogs range is exactly ``(p0, p0')``."""
    p0 = as_exact(p0)
    if not (1 <= p0 < 2):
        raise InvalidArgument("p0 must lie in [1, 2)")
    return -(p0 + 4)


@dataclass(frozen=True)
class RangeVerdict:
    range: PRange
    sharp_predicate: Callable[[object], bool] = field(compare=False)
    notes: str = ""
    unbounded_at_or_below: Endpoint | None = None

    def is_sharp_at(self, p) -> bool:
        return bool(self.sharp_predicate(p))


def range_two_weight(s_prime, t) -> RangeVerdict:
    """Range for boundedness from ``L^p(|z_2|^{s'})`` to ``L^p(|z_2|^t)`` on the Hartogs triangle.

    Only ``k >= -1`` is covered.  ``sharp_predicate(p)`` tells whether the
    interval is also necessary at that ``p`` (``t - s' <= (2 - s) p``).
    """
    d = decompose_exponent(s_prime)
    tt = as_exact(t)
    s, k, sp = d.s, d.k, d.s_prime
    if k < -1:
        raise UnsupportedCase(f"two-weight range needs k >= -1 (s'={sp} has k={k})")
    lo = (s + 2 * k + 4) / (s + k + 2)
    hi = (tt + 4) / (k + 2)
    rng = PRange.from_endpoints(max(lo, Fraction(1)), max(hi, Fraction(1)))

    def sharp(p) -> bool:
        return tt - sp <= (2 - s) * as_exact(p)

    notes = f"unbounded for every t when p <= {lo}"
    if rng.empty:
        notes += "; interval empty (t at or below the boundary exponent)"
    return RangeVerdict(rng, sharp, notes, unbounded_at_or_below=lo)


@dataclass(frozen=True)
class GeneralizedHartogsSpec:
    """Generalized Hartogs triangle: ``l`` ball factors of dimensions ``ball_dims``
    stacked under ``n`` disk variables with weight exponents ``weight_exponents``."""

    ball_dims: tuple[int, ...]
    weight_exponents: tuple

    def __post_init__(self):
        object.__setattr__(self, "ball_dims", tuple(int(m) for m in self.ball_dims))
        object.__setattr__(self, "weight_exponents", tuple(self.weight_exponents))
        if not self.weight_exponents:
            raise InvalidArgument("need at least one weight exponent")
        if any(m < 1 for m in self.ball_dims):
            raise InvalidArgument("ball dimensions must be positive")

    def reduced_exponents(self) -> list[Fraction]:
        """Punctured-disk exponents whose ranges intersect to the full range."""
        shift = 2 * sum(self.ball_dims)
        out, acc = [], Fraction(0)
        for j, sj in enumerate(self.weight_exponents):
            acc += as_exact(sj)
            out.append(shift + acc + 2 * j)
        return out


def range_generalized(spec: GeneralizedHartogsSpec) -> PRange:
    out = PRange.full()
    for e in spec.reduced_exponents():
        out = out.intersect(range_disk_star(e))
    return out


def alpha_example_range(alpha) -> PRange:
    """Range of the disk projection with weight ``|(z - 1)^alpha|^2``."""
    a = as_exact(alpha)
    if a <= 0:
        raise InvalidArgument("alpha must be positive")
    return PRange((2 * a + 2) / (a + 2), (2 * a + 2) / a)


def range_hartogs_g_weighted(s_prime, g_range: PRange) -> RangeVerdict:
    """Combine a disk range for ``|g|^2`` with the Hartogs range for ``|z_2|^{s'}``.

    The intersection is always sufficient; it is also necessary when the
    Hartogs range sits properly inside ``g_range``.
    """
    h = range_hartogs(s_prime)
    both = h.intersect(g_range)
    proper = (
        not h.empty
        and g_range.lo <= h.lo
        and _endpoint_key(h.hi) <= _endpoint_key(g_range.hi)
        and (h.lo, h.hi) != (g_range.lo, g_range.hi)
    )
    return RangeVerdict(
        both,
        lambda p, _proper=proper: _proper,
        "iff: Hartogs range properly inside the g-range" if proper else "sufficient only",
    )


def sharp_target_exponent(p, k: int, epsilon, s_prime=None) -> float:
    """Target exponent ``t = p(k + 2) - 4 + epsilon``.

    When ``s_prime`` is given and ``p`` is its right endpoint
    ``(s + 2k + 4)/(k + 2)``, the result must equal ``s' + epsilon``; this is
    checked.
    """
    if not p > 1:
        raise InvalidArgument("p must exceed 1")
    if not epsilon > 0:
        raise InvalidArgument("epsilon must be positive")
    exact = all(isinstance(v, (numbers.Rational, str)) for v in (p, epsilon))
    if exact:
        t = as_exact(p) * (k + 2) - 4 + as_exact(epsilon)
    else:
        t = float(p) * (k + 2) - 4 + float(epsilon)
    if s_prime is not None:
        d = decompose_exponent(s_prime)
        if d.k != k:
            raise InvalidArgument(f"k={k} does not match s'={d.s_prime} (k={d.k})")
        right = (d.s + 2 * d.k + 4) / (d.k + 2)
        if math.isclose(float(p), float(right), rel_tol=FLOAT_SLACK):
            expected = float(d.s_prime) + float(epsilon)
            if not math.isclose(float(t), expected, rel_tol=1e-12, abs_tol=1e-12):
                raise AssertionError(f"t(eps)={t} differs from s'+eps={expected}")
    return t


# ---------------------------------------------------------------------------
# Vectorized grid evaluation (exact integer arithmetic)
# ---------------------------------------------------------------------------


@dataclass
class GridRanges:
    """Endpoints as integer fractions ``num/den`` (``den > 0``); ``hi_inf`` marks infinity."""

    lo_num: np.ndarray
    lo_den: np.ndarray
    hi_num: np.ndarray
    hi_den: np.ndarray
    hi_inf: np.ndarray

    def same_as(self, other: "GridRanges") -> np.ndarray:
        lo_eq = self.lo_num * other.lo_den == other.lo_num * self.lo_den
        hi_eq = np.where(
            self.hi_inf | other.hi_inf,
            self.hi_inf & other.hi_inf,
            self.hi_num * other.hi_den == other.hi_num * self.hi_den,
        )
        return lo_eq & hi_eq


def _norm(num, den):
    sign = np.where(den < 0, -1, 1)
    return num * sign, den * sign


def range_grid(numerators, denominator: int, domain: str = "disk") -> GridRanges:
    """Evaluate the range formulas at ``s' = numerators / denominator`` in int64.

    ``domain`` is ``"disk"`` (punctured disk) or ``"hartogs"``.  Intended for
    audits over millions of grid points where Fractions are too slow; the
    numerators and denominator must stay below 5e8 in magnitude to avoid overflow.
    """
    N = np.asarray(numerators, dtype=np.int64)
    D = np.int64(denominator)
    if denominator <= 0:
        raise InvalidArgument("denominator must be positive")
    if denominator > 5 * 10**8 or (N.size and np.abs(N).max() > 5 * 10**8):
        raise InvalidArgument("grid too fine for int64 cross-multiplication")
    k = -((-N) // (2 * D)) - 1  # ceil(N / 2D) - 1
    S = N - 2 * k * D  # s = S / D with 0 < S <= 2D
    if domain == "disk":
        shift, bnd_full, bnd_mid, bnd_pt = 2, -3, -4, -4
    elif domain == "hartogs":
        shift, bnd_full, bnd_mid, bnd_pt = 4, -5, -6, -6
    else:
        raise InvalidArgument(f"unknown domain {domain!r}")
    top = S + (2 * k + shift) * D  # numerator of s + 2k + shift
    a = S + (k + shift // 2) * D  # numerator of s + k + shift/2
    b = (k + shift // 2) * D  # numerator of k + shift/2

    lo_n = np.ones_like(N)
    lo_d = np.ones_like(N)
    hi_n = np.ones_like(N)
    hi_d = np.ones_like(N)
    hi_inf = np.zeros(N.shape, dtype=bool)

    c1 = N > (2 - shift) * D  # s' > 0 (disk) or s' > -2 (hartogs)
    lo_n = np.where(c1, top, lo_n)
    lo_d = np.where(c1, a, lo_d)
    inf1 = c1 & (b == 0)
    hi_inf |= inf1
    hi_n = np.where(c1 & ~inf1, top, hi_n)
    hi_d = np.where(c1 & ~inf1, np.where(b == 0, 1, b), hi_d)

    full = (~c1 & (N >= bnd_full * D)) | (N == bnd_pt * D)
    hi_inf |= full

    mid = (N < bnd_full * D) & (N > bnd_mid * D)
    # (2 - s, (2 - s)/(1 - s))
    lo_n = np.where(mid, 2 * D - S, lo_n)
    lo_d = np.where(mid, D, lo_d)
    hi_n = np.where(mid, 2 * D - S, hi_n)
    hi_d = np.where(mid, D - S, hi_d)

    low = N < bnd_mid * D
    lo_n = np.where(low, top, lo_n)
    lo_d = np.where(low, np.where(b == 0, 1, b), lo_d)
    hi_n = np.where(low, top, hi_n)
    hi_d = np.where(low, np.where(a == 0, 1, a), hi_d)

    lo_n, lo_d = _norm(lo_n, lo_d)
    hi_n, hi_d = _norm(hi_n, hi_d)
    return GridRanges(lo_n, lo_d, hi_n, hi_d, hi_inf)


def intersect_all(ranges: Sequence[PRange]) -> PRange:
    out = PRange.full()
    for r in ranges:
        out = out.intersect(r)
    return out
