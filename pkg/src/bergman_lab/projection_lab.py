"""Mode-by-mode weighted Bergman projection on the punctured disk and endpoint experiments.

Functions of the form ``f(r e^{i theta}) = sum_j f_j(r) e^{i j theta}`` project
mode by mode: mode ``m`` survives exactly when ``z**m`` is square integrable
against ``|z|**s'``, and its coefficient is a single radial integral.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DivergentIntegral, InvalidArgument, QuadratureError
from .quadrature import (
    QuadratureSpec,
    RadialPiece,
    RadialProfile,
    _I_general,
    integrate_radial,
    log_integrate_radial,
    weighted_moment,
)
from .ranges import as_exact, decompose_exponent

# ---------------------------------------------------------------------------
# The sequence a_j = j^-j and the sums A_{n,p}

_DIRECT_LIMIT = 30


def log_sequence_a(j: int) -> float:
    if int(j) != j or j < 1:
        raise InvalidArgument(f"index must be an integer >= 1, got {j!r}")
    return -j * math.log(j)


def sequence_a(j: int) -> float:
    """``(1/j)**j``; evaluated through logarithms past ``j = 30`` (underflows to 0 near 144)."""
    if int(j) != j or j < 1:
        raise InvalidArgument(f"index must be an integer >= 1, got {j!r}")
    j = int(j)
    if j <= _DIRECT_LIMIT:
        return (1.0 / j) ** j
    return math.exp(log_sequence_a(j))


def _A_terms(n: int, p: float) -> np.ndarray:
    # j (a_j^{p/j} - a_{j+1}^{p/j}) = j^{1-p} (1 - exp(-p d_j)),
    # d_j = log(1 + 1/j) + log(j+1)/j
    j = np.arange(1, n + 1, dtype=float)
    d = np.log1p(1.0 / j) + np.log(j + 1.0) / j
    return j ** (1.0 - p) * -np.expm1(-p * d)


def partial_sum_A(n: int, p: float) -> float:
    """``A_{n,p} = sum_{j<=n} j (a_j^{p/j} - a_{j+1}^{p/j})`` with compensated summation."""
    if int(n) != n or n < 1:
        raise InvalidArgument("n must be an integer >= 1")
    if not p >= 1:
        raise InvalidArgument("p must be >= 1")
    return math.fsum(_A_terms(int(n), float(p)))


def partial_sums_A(ns: Sequence[int], p: float) -> list[float]:
    """``A_{n,p}`` for several ``n`` sharing one term table."""
    ns = [int(n) for n in ns]
    if not ns or min(ns) < 1:
        raise InvalidArgument("n values must be >= 1")
    if not p >= 1:
        raise InvalidArgument("p must be >= 1")
    terms = _A_terms(max(ns), float(p))
    return [math.fsum(terms[:n]) for n in ns]


def doubling_differences(ns: Sequence[int], p: float) -> list[float]:
    """``|A_{2n,p} - A_{n,p}|`` along ``ns``, summing only the new terms."""
    ns = [int(n) for n in ns]
    terms = _A_terms(2 * max(ns), float(p))
    return [abs(math.fsum(terms[n : 2 * n])) for n in ns]


# ---------------------------------------------------------------------------
# Mode functions and projection


@dataclass(frozen=True)
class ModeFunction:
    """``sum_j f_j(r) e^{i j theta}`` over finitely many modes ``j``."""

    modes: Mapping[int, RadialProfile] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for j, prof in dict(self.modes).items():
            if int(j) != j:
                raise InvalidArgument("mode indices must be integers")
            if not isinstance(prof, RadialProfile):
                raise InvalidArgument("mode profiles must be RadialProfile instances")
            clean[int(j)] = prof
        object.__setattr__(self, "modes", clean)

    @classmethod
    def monomial(cls, m: int, coeff=1.0) -> "ModeFunction":
        """``coeff * z**m``."""
        return cls({m: RadialProfile.monomial(m, coeff)})

    @classmethod
    def conj_monomial(cls, j: int, coeff=1.0) -> "ModeFunction":
        """``coeff * conj(z)**j``."""
        return cls({-j: RadialProfile.monomial(j, coeff)})

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        r, th = np.abs(z), np.angle(z)
        out = np.zeros(z.shape, dtype=complex)
        for j, prof in self.modes.items():
            out += prof(r) * np.exp(1j * j * th)
        return out


@dataclass(frozen=True)
class HolomorphicModeExpansion:
    """``sum_m c_m z**m`` in the weighted Bergman space of ``|z|**s'``."""

    coefficients: Mapping[int, complex]
    s_prime: float = 0.0

    def __post_init__(self):
        cut = -(1 + float(self.s_prime) / 2)
        for m in self.coefficients:
            if not m > cut:
                raise InvalidArgument(f"z^{m} is not in the weighted Bergman space")

    def coefficient(self, m: int) -> complex:
        return self.coefficients.get(m, 0.0)

    def as_mode_function(self) -> ModeFunction:
        return ModeFunction({m: RadialProfile.monomial(m, c) for m, c in self.coefficients.items()})

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return sum((c * z**m for m, c in self.coefficients.items()), np.zeros(z.shape, dtype=complex))


def in_basis(m: int, s_prime) -> bool:
    """Whether ``z**m`` has finite norm against ``|z|**s'`` (``2m + 2 + s' > 0``)."""
    return 2 * m + 2 + as_exact(s_prime) > 0


def project_modes(s_prime, f: ModeFunction, spec: QuadratureSpec | None = None) -> HolomorphicModeExpansion:
    """Weighted Bergman projection of ``f`` onto ``A^2(D*, |z|^s')``.

    Mode ``m`` maps to ``(2m+2+s') * int_0^1 f_m(r) r^(m+s'+1) dr`` times
    ``z**m`` when ``z**m`` is in the space, and to 0 otherwise.
    """
    sp = float(as_exact(s_prime))
    out = {}
    for m, prof in sorted(f.modes.items()):
        if not in_basis(m, s_prime):
            continue
        inner = integrate_radial(prof.times_power(m), sp, spec)
        out[m] = inner / weighted_moment(m, sp)
    return HolomorphicModeExpansion(out, sp)


# ---------------------------------------------------------------------------
# Endpoint blow-up


def blowup_profile(s_prime, n: int) -> tuple[int, RadialProfile]:
    """Mode index and radial part of the test function ``f_n``.

    ``f_n = g(r) e^{-i(k+1) theta}`` with ``g = r^{1/j - (s+k+1)}`` on
    ``(a_{j+1}, a_j]``, ``j = 1..n``, and 0 on ``(0, a_{n+1}]``.
    """
    if int(n) != n or n < 1:
        raise InvalidArgument("n must be an integer >= 1")
    dec = decompose_exponent(s_prime)
    s, k = float(dec.s), dec.k
    pieces = []
    for j in range(1, int(n) + 1):
        lo = log_sequence_a(j + 1)
        hi = log_sequence_a(j) if j > 1 else 0.0
        pieces.append(RadialPiece(lo, hi, 1.0 / j - (s + k + 1), 1.0))
    return -(k + 1), RadialProfile(tuple(pieces))


def blowup_function(s_prime, n: int) -> ModeFunction:
    m, prof = blowup_profile(s_prime, n)
    return ModeFunction({m: prof})


def blowup_endpoint(s_prime) -> Fraction | None:
    """``(s+2k+2)/(s+k+1)``, the finite endpoint probed by ``f_n``; ``None`` if not above 1."""
    dec = decompose_exponent(s_prime)
    s, k = dec.s, dec.k
    den = s + k + 1
    if den == 0:
        return None
    p = (s + 2 * k + 2) / den
    return p if p > 1 else None


@dataclass
class BlowupSeries:
    s_prime: float
    p: float
    endpoint_p: float | None
    n_values: list
    ratios: list
    norms_f: list
    norms_Bf: list
    log_ratios: list
    log_norms_f: list
    log_norms_Bf: list
    image_in_Lp: bool = True
    nu: float = 0.0
    endpoint_residuals: list = field(default_factory=list)

    def growth(self) -> float:
        """``ratio(last) / ratio(first)`` computed from logs (NaN when the image is not in L^p)."""
        first, last = self.log_ratios[0], self.log_ratios[-1]
        if not (math.isfinite(first) and math.isfinite(last)):
            return math.nan
        return math.exp(last - first)

    def strictly_increasing(self) -> bool:
        return all(b > a for a, b in zip(self.log_ratios, self.log_ratios[1:]))

    def to_dict(self) -> dict:
        return {
            "s_prime": self.s_prime,
            "p": self.p,
            "endpoint_p": self.endpoint_p,
            "image_in_Lp": self.image_in_Lp,
            "nu": self.nu,
            "rows": [
                {"n": n, "norm_f": a, "norm_Bf": b, "ratio": r, "log_ratio": lr}
                for n, a, b, r, lr in zip(self.n_values, self.norms_f, self.norms_Bf, self.ratios, self.log_ratios)
            ],
        }


def _safe_exp(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def blowup_experiment(
    s_prime, p: float, n_values: Iterable[int], spec: QuadratureSpec | None = None, *, check_endpoint: bool = True
) -> BlowupSeries:
    """``||B f_n||_p / ||f_n||_p`` along ``n_values``.

    Norms are carried as logarithms; ``f_n`` has pieces as short as ``j**-j``
    and its ``L^p`` norm overflows doubles for ``p`` above the endpoint.  At the
    endpoint the identity ``||f_n||_p^p = (2/p) A_{n,p}`` is checked to 1e-8.
    """
    p = float(p)
    if not p > 1:
        raise InvalidArgument("p must exceed 1")
    ns = [int(n) for n in n_values]
    if not ns or any(b <= a for a, b in zip(ns, ns[1:])) or ns[0] < 1:
        raise InvalidArgument("n_values must be strictly increasing positive integers")
    dec = decompose_exponent(s_prime)
    s, k = float(dec.s), dec.k
    sp = float(dec.s_prime)
    nu = s + 2 * k - (k + 1) * p + 2
    endpoint = blowup_endpoint(s_prime)
    at_endpoint = endpoint is not None and abs(p - float(endpoint)) <= 1e-12 * p
    log_f, log_Bf, log_r, residuals = [], [], [], []
    for n in ns:
        m, prof = blowup_profile(s_prime, n)
        # ||f_n||_p^p = 2 int |g|^p r^{s'+1} dr
        lf = log_integrate_radial(prof.abs_power(p), sp) / p
        expansion = project_modes(s_prime, ModeFunction({m: prof}), spec)
        coeff = expansion.coefficient(m)
        if at_endpoint and check_endpoint:
            lhs = p * lf
            rhs = math.log(2.0 / p * partial_sum_A(n, p))
            residuals.append(abs(math.expm1(lhs - rhs)))
            if residuals[-1] > 1e-8:
                raise QuadratureError(f"endpoint norm identity off by {residuals[-1]:.3g} at n={n}")
        if nu > 0:
            lb = math.log(abs(coeff)) + math.log(2.0 / nu) / p
        else:
            lb = math.inf
        log_f.append(lf)
        log_Bf.append(lb)
        log_r.append(lb - lf)
    return BlowupSeries(
        s_prime=sp,
        p=p,
        endpoint_p=float(endpoint) if endpoint is not None else None,
        n_values=ns,
        ratios=[_safe_exp(x) for x in log_r],
        norms_f=[_safe_exp(x) for x in log_f],
        norms_Bf=[_safe_exp(x) for x in log_Bf],
        log_ratios=log_r,
        log_norms_f=log_f,
        log_norms_Bf=log_Bf,
        image_in_Lp=nu > 0,
        nu=nu,
        endpoint_residuals=residuals,
    )


def blowup_ratio_oracle(s_prime, p: float, n: int) -> float:
    """Log of the ratio assembled only from ``A_{n,1}`` and ``A_{n,p}`` (endpoint ``p`` only)."""
    dec = decompose_exponent(s_prime)
    s, k = float(dec.s), dec.k
    nu = s + 2 * k - (k + 1) * p + 2
    a1 = partial_sum_A(n, 1.0)
    ap = partial_sum_A(n, p)
    return math.log(s * a1) + math.log(2 / nu) / p - math.log(2 / p * ap) / p


# ---------------------------------------------------------------------------
# Schur test


@dataclass(frozen=True)
class SchurParameters:
    """Exponents of the test function ``h = (1-|z|^2)^delta |z|^sigma``."""

    delta: float
    sigma: float
    p: float

    def __post_init__(self):
        if not self.p > 1:
            raise InvalidArgument("p must exceed 1")

    @property
    def p_conj(self) -> float:
        return self.p / (self.p - 1)


def schur_box(s_prime, p):
    """Exact feasible intervals ``(delta_lo, delta_hi)``, ``(sigma_lo, sigma_hi]`` or ``None``.

    Both sides of the test need ``-1 < delta q < 0``, ``sigma q <= -(k+1)`` and
    ``sigma q > -(s+k+1)`` for ``q = p`` and ``q = p'``.
    """
    P = as_exact(p)
    if not P > 1:
        raise InvalidArgument("p must exceed 1")
    Q = P / (P - 1)
    dec = decompose_exponent(s_prime)
    A = dec.s + dec.k + 1
    B = Fraction(dec.k + 1)
    sig_lo = max(-A / P, -A / Q)
    sig_hi = min(-B / P, -B / Q)
    if not sig_lo < sig_hi:
        return None
    d_lo = -min(1 / P, 1 / Q)
    return (d_lo, Fraction(0)), (sig_lo, sig_hi)


def schur_feasible(s_prime, p) -> SchurParameters | None:
    """Midpoint of the feasible ``(delta, sigma)`` box, or ``None`` when the system has no solution."""
    box = schur_box(s_prime, p)
    if box is None:
        return None
    (d_lo, d_hi), (s_lo, s_hi) = box
    return SchurParameters(float((d_lo + d_hi) / 2), float((s_lo + s_hi) / 2), float(as_exact(p)))


def schur_ratio(s_prime, params: SchurParameters, z, q: float, spec: QuadratureSpec | None = None) -> float:
    """``T(h^q)(z) / h(z)^q`` for the kernel ``|z conj(w)|^-(k+1) / |1 - z conj(w)|^2``."""
    dec = decompose_exponent(s_prime)
    k = dec.k
    sp = float(dec.s_prime)
    alpha = params.delta * q
    beta = params.sigma * q + sp - k - 1
    if beta <= -2 or alpha <= -1:
        raise DivergentIntegral(
            f"T(h^{q:g}) diverges: weight exponents alpha={alpha:g}, beta={beta:g}"
        )
    r = abs(complex(z))
    val = r ** (-(k + 1)) * _I_general(alpha, beta, complex(z), spec)
    return val / ((1 - r * r) ** alpha * r ** (params.sigma * q))


def schur_numeric_check(
    s_prime, params: SchurParameters, sample_points: Iterable, spec: QuadratureSpec | None = None
) -> float:
    """Largest of the two Schur ratios over ``sample_points``."""
    worst = 0.0
    for z in sample_points:
        z = complex(getattr(z, "value", z))
        for q in (params.p_conj, params.p):
            worst = max(worst, schur_ratio(s_prime, params, z, q, spec))
    return worst
