"""Closed-form Bergman kernels on the disk, the punctured disk and the Hartogs triangle.

All kernels are taken with respect to the normalized area measure, so the
unweighted disk kernel is ``1/(1 - z conj(zeta))**2``.  Functions accept scalars
or numpy arrays of complex numbers (broadcast together).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError, InvalidArgument, NearSingular
from .quadrature import weighted_moment
from .ranges import as_exact, decompose_exponent

SINGULAR_GUARD = 1e-14


@dataclass(frozen=True)
class DiskPoint:
    value: complex
    punctured: bool = False

    def __post_init__(self):
        v = complex(self.value)
        object.__setattr__(self, "value", v)
        if not abs(v) < 1:
            raise DomainError(f"{v} is not in the open unit disk")
        if self.punctured and v == 0:
            raise DomainError("0 is excluded from the punctured disk")

    def __complex__(self):
        return self.value


@dataclass(frozen=True)
class HartogsPoint:
    z1: complex
    z2: complex

    def __post_init__(self):
        z1, z2 = complex(self.z1), complex(self.z2)
        object.__setattr__(self, "z1", z1)
        object.__setattr__(self, "z2", z2)
        if not abs(z1) < abs(z2) < 1:
            raise DomainError(f"({z1}, {z2}) violates |z1| < |z2| < 1")


@dataclass(frozen=True)
class HalfPlanePoint:
    value: complex

    def __post_init__(self):
        v = complex(self.value)
        object.__setattr__(self, "value", v)
        if not v.imag > 0:
            raise DomainError(f"{v} is not in the upper half plane")

    def __complex__(self):
        return self.value


def _val(z):
    if isinstance(z, (DiskPoint, HalfPlanePoint)):
        return z.value
    return np.asarray(z, dtype=complex) if np.ndim(z) else complex(z)


def _check_disk(z, punctured=False):
    a = np.abs(z)
    if not np.all(a < 1):
        raise DomainError("point outside the open unit disk")
    if punctured and np.any(a == 0):
        raise DomainError("0 is excluded from the punctured disk")


@dataclass(frozen=True)
class NonVanishingHolomorphic:
    """A zero-free holomorphic function on the disk plus a symbolic tag.

    ``tag`` is ``"identity"`` (g = 1), ``"power"`` (g = (z-1)**alpha) or ``"user"``.
    For the power family the branch of ``log(z - 1)`` has argument in
    ``(0, 2*pi)``, i.e. ``(z-1)**alpha = e^{i pi alpha} (1-z)**alpha`` with the
    principal ``(1-z)**alpha``; its cut ``[1, oo)`` misses the open disk.
    """

    func: Callable = field(compare=False)
    tag: str = "user"
    alpha: float | None = None

    @classmethod
    def identity(cls) -> "NonVanishingHolomorphic":
        return cls(lambda z: np.ones_like(np.asarray(z, dtype=complex)), "identity")

    @classmethod
    def power_of_z_minus_1(cls, alpha: float) -> "NonVanishingHolomorphic":
        alpha = float(alpha)
        phase = cmath.exp(1j * math.pi * alpha)

        def g(z):
            return phase * (1.0 - np.asarray(z, dtype=complex)) ** alpha

        return cls(g, "power", alpha)

    @classmethod
    def user(cls, func: Callable, n_radii: int = 24, n_angles: int = 64) -> "NonVanishingHolomorphic":
        """Wrap ``func`` after checking it is finite and nonzero on a sample grid."""
        r = np.linspace(0.0, 0.999, n_radii)
        t = 2 * np.pi * np.arange(n_angles) / n_angles
        z = (r[:, None] * np.exp(1j * t[None, :])).ravel()
        try:
            v = np.asarray(func(z), dtype=complex)
        except Exception as exc:  # noqa: BLE001 - surface any evaluation failure uniformly
            raise InvalidArgument(f"g failed to evaluate on the disk: {exc}") from exc
        if v.shape != z.shape or not np.all(np.isfinite(v)):
            raise InvalidArgument("g must return finite values of matching shape")
        if np.any(np.abs(v) < 1e-300):
            raise InvalidArgument("g vanishes at a sampled point of the disk")
        return cls(func, "user")

    def __call__(self, z):
        return self.func(z)


def disk_kernel(z, zeta):
    """``1/(1 - z conj(zeta))**2``."""
    z, zeta = _val(z), _val(zeta)
    _check_disk(z)
    _check_disk(zeta)
    d = 1.0 - z * np.conj(zeta)
    if np.any(np.abs(d) < SINGULAR_GUARD):
        raise NearSingular("|1 - z conj(zeta)| below guard")
    return 1.0 / (d * d)


def _t_index(s_prime) -> int:
    """Smallest integer strictly above ``-s'/2``."""
    half = -as_exact(s_prime) / 2
    return math.floor(half) + 1


def punctured_kernel(s_prime, z, zeta, method: str = "closed"):
    """Kernel of the weight ``|z|**s'`` on the punctured disk.

    ``method="closed"`` uses the two-term rational expression in ``w = z conj(zeta)``;
    ``method="homotopy"`` interpolates between the ``w**-(k+1)`` and ``w**-k``
    shifts of the disk kernel with weights ``s/2`` and ``1 - s/2``.
    """
    z, zeta = _val(z), _val(zeta)
    _check_disk(z, punctured=True)
    _check_disk(zeta, punctured=True)
    w = z * np.conj(zeta)
    sp = float(as_exact(s_prime))
    if method == "closed":
        t = _t_index(s_prime)
        d = 1.0 - w
        if np.any(np.abs(d) < SINGULAR_GUARD):
            raise NearSingular("|1 - z conj(zeta)| below guard")
        return ((t + sp / 2) * w ** (t - 1) - (t - 1 + sp / 2) * w**t) / (d * d)
    if method == "homotopy":
        dec = decompose_exponent(s_prime)
        k, s = dec.k, float(dec.s)
        b0 = disk_kernel(z, zeta)
        return (s / 2) * w ** (-(k + 1)) * b0 + (1 - s / 2) * w ** (-k) * b0
    raise InvalidArgument(f"unknown method {method!r}")


def g_weighted_kernel(g: NonVanishingHolomorphic, z, zeta):
    """Kernel of the weight ``|g|**2`` on the disk: ``B0 / (g(z) conj(g(zeta)))``."""
    z, zeta = _val(z), _val(zeta)
    return disk_kernel(z, zeta) / (g(z) * np.conj(g(zeta)))


def _hpt(p) -> HartogsPoint:
    if isinstance(p, HartogsPoint):
        return p
    z1, z2 = p
    return HartogsPoint(z1, z2)


def hartogs_kernel_transform(s_prime, z, zeta):
    """Kernel of ``|z2|**s'`` on the Hartogs triangle via ``(z1, z2) -> (z1/z2, z2)``."""
    z, zeta = _hpt(z), _hpt(zeta)
    u, v = z.z1 / z.z2, zeta.z1 / zeta.z2
    return (
        (1 / z.z2)
        * disk_kernel(u, v)
        * punctured_kernel(s_prime, z.z2, zeta.z2)
        * (1 / np.conj(zeta.z2))
    )


@dataclass(frozen=True)
class SeriesResult:
    value: complex
    tail_bound: float
    n_terms: int
    m_min: int


def _weighted_power_tail(x: float, m0: int, c: float) -> float:
    """``sum_{m >= m0} (m + c) x**m`` for ``0 <= x < 1`` and ``m0 + c > 0``."""
    if x == 0.0:
        return (m0 + c) if m0 == 0 else 0.0
    return x**m0 * ((m0 + c) / (1 - x) + x / (1 - x) ** 2)


def hartogs_kernel_series(s_prime, z, zeta, M: int) -> SeriesResult:
    """Truncated orthonormal expansion over the monomials ``z1**a z2**b``.

    Keeps ``0 <= a <= M`` and ``m = a + b + 1`` between the first admissible
    value and ``M``; each coefficient is the reciprocal squared norm, assembled
    from radial moments.  ``tail_bound`` majorizes the omitted terms.
    """
    if int(M) != M or M <= 0:
        raise InvalidArgument("series cutoff M must be a positive integer")
    M = int(M)
    z, zeta = _hpt(z), _hpt(zeta)
    sp = float(as_exact(s_prime))
    # smallest m with 2m + 2 + s' > 0
    m_min = math.floor(-1 - as_exact(s_prime) / 2) + 1
    x = z.z1 * np.conj(zeta.z1) / (z.z2 * np.conj(zeta.z2))
    y = z.z2 * np.conj(zeta.z2)
    a = np.arange(M + 1)
    ms = np.arange(m_min, M + 1)
    if len(ms) == 0:
        terms = np.zeros((len(a), 0), dtype=complex)
    else:
        # ||z1^a z2^b||^2 = (moment of |z2|^(2(a+b+1)+s') on the disk) / (a+1)
        norms = np.array([[weighted_moment(int(m), sp) / (ai + 1) for m in ms] for ai in a])
        terms = (x ** a[:, None]) * (y ** (ms[None, :] - 1)) / norms
    flat = terms.ravel()
    value = complex(math.fsum(flat.real), math.fsum(flat.imag))
    X, Y = abs(x), abs(y)
    c = 1 + sp / 2
    s_a_all = 1 / (1 - X) ** 2
    s_a_tail = _weighted_power_tail(X, M + 1, 1.0)
    s_m_all = _weighted_power_tail(Y, m_min, c)
    s_m_tail = _weighted_power_tail(Y, max(M + 1, m_min), c)
    bound = (s_a_tail * s_m_all + s_a_all * s_m_tail) / Y
    return SeriesResult(value, float(bound), int(flat.size), int(m_min))


def hartogs_kernel(s_prime, z, zeta, method: str = "transform", M: int | None = None):
    if method == "transform":
        return hartogs_kernel_transform(s_prime, z, zeta)
    if method == "series":
        if M is None:
            raise InvalidArgument("series method needs a cutoff M")
        return hartogs_kernel_series(s_prime, z, zeta, M).value
    raise InvalidArgument(f"unknown method {method!r}")


def cayley(z):
    """``(i - z)/(i + z)``: upper half plane onto the unit disk, ``i -> 0``."""
    z = _val(z)
    if not np.all(np.imag(z) > 0):
        raise DomainError("Cayley transform needs Im z > 0")
    return (1j - z) / (1j + z)


def cayley_inverse(w):
    """``i (1 - w)/(1 + w)``."""
    w = _val(w)
    if np.any(w == -1):
        raise DomainError("w = -1 has no preimage")
    if not np.all(np.abs(w) < 1):
        raise DomainError("w must lie in the open unit disk")
    return 1j * (1 - w) / (1 + w)
