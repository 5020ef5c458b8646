"""Weights on the upper half plane built from the three distances that matter near ``i``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument

DIST_TO_I = "dist_to_i"  # |i - z|
DIST_TO_MINUS_I = "dist_to_minus_i"  # |i + z|
CAYLEY_MODULUS = "cayley_modulus"  # |(i - z)/(i + z)|
BASES = (DIST_TO_I, DIST_TO_MINUS_I, CAYLEY_MODULUS)


@dataclass(frozen=True)
class HalfPlaneWeight:
    """``scale * prod |base(z)|**exponent`` over ``factors``.

    Positive on the closed upper half plane except possibly at ``i``; ``|i + z|``
    never drops below 1 there, so ``i`` is the only point where local
    integrability can fail.  Hashable, so averages can be cached per region.
    """

    factors: tuple = ()
    scale: float = 1.0

    def __post_init__(self):
        merged: dict[str, float] = {}
        for base, e in self.factors:
            if base not in BASES:
                raise InvalidArgument(f"unknown weight factor {base!r}")
            merged[base] = merged.get(base, 0.0) + float(e)
        canon = tuple((b, merged[b]) for b in BASES if b in merged and merged[b] != 0.0)
        object.__setattr__(self, "factors", canon)
        if not self.scale > 0:
            raise InvalidArgument("weight scale must be positive")
        object.__setattr__(self, "scale", float(self.scale))

    @classmethod
    def constant(cls, c: float = 1.0) -> "HalfPlaneWeight":
        return cls((), c)

    @classmethod
    def cayley_power(cls, exponent: float, scale: float = 1.0) -> "HalfPlaneWeight":
        return cls(((CAYLEY_MODULUS, exponent),), scale)

    def exponent(self, base: str) -> float:
        return dict(self.factors).get(base, 0.0)

    @property
    def exponent_at_i(self) -> float:
        """Total power of ``|z - i|`` in the weight near ``i``."""
        return self.exponent(DIST_TO_I) + self.exponent(CAYLEY_MODULUS)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.full(z.shape, self.scale)
        for base, e in self.factors:
            out = out * _base_value(base, z) ** e
        return out

    def regular_at_i(self, z):
        """The weight divided by ``|z - i|**exponent_at_i``; smooth near ``i``."""
        z = np.asarray(z, dtype=complex)
        e_plus = self.exponent(DIST_TO_MINUS_I) - self.exponent(CAYLEY_MODULUS)
        if e_plus == 0.0:
            return np.full(z.shape, self.scale)
        return self.scale * np.abs(1j + z) ** e_plus

    def power(self, q: float) -> "HalfPlaneWeight":
        return HalfPlaneWeight(tuple((b, e * q) for b, e in self.factors), self.scale**q)

    def scaled(self, c: float) -> "HalfPlaneWeight":
        return HalfPlaneWeight(self.factors, self.scale * c)

    def __mul__(self, other: "HalfPlaneWeight") -> "HalfPlaneWeight":
        if not isinstance(other, HalfPlaneWeight):
            return NotImplemented
        return HalfPlaneWeight(self.factors + other.factors, self.scale * other.scale)

    def describe(self) -> str:
        names = {DIST_TO_I: "|i-z|", DIST_TO_MINUS_I: "|i+z|", CAYLEY_MODULUS: "|(i-z)/(i+z)|"}
        parts = [f"{names[b]}^{e:g}" for b, e in self.factors]
        if self.scale != 1.0 or not parts:
            parts.insert(0, f"{self.scale:g}")
        return " * ".join(parts)

    def to_dict(self) -> dict:
        return {"scale": self.scale, "factors": [[b, e] for b, e in self.factors]}


def _base_value(base, z):
    if base == DIST_TO_I:
        return np.abs(1j - z)
    if base == DIST_TO_MINUS_I:
        return np.abs(1j + z)
    return np.abs((1j - z) / (1j + z))
