"""Curl spectrum of the round sphere S^n with sectional curvature 1."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from .errors import ValidationError
from .exact import ExactReal
from .spectrum import ManifoldDescriptor, SpectralLine, Spectrum, validate_spectrum

__all__ = ["SphereParams", "sphere_multiplicity", "sphere_volume", "sphere_descriptor", "sphere_spectrum"]


def _check_dim(n: int) -> None:
    if not isinstance(n, int) or n < 3 or n % 2 == 0:
        raise ValidationError(f"dimension must be an odd integer >= 3, got {n!r}")


@dataclass(frozen=True)
class SphereParams:
    n: int
    k_max: int

    def __post_init__(self):
        _check_dim(self.n)
        if not isinstance(self.k_max, int) or self.k_max < 0:
            raise ValidationError(f"k_max must be a nonnegative integer, got {self.k_max!r}")


def sphere_multiplicity(n: int, k: int) -> int:
    """Multiplicity of the curl eigenvalues ``±((n+1)/2 + k)`` on S^n.

    ``(n+k)! / (((n-1)/2)!**2 * k! * ((n+1)/2 + k))``.  The division is
    checked to be exact.
    """
    _check_dim(n)
    if k < 0:
        raise ValidationError(f"k must be nonnegative, got {k}")
    h = (n - 1) // 2
    num = factorial(n + k)
    den = factorial(h) ** 2 * factorial(k) * (h + 1 + k)
    m, rem = divmod(num, den)
    if rem:
        raise ArithmeticError(f"non-integral sphere multiplicity for n={n}, k={k}")
    return m


def sphere_volume(n: int) -> ExactReal:
    """Volume of the unit S^n, ``2*pi**((n+1)/2) / ((n-1)/2)!`` for odd n."""
    _check_dim(n)
    return ExactReal(Fraction(2, factorial((n - 1) // 2)), (n + 1) // 2)


def sphere_descriptor(n: int) -> ManifoldDescriptor:
    vol = sphere_volume(n)
    betti = (1,) + (0,) * ((n - 1) // 2)
    return ManifoldDescriptor("sphere", n, float(vol), betti, vol, f"S^{n}")


def sphere_spectrum(params: SphereParams | int, k_max: int | None = None) -> Spectrum:
    """Lines ``±((n+1)/2 + k)`` for ``k = 0..k_max``.

    Accepts either a :class:`SphereParams` or ``(n, k_max)``.
    """
    if not isinstance(params, SphereParams):
        params = SphereParams(params, k_max)
    n, k_max = params.n, params.k_max
    base = (n + 1) // 2
    lines = []
    for k in range(k_max + 1):
        m = sphere_multiplicity(n, k)
        lam = base + k
        lines.append(SpectralLine(float(lam), m, ExactReal(lam)))
        lines.append(SpectralLine(float(-lam), m, ExactReal(-lam)))
    return validate_spectrum(lines, sphere_descriptor(n), float(base + k_max))
