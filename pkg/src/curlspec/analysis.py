"""Checks run over computed spectra: Weyl law, counting identity, zeta/eta
partial sums, zeta(0), and the curvature lower bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial

import numpy as np

from .errors import CountingIdentityError, ValidationError
from .exact import REL_TOL, ExactReal
from .spectrum import ManifoldDescriptor, Spectrum, counting, symmetry_defect
from .torus import LatticeBasis, brute_force_count, dual_lattice, torus_spectrum

__all__ = [
    "WeylSample",
    "WeylReport",
    "BoundReport",
    "ZetaPartial",
    "ZetaZero",
    "weyl_leading_coefficient",
    "weyl_fit",
    "counting_identity_check_torus",
    "zeta_partial",
    "zeta_at_zero",
    "eta_partial",
    "check_lower_bound",
    "BOUND_KINDS",
]

BOUND_KINDS = ("curvature-operator", "ricci-3d")


def _check_dim(n: int) -> None:
    if n < 3 or n % 2 == 0:
        raise ValidationError(f"dimension must be odd and >= 3, got {n}")


def weyl_leading_coefficient(n: int, volume) -> ExactReal | float:
    """``vol / (2 * pi**((n+1)/2) * n * ((n-1)/2)!)``.

    Exact (an :class:`ExactReal`) when ``volume`` is an int, Fraction or
    ExactReal; a float otherwise.
    """
    _check_dim(n)
    dim_part = ExactReal(Fraction(1, 2 * n * factorial((n - 1) // 2)), -(n + 1) // 2)
    if isinstance(volume, (int, Fraction)):
        volume = ExactReal(volume)
    if isinstance(volume, ExactReal):
        if volume.sign <= 0:
            raise ValidationError("volume must be positive")
        return dim_part * volume
    volume = float(volume)
    if not volume > 0:
        raise ValidationError("volume must be positive")
    return float(dim_part) * volume


def _descriptor_coefficient(d: ManifoldDescriptor) -> ExactReal | float:
    return weyl_leading_coefficient(d.n, d.volume_exact if d.volume_exact is not None else d.volume)


@dataclass(frozen=True)
class WeylSample:
    lam: float
    n_plus: int
    n_minus: int
    predicted: float

    @property
    def rel_error_plus(self) -> float:
        return abs(self.n_plus / self.predicted - 1)

    @property
    def rel_error_minus(self) -> float:
        return abs(self.n_minus / self.predicted - 1)


@dataclass(frozen=True)
class WeylReport:
    coefficient: float
    coefficient_exact: ExactReal | None
    n: int
    samples: tuple[WeylSample, ...]
    slope_plus: float
    slope_minus: float

    def table(self) -> list[tuple[float, float]]:
        """``(lam, relative error)`` rows, worse of the two signs."""
        return [(s.lam, max(s.rel_error_plus, s.rel_error_minus)) for s in self.samples]

    def as_dict(self) -> dict:
        return {
            "coefficient": self.coefficient,
            "coefficient_exact": None if self.coefficient_exact is None else str(self.coefficient_exact),
            "n": self.n,
            "slope_plus": self.slope_plus,
            "slope_minus": self.slope_minus,
            "samples": [
                {
                    "lambda": s.lam,
                    "n_plus": s.n_plus,
                    "n_minus": s.n_minus,
                    "predicted": s.predicted,
                    "rel_error_plus": s.rel_error_plus,
                    "rel_error_minus": s.rel_error_minus,
                }
                for s in self.samples
            ],
        }


def _loglog_slope(xs, ys) -> float:
    x = np.log(np.asarray(xs, dtype=float))
    y = np.log(np.maximum(np.asarray(ys, dtype=float), 1e-300))
    return float(np.polyfit(x, y, 1)[0])


def weyl_fit(spectrum: Spectrum, samples: int = 12, lo_fraction: float = 0.1) -> WeylReport:
    """Compare ``N_±(lam)`` with ``c * lam**n`` at geometrically spaced ``lam``.

    Samples run from ``lo_fraction * truncation`` (or the first eigenvalue,
    if larger) up to the truncation.  ``slope_±`` is the least-squares
    slope of log relative error against log lam; negative means the error
    shrinks.
    """
    if samples < 10:
        raise ValidationError("weyl_fit needs at least 10 sample points")
    mags = sorted({round(abs(line.eigenvalue), 9) for line in spectrum.lines})
    if len(mags) < samples:
        raise ValidationError(
            f"truncation too small: {len(mags)} distinct |lambda| values, need {samples}"
        )
    d = spectrum.descriptor
    coeff = _descriptor_coefficient(d)
    c = float(coeff)
    hi = spectrum.truncation
    lo = max(mags[0], lo_fraction * hi)
    if not lo < hi:
        raise ValidationError("truncation too small for a Weyl fit")
    rows = []
    for lam in np.geomspace(lo, hi, samples):
        lam = float(min(lam, hi))
        rows.append(
            WeylSample(lam, counting(spectrum, "+", lam), counting(spectrum, "-", lam), c * lam**d.n)
        )
    xs = [s.lam for s in rows]
    return WeylReport(
        coefficient=c,
        coefficient_exact=coeff if isinstance(coeff, ExactReal) else None,
        n=d.n,
        samples=tuple(rows),
        slope_plus=_loglog_slope(xs, [s.rel_error_plus for s in rows]),
        slope_minus=_loglog_slope(xs, [s.rel_error_minus for s in rows]),
    )


def counting_identity_check_torus(basis: LatticeBasis, lam: float) -> tuple[int, int]:
    """Both sides of ``N_+ + N_- = (-1)^((n-1)/2) sum_p (-1)^p N(p, lam^2)``.

    The left side comes from the curl spectrum; the right side from
    ``N(p, .) = binom(n, p) N(0, .)`` with ``N(0, .)`` counted by a box
    search over the dual lattice.  Raises on disagreement.
    """
    lam = float(lam)
    if not lam > 0:
        raise ValidationError("lam must be positive")
    n = basis.n
    spec = torus_spectrum(basis, lam)
    lhs = counting(spec, "+", lam) + counting(spec, "-", lam)
    n0 = brute_force_count(dual_lattice(basis), (lam / (2 * math.pi)) ** 2)
    h = (n - 1) // 2
    rhs = (-1) ** h * sum((-1) ** p * comb(n, p) * n0 for p in range(h + 1))
    if lhs != rhs:
        raise CountingIdentityError(f"counting identity fails at lam={lam}: {lhs} != {rhs}")
    return lhs, rhs


@dataclass(frozen=True)
class ZetaPartial:
    partial: float
    tail: float

    def __iter__(self):
        return iter((self.partial, self.tail))


def zeta_partial(spectrum: Spectrum, s: float) -> ZetaPartial:
    """``sum m(lam) |lam|**-s`` over the stored lines, plus a Weyl tail estimate.

    The tail beyond the truncation ``L`` is estimated as
    ``2 c n / (s - n) * L**(n - s)`` with ``c`` the Weyl coefficient.
    """
    n = spectrum.descriptor.n
    if not s > n:
        raise ValidationError(f"zeta partial sums need s > n = {n}, got {s}")
    partial = math.fsum(line.multiplicity * abs(line.eigenvalue) ** (-s) for line in spectrum.lines)
    c = float(_descriptor_coefficient(spectrum.descriptor))
    tail = 2 * c * n / (s - n) * spectrum.truncation ** (n - s)
    return ZetaPartial(partial, tail)


@dataclass(frozen=True)
class ZetaZero:
    value: int
    semi_characteristic: int

    def __iter__(self):
        return iter((self.value, self.semi_characteristic))


def zeta_at_zero(descriptor: ManifoldDescriptor) -> ZetaZero:
    """``zeta(0) = (-1)^((n+1)/2) sum_{p <= (n-1)/2} (-1)^p b_p`` and its parity."""
    n = descriptor.n
    value = (-1) ** ((n + 1) // 2) * sum((-1) ** p * b for p, b in enumerate(descriptor.betti))
    return ZetaZero(value, value % 2)


def eta_partial(spectrum: Spectrum, s: float) -> float:
    """``sum_{lam > 0} (m(lam) - m(-lam)) lam**-s`` over the stored lines.

    Symmetric spectra give exactly 0.0 since no term is ever formed.
    """
    n = spectrum.descriptor.n
    if not s > n:
        raise ValidationError(f"eta partial sums need s > n = {n}, got {s}")
    return math.fsum(d * lam ** (-s) for lam, d in symmetry_defect(spectrum))


@dataclass(frozen=True)
class BoundReport:
    kappa: float
    bound: float
    kind: str
    min_abs: float | None
    passed: bool
    attained: bool
    multiplicities: tuple[int, int]  # at +bound, -bound
    bound_exact: ExactReal | None = None
    violations: tuple[float, ...] = field(default=())

    def as_dict(self) -> dict:
        return {
            "kappa": self.kappa,
            "kind": self.kind,
            "bound": self.bound,
            "bound_exact": None if self.bound_exact is None else str(self.bound_exact),
            "min_abs_lambda": self.min_abs,
            "pass": self.passed,
            "attained": self.attained,
            "multiplicity_at_plus_bound": self.multiplicities[0],
            "multiplicity_at_minus_bound": self.multiplicities[1],
            "violations": list(self.violations),
        }


def check_lower_bound(spectrum: Spectrum, kappa, kind: str = "curvature-operator") -> BoundReport:
    """Check ``|lam| >= (n+1)/2 sqrt(kappa)`` (curvature operator >= kappa) or,
    for n = 3, ``|lam| >= 2 sqrt(kappa)`` (Ric >= 2 kappa).

    Also reports the multiplicities at exactly ``±bound``; equality is
    decided exactly when both the eigenvalue and kappa are exact.
    """
    n = spectrum.descriptor.n
    if kind not in BOUND_KINDS:
        raise ValidationError(f"kind must be one of {BOUND_KINDS}, got {kind!r}")
    if kind == "ricci-3d" and n != 3:
        raise ValidationError("the Ricci bound applies to dimension 3 only")
    factor = Fraction(n + 1, 2) if kind == "curvature-operator" else Fraction(2)

    bound_exact = None
    if isinstance(kappa, (int, Fraction, str)):
        kappa = Fraction(kappa)
        if kappa <= 0:
            raise ValidationError("kappa must be positive")
        bound_exact = ExactReal.sqrt(kappa) * factor
        bound = float(bound_exact)
    else:
        kappa = float(kappa)
        if not kappa > 0:
            raise ValidationError("kappa must be positive")
        bound = float(factor) * math.sqrt(kappa)

    def at_bound(line) -> bool:
        if bound_exact is not None and line.exact is not None:
            return abs(line.exact) == bound_exact
        return abs(abs(line.eigenvalue) - bound) <= REL_TOL * max(1.0, bound)

    def below(line) -> bool:
        if at_bound(line):
            return False
        if bound_exact is not None and line.exact is not None:
            return abs(line.exact) < bound_exact
        return abs(line.eigenvalue) < bound

    violations = tuple(line.eigenvalue for line in spectrum.lines if below(line))
    m_plus = sum(l.multiplicity for l in spectrum.lines if l.eigenvalue > 0 and at_bound(l))
    m_minus = sum(l.multiplicity for l in spectrum.lines if l.eigenvalue < 0 and at_bound(l))
    min_abs = min((abs(l.eigenvalue) for l in spectrum.lines), default=None)
    return BoundReport(
        kappa=float(kappa),
        bound=bound,
        kind=kind,
        min_abs=min_abs,
        passed=not violations,
        attained=(m_plus + m_minus) > 0,
        multiplicities=(m_plus, m_minus),
        bound_exact=bound_exact,
        violations=violations,
    )
