"""Curl spectrum of spherical space forms Gamma \\ S^3.

For a finite fixed-point-free ``Gamma`` in SO(4) the multiplicities
``m(curl, ±(2+k))`` are the coefficients of two Poincare series

    F_+(z) = 1/(1+z^2) * (1 + 1/|G| sum_g (chi+(g) - 1 - z^2 (chi-(g) - 1)) / det(1 - z g))

and the mirror image ``F_-`` with ``chi+`` and ``chi-`` swapped.  ``chi±``
are the characters of SO(4) on self-dual and anti-self-dual 2-forms.

Characters and determinants are evaluated in mpmath at 60+ digits; the
true coefficients are integers, so every coefficient is rounded and the
rounding residual is gated.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Sequence

import mpmath
import numpy as np

from .errors import ClosureCapError, FixedPointError, NumericalResidualError, ValidationError
from .exact import ExactReal
from .spectrum import ManifoldDescriptor, SpectralLine, Spectrum, validate_spectrum

__all__ = [
    "GroupElement",
    "IsometryGroup",
    "SeriesPair",
    "AsymmetryCertificate",
    "close_group",
    "lens_group",
    "assert_fixed_point_free",
    "is_fixed_point_free",
    "chi_pm",
    "det_one_minus_z",
    "poincare_F",
    "auxiliary_G",
    "spaceform_spectrum",
    "spaceform_descriptor",
    "smallest_eigenvalue_multiplicities",
    "asymmetry_certificate",
    "group_from_json",
    "load_group",
    "parse_angles",
    "DEFAULT_DPS",
    "DEFAULT_K",
    "RESIDUAL_GATE",
]

DEFAULT_DPS = 60
DEFAULT_K = 32
DEFAULT_CAP = 100_000
RESIDUAL_GATE = 1e-6
MAX_RETRIES = 3
ORTHO_TOL = 1e-12
FIXED_POINT_TOL = 1e-9
_HASH_SCALE = 1e9


def _turn(a) -> Fraction:
    """Reduce a fraction of a full turn to [0, 1)."""
    a = Fraction(a)
    return a - math.floor(a)


def _rotation_matrix(t1: float, t2: float) -> np.ndarray:
    c1, s1, c2, s2 = math.cos(t1), math.sin(t1), math.cos(t2), math.sin(t2)
    return np.array(
        [[c1, -s1, 0, 0], [s1, c1, 0, 0], [0, 0, c2, -s2], [0, 0, s2, c2]], dtype=float
    )


@dataclass(frozen=True, eq=False)
class GroupElement:
    """An element of SO(4).

    ``angles = (a1, a2)`` tags the block rotation ``R(2*pi*a1, 2*pi*a2)``
    exactly; products of tagged elements stay tagged.
    """

    matrix: np.ndarray
    angles: tuple[Fraction, Fraction] | None = None

    @classmethod
    def rotation(cls, a1, a2) -> "GroupElement":
        a1, a2 = _turn(a1), _turn(a2)
        m = _rotation_matrix(2 * math.pi * float(a1), 2 * math.pi * float(a2))
        return cls(m, (a1, a2))

    @classmethod
    def from_matrix(cls, m, tol: float = ORTHO_TOL) -> "GroupElement":
        arr = np.array(m, dtype=float).reshape(4, 4)
        if not np.all(np.isfinite(arr)):
            raise ValidationError("non-finite group element entry")
        err = np.max(np.abs(arr.T @ arr - np.eye(4)))
        if err > tol:
            raise ValidationError(f"matrix is not orthogonal (deviation {err:.3g})")
        det = np.linalg.det(arr)
        if abs(det - 1) > tol:
            raise ValidationError(f"matrix has determinant {det:.15g}, expected 1")
        return cls(arr)

    @classmethod
    def identity(cls) -> "GroupElement":
        return cls.rotation(0, 0)

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        if self.angles is not None and other.angles is not None:
            return GroupElement.rotation(self.angles[0] + other.angles[0], self.angles[1] + other.angles[1])
        return GroupElement(self.matrix @ other.matrix)

    def key(self):
        if self.angles is not None:
            return ("angles",) + self.angles
        return ("matrix",) + tuple(int(v) for v in np.rint(self.matrix * _HASH_SCALE).ravel())

    def is_identity(self) -> bool:
        if self.angles is not None:
            return self.angles == (0, 0)
        return bool(np.max(np.abs(self.matrix - np.eye(4))) < FIXED_POINT_TOL)

    def mp_rows(self) -> list[list]:
        """Entries as mpmath numbers at the current working precision."""
        if self.angles is not None:
            t1 = 2 * mpmath.pi * mpmath.mpf(self.angles[0].numerator) / self.angles[0].denominator
            t2 = 2 * mpmath.pi * mpmath.mpf(self.angles[1].numerator) / self.angles[1].denominator
            c1, s1, c2, s2 = mpmath.cos(t1), mpmath.sin(t1), mpmath.cos(t2), mpmath.sin(t2)
            z = mpmath.mpf(0)
            return [[c1, -s1, z, z], [s1, c1, z, z], [z, z, c2, -s2], [z, z, s2, c2]]
        return [[mpmath.mpf(float(v)) for v in row] for row in self.matrix]

    def __repr__(self) -> str:
        if self.angles is not None:
            return f"R(2pi*{self.angles[0]}, 2pi*{self.angles[1]})"
        return f"GroupElement({np.round(self.matrix, 6).tolist()})"


@dataclass(frozen=True)
class IsometryGroup:
    """Finite subgroup of SO(4), listed with the identity first."""

    elements: tuple[GroupElement, ...]
    label: str = ""

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)


def close_group(
    generators: Iterable[GroupElement], cap: int = DEFAULT_CAP, label: str = ""
) -> IsometryGroup:
    """Smallest subgroup containing ``generators`` (breadth-first closure)."""
    gens = list(generators)
    for g in gens:
        if not isinstance(g, GroupElement):
            raise ValidationError(f"generator {g!r} is not a GroupElement")
    if cap < 1:
        raise ValidationError("closure cap must be at least 1")
    if gens and any(g.angles is None for g in gens):
        # mixed input: drop tags so all products hash the same way
        gens = [GroupElement(g.matrix) for g in gens]
        ident = GroupElement(np.eye(4))
    else:
        ident = GroupElement.identity()
    seen = {ident.key(): ident}
    order = [ident]
    queue = deque([ident])
    while queue:
        h = queue.popleft()
        for g in gens:
            p = h * g
            k = p.key()
            if k not in seen:
                seen[k] = p
                order.append(p)
                queue.append(p)
                if len(order) > cap:
                    raise ClosureCapError(f"group closure exceeded cap of {cap} elements")
    return IsometryGroup(tuple(order), label)


def lens_group(q: int, p1: int, p2: int) -> IsometryGroup:
    """Cyclic group generated by ``R(2*pi*p1/q, 2*pi*p2/q)``."""
    if q < 1:
        raise ValidationError("q must be positive")
    return close_group([GroupElement.rotation(Fraction(p1, q), Fraction(p2, q))], label=f"L({q};{p1},{p2})")


def _offending(group: IsometryGroup):
    for g in group.elements:
        if g.is_identity():
            continue
        if g.angles is not None:
            if g.angles[0] == 0 or g.angles[1] == 0:
                return g
        elif abs(np.linalg.det(np.eye(4) - g.matrix)) <= FIXED_POINT_TOL:
            return g
    return None


def is_fixed_point_free(group: IsometryGroup) -> bool:
    return _offending(group) is None


def assert_fixed_point_free(group: IsometryGroup) -> None:
    """Raise :class:`FixedPointError` naming an element with eigenvalue 1."""
    bad = _offending(group)
    if bad is not None:
        raise FixedPointError(f"group element {bad!r} has a fixed point on S^3", bad)


# -- characters and determinants ------------------------------------------

_PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
# e1^e2 + e3^e4, e1^e4 + e2^e3, e1^e3 - e2^e4 (0-based indices)
_LAMBDA_PLUS = (
    {(0, 1): 1, (2, 3): 1},
    {(0, 3): 1, (1, 2): 1},
    {(0, 2): 1, (1, 3): -1},
)
_LAMBDA_MINUS = (
    {(0, 1): 1, (2, 3): -1},
    {(0, 3): 1, (1, 2): -1},
    {(0, 2): 1, (1, 3): 1},
)


def wedge_square(m) -> list[list]:
    """Matrix of the induced action on 2-vectors in the basis ``e_i ^ e_j``, i < j."""
    return [
        [m[i][k] * m[j][l] - m[i][l] * m[j][k] for (k, l) in _PAIRS]
        for (i, j) in _PAIRS
    ]


def _character(w, basis) -> object:
    idx = {p: n for n, p in enumerate(_PAIRS)}
    total = 0
    for b in basis:
        acc = 0
        for ij, cb in b.items():
            for kl, ck in b.items():
                acc += cb * ck * w[idx[ij]][idx[kl]]
        total += acc / 2  # each basis vector has squared norm 2
    return total


def _chi_pair(rows) -> tuple:
    w = wedge_square(rows)
    return _character(w, _LAMBDA_PLUS), _character(w, _LAMBDA_MINUS)


def _rows_of(g) -> list[list]:
    if isinstance(g, GroupElement):
        return g.matrix.tolist()
    return np.asarray(g, dtype=float).reshape(4, 4).tolist()


def chi_pm(g: GroupElement | np.ndarray) -> tuple[float, float]:
    """Traces of ``g`` on self-dual and anti-self-dual 2-forms."""
    plus, minus = _chi_pair(_rows_of(g))
    return float(plus), float(minus)


def _matmul(a, b):
    return [[sum(a[i][k] * b[k][j] for k in range(4)) for j in range(4)] for i in range(4)]


def _charpoly_coeffs(rows) -> list:
    """Coefficients of ``det(1 - z*g)`` from power traces (Newton's identities)."""
    p = []
    power = rows
    for _ in range(4):
        p.append(sum(power[i][i] for i in range(4)))
        power = _matmul(power, rows)
    e1 = p[0]
    e2 = (e1 * p[0] - p[1]) / 2
    e3 = (e2 * p[0] - e1 * p[1] + p[2]) / 3
    e4 = (e3 * p[0] - e2 * p[1] + e1 * p[2] - p[3]) / 4
    one = e1 * 0 + 1
    return [one, -e1, e2, -e3, e4]


def det_one_minus_z(g: GroupElement | np.ndarray) -> list[float]:
    """Coefficients ``[c0, ..., c4]`` of ``det(I - z*g)``, lowest degree first."""
    return [float(c) for c in _charpoly_coeffs(_rows_of(g))]


# -- Poincare series -------------------------------------------------------


@dataclass(frozen=True)
class SeriesPair:
    """Integer coefficients 0..K of a pair of series (``F_±`` or ``G_±``)."""

    plus: tuple[int, ...]
    minus: tuple[int, ...]
    K: int
    residual: float
    dps: int = DEFAULT_DPS


def _series(num: Sequence, den: Sequence, K: int) -> list:
    """Power series of ``num/den`` through order K; requires ``den[0] == 1``."""
    out = []
    for m in range(K + 1):
        v = num[m] if m < len(num) else 0
        for i in range(1, min(m, len(den) - 1) + 1):
            v -= den[i] * out[m - i]
        out.append(v)
    return out


@lru_cache(maxsize=256)
def _element_data(group: IsometryGroup, dps: int) -> tuple[tuple, ...]:
    """``(chi+, chi-, det(1 - z g) coefficients)`` per element, at ``dps`` digits."""
    data = []
    for g in group.elements:
        rows = g.mp_rows()
        cp, cm = _chi_pair(rows)
        data.append((cp, cm, tuple(_charpoly_coeffs(rows))))
    return tuple(data)


def _round_all(raw: Sequence, what: str) -> tuple[tuple[int, ...], float]:
    ints, residual = [], 0.0
    for k, v in enumerate(raw):
        r = int(mpmath.nint(v))
        residual = max(residual, float(abs(v - r)))
        if r < 0:
            raise NumericalResidualError(f"negative coefficient {r} at index {k} of {what}")
        ints.append(r)
    return tuple(ints), residual


def _with_escalation(compute, dps: int, what: str):
    """Run ``compute()`` at increasing precision until the residual gate passes."""
    last = None
    for _ in range(MAX_RETRIES + 1):
        with mpmath.workdps(dps):
            plus_raw, minus_raw = compute()
            plus, r1 = _round_all(plus_raw, what + "+")
            minus, r2 = _round_all(minus_raw, what + "-")
        residual = max(r1, r2)
        if residual <= RESIDUAL_GATE:
            return plus, minus, residual, dps
        last = residual
        dps *= 2
    raise NumericalResidualError(f"{what} residual {last:.3g} exceeds {RESIDUAL_GATE} at {dps // 2} digits")


def _check_K(K: int) -> None:
    if not isinstance(K, int) or K < 0:
        raise ValidationError(f"series order must be a nonnegative integer, got {K!r}")


def poincare_F(group: IsometryGroup, K: int = DEFAULT_K, dps: int = DEFAULT_DPS) -> SeriesPair:
    """Coefficients 0..K of ``F_+`` and ``F_-``: the multiplicities of ``±(2+k)``."""
    _check_K(K)
    assert_fixed_point_free(group)

    def compute():
        order = group.order
        acc_p = [mpmath.mpf(0)] * (K + 1)
        acc_m = [mpmath.mpf(0)] * (K + 1)
        for cp, cm, den in _element_data(group, mpmath.mp.dps):
            sp = _series([cp - 1, 0, -(cm - 1)], den, K)
            sm = _series([cm - 1, 0, -(cp - 1)], den, K)
            acc_p = [a + b for a, b in zip(acc_p, sp)]
            acc_m = [a + b for a, b in zip(acc_m, sm)]
        out = []
        for acc in (acc_p, acc_m):
            b = [a / order for a in acc]
            b[0] += 1
            # multiply by 1/(1+z^2)
            c = []
            for m in range(K + 1):
                c.append(b[m] - (c[m - 2] if m >= 2 else 0))
            out.append(c)
        return out

    plus, minus, residual, used = _with_escalation(compute, dps, "F")
    return SeriesPair(plus, minus, K, residual, used)


def auxiliary_G(group: IsometryGroup, K: int = DEFAULT_K, dps: int = DEFAULT_DPS) -> SeriesPair:
    """``G_±(z) = 1 + (1-z^2)/|G| sum_g (chi±(g) - 1)/det(1 - z g)``.

    Satisfies ``F_+ + z^2 F_- = G_+`` and ``F_- + z^2 F_+ = G_-``.
    """
    _check_K(K)
    assert_fixed_point_free(group)

    def compute():
        order = group.order
        acc_p = [mpmath.mpf(0)] * (K + 1)
        acc_m = [mpmath.mpf(0)] * (K + 1)
        for cp, cm, den in _element_data(group, mpmath.mp.dps):
            sp = _series([cp - 1, 0, -(cp - 1)], den, K)
            sm = _series([cm - 1, 0, -(cm - 1)], den, K)
            acc_p = [a + b for a, b in zip(acc_p, sp)]
            acc_m = [a + b for a, b in zip(acc_m, sm)]
        out = []
        for acc in (acc_p, acc_m):
            b = [a / order for a in acc]
            b[0] += 1
            out.append(b)
        return out

    plus, minus, residual, used = _with_escalation(compute, dps, "G")
    return SeriesPair(plus, minus, K, residual, used)


def spaceform_descriptor(group: IsometryGroup) -> ManifoldDescriptor:
    vol = ExactReal(Fraction(2, group.order), 2)
    return ManifoldDescriptor("spaceform", 3, float(vol), (1, 0), vol, group.label or f"S^3/G(order {group.order})")


def spaceform_spectrum(group: IsometryGroup, k_max: int, dps: int = DEFAULT_DPS) -> Spectrum:
    """Lines ``+(2+k)`` with multiplicity ``F_+[k]`` and ``-(2+k)`` with ``F_-[k]``."""
    F = poincare_F(group, k_max, dps)
    lines = []
    for k in range(k_max + 1):
        lam = 2 + k
        if F.plus[k]:
            lines.append(SpectralLine(float(lam), F.plus[k], ExactReal(lam)))
        if F.minus[k]:
            lines.append(SpectralLine(float(-lam), F.minus[k], ExactReal(-lam)))
    return validate_spectrum(lines, spaceform_descriptor(group), float(2 + k_max))


def smallest_eigenvalue_multiplicities(group: IsometryGroup, dps: int = DEFAULT_DPS) -> tuple[int, int]:
    """``(m(curl, 2), m(curl, -2))`` as group averages of ``chi+`` and ``chi-``."""
    assert_fixed_point_free(group)

    def compute():
        data = _element_data(group, mpmath.mp.dps)
        return [sum(d[0] for d in data) / group.order], [sum(d[1] for d in data) / group.order]

    plus, minus, _, _ = _with_escalation(compute, dps, "average character")
    return plus[0], minus[0]


@dataclass(frozen=True)
class AsymmetryCertificate:
    symmetric: bool
    defect: tuple[int, ...]  # coefficients of F_+ - F_-
    samples: tuple[tuple[float, float], ...]  # (z, sum over g != 1 of (chi+ - chi-)/det(1 - z g))
    certificate_symmetric: bool

    @property
    def consistent(self) -> bool:
        return self.symmetric == self.certificate_symmetric


_SAMPLE_POINTS = ("0.1", "0.35", "-0.5", "0.8")


def asymmetry_certificate(
    group: IsometryGroup, K: int = DEFAULT_K, dps: int = DEFAULT_DPS
) -> AsymmetryCertificate:
    """Decide symmetry of the spectrum about 0 two ways.

    The defect series is read off ``F_+ - F_-``; independently the rational
    function ``sum_{g != 1} (chi+(g) - chi-(g)) / det(1 - z g)`` is evaluated
    at a few points inside the unit disc.
    """
    F = poincare_F(group, K, dps)
    defect = tuple(p - m for p, m in zip(F.plus, F.minus))
    samples = []
    with mpmath.workdps(dps):
        tol = mpmath.mpf(10) ** (-(dps // 2))
        data = _element_data(group, mpmath.mp.dps)
        vanishing = True
        for zs in _SAMPLE_POINTS:
            z = mpmath.mpf(zs)
            total = mpmath.mpf(0)
            for g, (cp, cm, den) in zip(group.elements, data):
                if g.is_identity():
                    continue
                total += (cp - cm) / sum(c * z**i for i, c in enumerate(den))
            if abs(total) > tol:
                vanishing = False
            samples.append((float(z), float(total)))
    return AsymmetryCertificate(all(d == 0 for d in defect), defect, tuple(samples), vanishing)


# -- input formats ---------------------------------------------------------


def parse_angles(text: str) -> GroupElement:
    """``"q:p1,p2"`` -> ``R(2*pi*p1/q, 2*pi*p2/q)``."""
    try:
        q_s, ps = text.split(":")
        p1_s, p2_s = ps.split(",")
        q, p1, p2 = int(q_s), int(p1_s), int(p2_s)
    except ValueError as exc:
        raise ValidationError(f"angle shorthand must look like 'q:p1,p2', got {text!r}") from exc
    if q < 1:
        raise ValidationError("q must be positive")
    return GroupElement.rotation(Fraction(p1, q), Fraction(p2, q))


def _angles_label(specs: list[tuple[int, int, int]]) -> str:
    return "+".join(f"L({q};{p1},{p2})" for q, p1, p2 in specs)


def group_from_json(data: dict | str, cap: int = DEFAULT_CAP) -> IsometryGroup:
    """Parse ``{"type": "angles", "q": q, "pairs": [[p1, p2], ...]}`` or
    ``{"type": "matrices", "generators": [[16 floats], ...]}``."""
    if isinstance(data, str):
        data = json.loads(data)
    try:
        kind = data["type"]
        if kind == "angles":
            q = int(data["q"])
            if q < 1:
                raise ValidationError("q must be positive")
            pairs = [(int(a), int(b)) for a, b in data["pairs"]]
            gens = [GroupElement.rotation(Fraction(a, q), Fraction(b, q)) for a, b in pairs]
            return close_group(gens, cap, _angles_label([(q, a, b) for a, b in pairs]))
        if kind == "matrices":
            gens = []
            for flat in data["generators"]:
                if len(flat) != 16:
                    raise ValidationError("matrix generators need 16 entries")
                gens.append(GroupElement.from_matrix([float(v) for v in flat]))
            return close_group(gens, cap, data.get("label", ""))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError(f"malformed group record: {exc}") from exc
    raise ValidationError(f"unknown group type {kind!r}")


def load_group(path: str | Path, cap: int = DEFAULT_CAP) -> IsometryGroup:
    p = Path(path)
    if not p.exists():
        raise ValidationError(f"group file not found: {path}")
    return group_from_json(p.read_text(), cap)
