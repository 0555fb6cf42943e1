"""Spectrum container shared by all manifold families.

The eigenvalue 0 of curl has infinite multiplicity; it is never stored as
a line.  All counting functions exclude it.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import TruncationError, ValidationError
from .exact import REL_TOL, ExactReal, close

__all__ = [
    "FAMILIES",
    "ManifoldDescriptor",
    "SpectralLine",
    "Spectrum",
    "validate_spectrum",
    "counting",
    "symmetry_defect",
    "spectrum_to_dict",
    "spectrum_from_dict",
    "spectrum_to_json",
    "spectrum_from_json",
    "spectrum_to_csv",
]

FAMILIES = ("torus", "sphere", "spaceform")


@dataclass(frozen=True)
class ManifoldDescriptor:
    family: str
    n: int
    volume: float
    betti: tuple[int, ...]
    volume_exact: ExactReal | None = None
    label: str = ""

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValidationError(f"unknown family {self.family!r}")
        if self.n < 3 or self.n % 2 == 0:
            raise ValidationError(f"dimension must be odd and >= 3, got {self.n}")
        if not self.volume > 0:
            raise ValidationError(f"volume must be positive, got {self.volume}")
        betti = tuple(int(b) for b in self.betti)
        if len(betti) != (self.n + 1) // 2:
            raise ValidationError(f"need Betti numbers b_0..b_{(self.n - 1) // 2}, got {len(betti)}")
        if any(b < 0 for b in betti):
            raise ValidationError("Betti numbers must be nonnegative")
        if betti[0] != 1:
            raise ValidationError("b_0 must be 1 for a connected manifold")
        object.__setattr__(self, "betti", betti)


@dataclass(frozen=True)
class SpectralLine:
    """A nonzero eigenvalue with its multiplicity.

    ``exact`` carries the exact value when the family provides one;
    ``shell`` is the squared dual-lattice norm for torus lines.
    """

    eigenvalue: float
    multiplicity: int
    exact: ExactReal | None = None
    shell: Fraction | float | None = None

    def same_eigenvalue(self, other: "SpectralLine") -> bool:
        if self.exact is not None and other.exact is not None:
            return self.exact == other.exact
        return close(self.eigenvalue, other.eigenvalue)


@dataclass(frozen=True)
class Spectrum:
    lines: tuple[SpectralLine, ...]
    descriptor: ManifoldDescriptor
    truncation: float
    approximate: bool = False

    def __iter__(self):
        return iter(self.lines)

    def __len__(self):
        return len(self.lines)

    def multiplicity(self, eigenvalue: float) -> int:
        """Multiplicity of a nonzero eigenvalue (0 if absent)."""
        if abs(eigenvalue) > self.truncation * (1 + REL_TOL):
            raise TruncationError(f"|{eigenvalue}| exceeds truncation {self.truncation}")
        for line in self.lines:
            if close(line.eigenvalue, eigenvalue):
                return line.multiplicity
        return 0

    def as_pairs(self) -> list[tuple[float, int]]:
        return [(line.eigenvalue, line.multiplicity) for line in self.lines]


def _coerce_line(item) -> SpectralLine:
    if isinstance(item, SpectralLine):
        return item
    lam, mult = item
    exact = None
    if isinstance(lam, ExactReal):
        exact = lam
    elif isinstance(lam, (int, Fraction)):
        exact = ExactReal(lam)
    return SpectralLine(float(lam), mult, exact)


def validate_spectrum(
    lines: Iterable, descriptor: ManifoldDescriptor, lmax: float, approximate: bool = False
) -> Spectrum:
    """Sort and merge lines into a :class:`Spectrum`.

    ``lines`` may hold :class:`SpectralLine` objects or ``(lambda, m)``
    pairs.  Lines with equal eigenvalues have their multiplicities summed.
    """
    if not lmax > 0:
        raise ValidationError(f"truncation must be positive, got {lmax}")
    coerced = []
    for item in lines:
        line = _coerce_line(item)
        if isinstance(line.multiplicity, bool) or int(line.multiplicity) != line.multiplicity:
            raise ValidationError(f"multiplicity must be an integer, got {line.multiplicity!r}")
        if line.multiplicity <= 0:
            raise ValidationError(f"nonpositive multiplicity {line.multiplicity} at {line.eigenvalue}")
        if line.eigenvalue == 0 or (line.exact is not None and line.exact.sign == 0):
            raise ValidationError("eigenvalue 0 is kernel metadata, not a spectral line")
        if abs(line.eigenvalue) > lmax * (1 + REL_TOL):
            raise ValidationError(f"|{line.eigenvalue}| exceeds truncation {lmax}")
        coerced.append(line)

    coerced.sort(key=lambda ln: ln.eigenvalue)
    merged: list[SpectralLine] = []
    for line in coerced:
        if merged and merged[-1].same_eigenvalue(line):
            prev = merged[-1]
            merged[-1] = SpectralLine(
                prev.eigenvalue,
                prev.multiplicity + int(line.multiplicity),
                prev.exact if prev.exact is not None else line.exact,
                prev.shell if prev.shell is not None else line.shell,
            )
        else:
            merged.append(
                SpectralLine(line.eigenvalue, int(line.multiplicity), line.exact, line.shell)
            )
    return Spectrum(tuple(merged), descriptor, float(lmax), approximate)


def _sign(sign) -> int:
    if sign in ("+", 1, +1):
        return 1
    if sign in ("-", "−", -1):
        return -1
    raise ValidationError(f"sign must be '+' or '-', got {sign!r}")


def counting(spectrum: Spectrum, sign, lam: float) -> int:
    """N_+(lam) or N_-(lam): multiplicities of eigenvalues in (0, lam] or [-lam, 0)."""
    s = _sign(sign)
    if not lam > 0:
        raise ValidationError(f"counting needs lam > 0, got {lam}")
    if lam > spectrum.truncation * (1 + REL_TOL):
        raise TruncationError(
            f"lam={lam} exceeds truncation {spectrum.truncation}; count would be incomplete"
        )
    bound = lam * (1 + REL_TOL)
    total = 0
    for line in spectrum.lines:
        v = s * line.eigenvalue
        if 0 < v <= bound:
            total += line.multiplicity
    return total


def symmetry_defect(spectrum: Spectrum) -> list[tuple[float, int]]:
    """``(lam, m(lam) - m(-lam))`` for every ``lam > 0`` where the two differ."""
    buckets: list[list] = []  # [abs line representative, m_plus, m_minus]
    for line in sorted(spectrum.lines, key=lambda ln: (abs(ln.eigenvalue), ln.eigenvalue)):
        rep = SpectralLine(abs(line.eigenvalue), 1, abs(line.exact) if line.exact is not None else None)
        if buckets and buckets[-1][0].same_eigenvalue(rep):
            bucket = buckets[-1]
        else:
            bucket = [rep, 0, 0]
            buckets.append(bucket)
        bucket[1 if line.eigenvalue > 0 else 2] += line.multiplicity
    return [(b[0].eigenvalue, b[1] - b[2]) for b in buckets if b[1] != b[2]]


# -- serialization -------------------------------------------------------


def _shell_to_json(shell):
    if shell is None:
        return None
    if isinstance(shell, Fraction):
        return str(shell)
    return float(shell)


def _shell_from_json(value):
    if value is None:
        return None
    if isinstance(value, str):
        return Fraction(value)
    return float(value)


def spectrum_to_dict(spectrum: Spectrum) -> dict:
    d = spectrum.descriptor
    lines = []
    for line in spectrum.lines:
        entry = {
            "lambda_exact": None if line.exact is None else str(line.exact),
            "lambda_float": line.eigenvalue,
            "multiplicity": line.multiplicity,
        }
        if line.shell is not None:
            entry["shell_norm_sq"] = _shell_to_json(line.shell)
        lines.append(entry)
    return {
        "family": d.family,
        "n": d.n,
        "label": d.label,
        "volume": d.volume,
        "volume_exact": None if d.volume_exact is None else str(d.volume_exact),
        "betti": list(d.betti),
        "truncation": spectrum.truncation,
        "approximate": spectrum.approximate,
        "kernel": "infinite",
        "lines": lines,
    }


def spectrum_from_dict(data: dict) -> Spectrum:
    try:
        vol_exact = data.get("volume_exact")
        descriptor = ManifoldDescriptor(
            family=data["family"],
            n=int(data["n"]),
            volume=float(data["volume"]),
            betti=tuple(data["betti"]),
            volume_exact=None if vol_exact is None else ExactReal.parse(vol_exact),
            label=data.get("label", ""),
        )
        lines = []
        for entry in data["lines"]:
            exact = entry.get("lambda_exact")
            lines.append(
                SpectralLine(
                    float(entry["lambda_float"]),
                    entry["multiplicity"],
                    None if exact is None else ExactReal.parse(exact),
                    _shell_from_json(entry.get("shell_norm_sq")),
                )
            )
        truncation = float(data["truncation"])
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError(f"malformed spectrum record: {exc}") from exc
    return validate_spectrum(lines, descriptor, truncation, bool(data.get("approximate", False)))


def spectrum_to_json(spectrum: Spectrum, **extra) -> str:
    payload = spectrum_to_dict(spectrum)
    payload.update(extra)
    return json.dumps(payload, indent=2)


def spectrum_from_json(text: str) -> Spectrum:
    return spectrum_from_dict(json.loads(text))


def spectrum_to_csv(spectrum: Spectrum | Sequence[SpectralLine]) -> str:
    lines = spectrum.lines if isinstance(spectrum, Spectrum) else spectrum
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["lambda", "multiplicity"])
    for line in lines:
        writer.writerow([repr(line.eigenvalue), line.multiplicity])
    return buf.getvalue()
