"""Curl spectrum of flat tori R^n / Gamma.

A number ``lam != 0`` is a curl eigenvalue iff ``|lam| = 2*pi*|mu|`` for
some ``mu`` in the dual lattice; its multiplicity is
``binom(n-1, (n-1)/2) / 2`` times the number of dual vectors of that norm.

Bases with rational entries (ints, ``Fraction`` or numeric strings) are
handled exactly: squared norms are rationals and shells are grouped by
equality.  Float bases fall back to clustering norms with a relative
tolerance and mark the result approximate.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb, lcm
from pathlib import Path

import numpy as np

from .errors import ShellCapError, ValidationError
from .exact import REL_TOL, ExactReal
from .spectrum import ManifoldDescriptor, SpectralLine, Spectrum, validate_spectrum

__all__ = [
    "LatticeBasis",
    "ShellTable",
    "dual_lattice",
    "gram_matrix",
    "enumerate_shells",
    "torus_spectrum",
    "torus_descriptor",
    "curl_factor",
    "lattice_from_json",
    "lattice_to_json",
    "brute_force_count",
    "load_lattice",
    "identity_basis",
    "DEFAULT_MAX_VECTORS",
    "MAX_CONDITION",
]

DEFAULT_MAX_VECTORS = 50_000_000
MAX_CONDITION = 1e12
# Float slack for the branch-and-bound; exact filtering happens afterwards.
_FP_SLACK = 1e-7
_INT64_SAFE = 2**62


def _entry(x):
    if isinstance(x, bool):
        raise ValidationError("boolean lattice entry")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValidationError(f"bad lattice entry {x!r}") from exc
    if isinstance(x, (float, np.floating)):
        if not math.isfinite(x):
            raise ValidationError(f"non-finite lattice entry {x!r}")
        return float(x)
    if isinstance(x, np.integer):
        return Fraction(int(x))
    raise ValidationError(f"unsupported lattice entry type {type(x).__name__}")


def _det_fraction(m: list[list[Fraction]]) -> Fraction:
    a = [row[:] for row in m]
    n = len(a)
    det = Fraction(1)
    for c in range(n):
        pivot = next((r for r in range(c, n) if a[r][c] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != c:
            a[c], a[pivot] = a[pivot], a[c]
            det = -det
        det *= a[c][c]
        for r in range(c + 1, n):
            f = a[r][c] / a[c][c]
            if f:
                for k in range(c, n):
                    a[r][k] -= f * a[c][k]
    return det


def _inverse_fraction(m: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(m)
    a = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for c in range(n):
        pivot = next((r for r in range(c, n) if a[r][c] != 0), None)
        if pivot is None:
            raise ValidationError("singular lattice basis")
        a[c], a[pivot] = a[pivot], a[c]
        inv_p = 1 / a[c][c]
        a[c] = [v * inv_p for v in a[c]]
        for r in range(n):
            if r != c and a[r][c] != 0:
                f = a[r][c]
                a[r] = [vr - f * vc for vr, vc in zip(a[r], a[c])]
    return [row[n:] for row in a]


@dataclass(frozen=True)
class LatticeBasis:
    """Rows generate the lattice.  ``exact`` is True iff every entry is rational."""

    rows: tuple[tuple, ...]

    def __post_init__(self):
        rows = tuple(tuple(_entry(x) for x in row) for row in self.rows)
        n = len(rows)
        if n < 3 or n % 2 == 0:
            raise ValidationError(f"lattice dimension must be odd and >= 3, got {n}")
        if any(len(r) != n for r in rows):
            raise ValidationError("lattice basis must be square")
        if not all(isinstance(x, Fraction) for r in rows for x in r):
            rows = tuple(tuple(float(x) for x in r) for r in rows)
        object.__setattr__(self, "rows", rows)
        if self.volume_float == 0:
            raise ValidationError("singular lattice basis")

    @property
    def n(self) -> int:
        return len(self.rows)

    @property
    def exact(self) -> bool:
        return isinstance(self.rows[0][0], Fraction)

    def as_array(self) -> np.ndarray:
        return np.array([[float(x) for x in r] for r in self.rows])

    @property
    def determinant(self) -> Fraction | float:
        if self.exact:
            return _det_fraction([list(r) for r in self.rows])
        return float(np.linalg.det(self.as_array()))

    @property
    def volume_float(self) -> float:
        return abs(float(self.determinant))

    @property
    def volume_exact(self) -> ExactReal | None:
        return ExactReal(abs(self.determinant)) if self.exact else None

    def scaled(self, c) -> "LatticeBasis":
        return LatticeBasis(tuple(tuple(c * x for x in r) for r in self.rows))


def identity_basis(n: int) -> LatticeBasis:
    return LatticeBasis(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))


def gram_matrix(basis: LatticeBasis):
    """``B B^T``, as Fractions for exact bases and a float array otherwise."""
    if basis.exact:
        r = basis.rows
        return [[sum((a * b for a, b in zip(r[i], r[j])), Fraction(0)) for j in range(basis.n)] for i in range(basis.n)]
    b = basis.as_array()
    return b @ b.T


def dual_lattice(basis: LatticeBasis, max_condition: float = MAX_CONDITION) -> LatticeBasis:
    """Basis ``B*`` of the dual lattice, with ``B* B^T = I``."""
    if basis.exact:
        inv = _inverse_fraction([list(r) for r in basis.rows])
        return LatticeBasis(tuple(tuple(inv[j][i] for j in range(basis.n)) for i in range(basis.n)))
    b = basis.as_array()
    cond = np.linalg.cond(b)
    if not np.isfinite(cond) or cond > max_condition:
        raise ValidationError(f"lattice basis is near-singular (condition number {cond:.3g})")
    return LatticeBasis(tuple(tuple(float(x) for x in row) for row in np.linalg.inv(b).T))


@dataclass(frozen=True)
class ShellTable:
    """Histogram of squared norms of nonzero lattice vectors up to ``radius_sq``."""

    entries: tuple[tuple[Fraction | float, int], ...]
    radius_sq: float
    exact: bool = True

    @property
    def approximate(self) -> bool:
        return not self.exact

    def as_dict(self) -> dict:
        return {q: c for q, c in self.entries}

    def total(self) -> int:
        return sum(c for _, c in self.entries)


def _ldl(q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Diagonal ``d`` and unit upper ``mu`` with ``x^T q x = sum_i d_i (x_i + sum_{j>i} mu_ij x_j)^2``."""
    try:
        u = np.linalg.cholesky(q).T  # q = u^T u, u upper triangular
    except np.linalg.LinAlgError as exc:
        raise ValidationError("Gram matrix is not positive definite") from exc
    d = np.diag(u) ** 2
    mu = u / np.diag(u)[:, None]
    return d, mu


def _estimate_count(gram: np.ndarray, radius_sq: float) -> float:
    n = gram.shape[0]
    covolume = math.sqrt(abs(np.linalg.det(gram)))
    ball = math.pi ** (n / 2) / math.gamma(n / 2 + 1) * radius_sq ** (n / 2)
    return ball / covolume


def _fincke_pohst(gram_f: np.ndarray, bound: float, emit) -> None:
    """Visit every integer vector with ``x^T gram x <= bound`` (float test, with slack).

    Outer coordinates are walked depth-first; the innermost coordinate is
    handed to ``emit(x_outer, lo, hi)`` as an integer range.
    """
    n = gram_f.shape[0]
    d, mu = _ldl(gram_f)
    x = [0] * n
    budget = bound * (1 + _FP_SLACK) + 1e-300

    def level(i: int, rem: float) -> None:
        center = -sum(mu[i, j] * x[j] for j in range(i + 1, n))
        half = math.sqrt(max(rem, 0.0) / d[i])
        lo = math.ceil(center - half - 1e-9)
        hi = math.floor(center + half + 1e-9)
        if i == 0:
            if lo <= hi:
                emit(x, lo, hi)
            return
        for v in range(lo, hi + 1):
            x[i] = v
            t = v - center
            r = rem - d[i] * t * t
            if r >= -1e-12 * budget:
                level(i - 1, r)
        x[i] = 0

    level(n - 1, budget)


def enumerate_shells(
    basis: LatticeBasis, R: float, max_vectors: int = DEFAULT_MAX_VECTORS
) -> ShellTable:
    """Group all nonzero lattice vectors with ``|v| <= R`` by squared norm.

    The comparison against ``R**2`` carries a relative tolerance of 1e-9 so
    that radii built from floats (e.g. ``sqrt(3)``) include their boundary
    shell.
    """
    R = float(R)
    if not R > 0:
        raise ValidationError(f"radius must be positive, got {R}")
    radius_sq = R * R
    limit = radius_sq * (1 + REL_TOL)
    n = basis.n
    gram = gram_matrix(basis)
    gram_f = np.array([[float(v) for v in row] for row in gram])

    est = _estimate_count(gram_f, limit)
    if est > max_vectors:
        raise ShellCapError(
            f"about {est:.3g} lattice vectors within radius {R}; cap is {max_vectors}"
        )

    chunks: list[np.ndarray] = []

    if basis.exact:
        den = lcm(*(v.denominator for row in gram for v in row))
        ig = [[int(v * den) for v in row] for row in gram]
        limit_int = Fraction(limit) * den
        a = ig[0][0]
        norm_bound = float(limit_int) * (1 + _FP_SLACK) + 1
        max_abs = max(abs(v) for row in ig for v in row)

        def emit(x, lo, hi):
            b = sum(ig[0][j] * x[j] for j in range(1, n))
            c = sum(ig[i][j] * x[i] * x[j] for i in range(1, n) for j in range(1, n))
            span = max(abs(lo), abs(hi))
            worst = a * span * span + 2 * abs(b) * span + abs(c) + norm_bound
            if worst < _INT64_SAFE and max_abs < _INT64_SAFE:
                xs = np.arange(lo, hi + 1, dtype=np.int64)
                vals = a * xs * xs + 2 * b * xs + c
            else:
                xs = np.arange(lo, hi + 1).astype(object)
                vals = a * xs * xs + 2 * b * xs + c
            chunks.append(vals[vals > 0])

        _fincke_pohst(gram_f, limit, emit)
        if not chunks:
            return ShellTable((), radius_sq, True)
        allvals = np.concatenate(chunks)
        if allvals.dtype == object:
            keys = sorted(set(int(v) for v in allvals))
            counts = {}
            for v in allvals:
                counts[int(v)] = counts.get(int(v), 0) + 1
            uniq = [(k, counts[k]) for k in keys]
        else:
            u, c = np.unique(allvals, return_counts=True)
            uniq = list(zip((int(v) for v in u), (int(k) for k in c)))
        entries = tuple(
            (Fraction(k, den), cnt) for k, cnt in uniq if Fraction(k) <= limit_int
        )
        return ShellTable(entries, radius_sq, True)

    def emit_f(x, lo, hi):
        xs = np.arange(lo, hi + 1, dtype=float)
        rest = np.array(x[1:], dtype=float)
        b = gram_f[0, 1:] @ rest
        c = rest @ gram_f[1:, 1:] @ rest
        vals = gram_f[0, 0] * xs * xs + 2 * b * xs + c
        nonzero = (xs != 0) | np.any(rest != 0)
        chunks.append(vals[nonzero & (vals <= limit)])

    _fincke_pohst(gram_f, limit, emit_f)
    if not chunks:
        return ShellTable((), radius_sq, False)
    vals = np.sort(np.concatenate(chunks))
    entries = []
    start = 0
    for i in range(1, len(vals) + 1):
        if i == len(vals) or vals[i] - vals[i - 1] > REL_TOL * vals[i]:
            cluster = vals[start:i]
            entries.append((float(np.mean(cluster)), int(len(cluster))))
            start = i
    return ShellTable(tuple(entries), radius_sq, False)


def curl_factor(n: int) -> int:
    """``binom(n-1, (n-1)/2) / 2``, the curl multiplicity per dual vector."""
    h = (n - 1) // 2
    c = comb(n - 1, h)
    assert c % 2 == 0
    return c // 2


def torus_descriptor(basis: LatticeBasis) -> ManifoldDescriptor:
    n = basis.n
    betti = tuple(comb(n, p) for p in range((n + 1) // 2))
    return ManifoldDescriptor("torus", n, basis.volume_float, betti, basis.volume_exact, f"T^{n}")


def torus_spectrum(
    basis: LatticeBasis, lmax: float, max_vectors: int = DEFAULT_MAX_VECTORS
) -> Spectrum:
    """Curl spectrum of ``R^n / Gamma`` for ``|lam| <= lmax``."""
    lmax = float(lmax)
    if not lmax > 0:
        raise ValidationError(f"lmax must be positive, got {lmax}")
    dual = dual_lattice(basis)
    shells = enumerate_shells(dual, lmax / (2 * math.pi), max_vectors)
    factor = curl_factor(basis.n)
    two_pi = ExactReal(2, 1)
    lines = []
    for q, count in shells.entries:
        if count % 2:
            raise AssertionError(f"odd shell count {count} at |mu|^2={q}")
        m = factor * count
        if isinstance(q, Fraction):
            lam = two_pi * ExactReal.sqrt(q)
            val = float(lam)
            lines.append(SpectralLine(val, m, lam, q))
            lines.append(SpectralLine(-val, m, -lam, q))
        else:
            val = 2 * math.pi * math.sqrt(q)
            lines.append(SpectralLine(val, m, None, q))
            lines.append(SpectralLine(-val, m, None, q))
    return validate_spectrum(lines, torus_descriptor(basis), lmax, approximate=not shells.exact)


def lattice_from_json(data: dict | str) -> LatticeBasis:
    """Parse ``{"n": 3, "rows": [["1", "0", "0"], ...]}``."""
    if isinstance(data, str):
        data = json.loads(data)
    try:
        rows = data["rows"]
        n = int(data.get("n", len(rows)))
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed lattice record: {exc}") from exc
    basis = LatticeBasis(tuple(tuple(r) for r in rows))
    if basis.n != n:
        raise ValidationError(f"declared n={n} but basis has {basis.n} rows")
    return basis


def load_lattice(spec: str | Path) -> LatticeBasis:
    """``identity<n>`` or a path to a lattice JSON file."""
    s = str(spec)
    if s.startswith("identity"):
        try:
            n = int(s[len("identity"):])
        except ValueError as exc:
            raise ValidationError(f"bad identity basis spec {s!r}") from exc
        return identity_basis(n)
    path = Path(s)
    if not path.exists():
        raise ValidationError(f"lattice file not found: {s}")
    return lattice_from_json(path.read_text())


def brute_force_count(basis: LatticeBasis, radius_sq: float) -> int:
    """Number of nonzero lattice vectors with ``|v|^2 <= radius_sq``, by box search.

    Independent of the branch-and-bound: coefficients are bounded by
    ``|x_i| <= R * |column i of B^{-1}|``.
    """
    limit = radius_sq * (1 + REL_TOL)
    R = math.sqrt(limit)
    binv = np.linalg.inv(basis.as_array())
    bounds = [int(math.floor(R * np.linalg.norm(binv[:, i]) + 1e-9)) for i in range(basis.n)]
    size = math.prod(2 * b + 1 for b in bounds)
    if size > 5 * 10**7:
        raise ShellCapError(f"brute-force box of {size} points is too large")
    axes = [np.arange(-b, b + 1) for b in bounds]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, basis.n)
    if basis.exact:
        gram = gram_matrix(basis)
        den = lcm(*(v.denominator for row in gram for v in row))
        ig = [[int(v * den) for v in row] for row in gram]
        lim = Fraction(limit) * den
        worst = max(abs(v) for row in ig for v in row) * (basis.n * max(bounds)) ** 2
        if worst < _INT64_SAFE:
            g = grid.astype(np.int64)
            norms = np.einsum("ki,ij,kj->k", g, np.array(ig, dtype=np.int64), g)
            return int(np.count_nonzero((norms > 0) & (norms <= math.floor(lim))))
        count = 0
        for row in grid.tolist():
            v = sum(ig[i][j] * row[i] * row[j] for i in range(basis.n) for j in range(basis.n))
            count += 0 < v <= lim
        return count
    vecs = grid.astype(float) @ basis.as_array()
    norms = np.einsum("ij,ij->i", vecs, vecs)
    return int(np.count_nonzero((norms > 0) & (norms <= limit)))


def lattice_to_json(basis: LatticeBasis) -> str:
    return json.dumps({"n": basis.n, "rows": [[str(x) for x in r] for r in basis.rows]})
