"""Dense functions on the grid (Z/p)^D and their line-wise transforms.

A grid function is a flat complex128 table of length p^D indexed by
index(x) = sum_j x_j * p^(D-j), i.e. x_1 is the most significant digit.
Translations, conditional expectations along a line direction v, and the
direction-wise Fourier transform all reduce to index permutations of this
table, which are cached per (p, D, v).

All functions here are pure: inputs are never mutated and the value arrays
of returned objects are marked read-only, so instances can be shared freely
across threads.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .fpcore import PrimeCtx, ep_table, reduce_vector

__all__ = [
    "GridFunction",
    "PhaseFunction",
    "SubsetMask",
    "GridParseError",
    "conditional_expectation",
    "fourier_along",
    "fourier_reconstruct",
    "line_matrix",
    "write_grid",
    "read_grid",
    "write_phase",
    "read_phase",
    "write_mask",
    "read_mask",
]


@lru_cache(maxsize=32)
def coords_table(p: int, D: int) -> np.ndarray:
    """(p^D, D) int64 table mapping flat index -> coordinate vector."""
    n = p**D
    out = np.stack(np.unravel_index(np.arange(n), (p,) * D), axis=1).astype(np.int64)
    out.setflags(write=False)
    return out


def encode_points(coords: np.ndarray, p: int, D: int) -> np.ndarray:
    """Inverse of coords_table: coordinate rows -> flat indices."""
    return np.ravel_multi_index(tuple(coords[:, j] for j in range(D)), (p,) * D)


@lru_cache(maxsize=256)
def translation_perm(p: int, D: int, w: tuple[int, ...]) -> np.ndarray:
    """Permutation perm with g[i] = f[perm[i]] realizing g(x) = f(x + w)."""
    if len(w) != D:
        raise ValueError(f"translation vector has {len(w)} coordinates, expected {D}")
    coords = coords_table(p, D)
    shifted = (coords + np.asarray(w, dtype=np.int64)) % p
    perm = encode_points(shifted, p, D)
    perm.setflags(write=False)
    return perm


@lru_cache(maxsize=64)
def line_layout(p: int, D: int, v: tuple[int, ...]) -> tuple[np.ndarray, np.ndarray]:
    """Grid-to-line-major permutation for the direction v (nonzero mod p).

    Returns (perm, inv).  values[perm].reshape(L, p) lists each coset of
    span{v} as one row, parameterized so that column n holds the value at
    rep + v*n; inv undoes the reordering.
    """
    coords = coords_table(p, D)
    vv = np.asarray(v, dtype=np.int64)
    pivot = next(j for j in range(D) if v[j] != 0)
    inv_pivot = pow(int(v[pivot]), p - 2, p)
    n = (coords[:, pivot] * inv_pivot) % p
    reps = (coords - np.outer(n, vv)) % p
    rep_idx = encode_points(reps, p, D)
    perm = np.lexsort((n, rep_idx))
    inv = np.argsort(perm)
    perm.setflags(write=False)
    inv.setflags(write=False)
    return perm, inv


def _check_direction(v, p: int, D: int) -> tuple[int, ...]:
    if len(v) != D:
        raise ValueError(f"direction has {len(v)} coordinates, expected {D}")
    vr = reduce_vector(tuple(v), p)
    if all(c == 0 for c in vr):
        raise ValueError(f"direction {tuple(v)} vanishes mod {p}")
    return vr


class GridFunction:
    """A complex-valued function on (Z/p)^D stored as a flat table."""

    __slots__ = ("p", "D", "values")

    def __init__(self, p: int, D: int, values: np.ndarray):
        PrimeCtx(p)
        if D < 1:
            raise ValueError(f"dimension D = {D} must be >= 1")
        vals = np.asarray(values, dtype=np.complex128).reshape(-1).copy()
        if vals.size != p**D:
            raise ValueError(f"expected {p**D} values for p={p}, D={D}, got {vals.size}")
        vals.setflags(write=False)
        self.p = p
        self.D = D
        self.values = vals

    # -- constructors ------------------------------------------------------

    @staticmethod
    def constant(p: int, D: int, c: complex = 1.0) -> "GridFunction":
        return GridFunction(p, D, np.full(p**D, c, dtype=np.complex128))

    @staticmethod
    def from_point_values(p: int, D: int, mapping) -> "GridFunction":
        """Build from a dict {coord tuple: value}; unset points are 0."""
        vals = np.zeros(p**D, dtype=np.complex128)
        for x, c in mapping.items():
            vals[_point_index(x, p, D)] = c
        return GridFunction(p, D, vals)

    # -- basic structure -----------------------------------------------------

    @property
    def size(self) -> int:
        return self.values.size

    def as_nd(self) -> np.ndarray:
        return self.values.reshape((self.p,) * self.D)

    def at(self, x) -> complex:
        return complex(self.values[_point_index(x, self.p, self.D)])

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def is_one_bounded(self, tol: float = 1e-12) -> bool:
        return self.sup_norm() <= 1.0 + tol

    def mean(self) -> complex:
        return complex(self.values.mean())

    def l2_norm(self) -> float:
        """Normalized L^2 norm (E |f|^2)^(1/2)."""
        return float(np.sqrt(np.mean(np.abs(self.values) ** 2)))

    def translated(self, w) -> "GridFunction":
        """The function x -> f(x + w)."""
        wr = reduce_vector(tuple(w), self.p)
        perm = translation_perm(self.p, self.D, wr)
        return GridFunction(self.p, self.D, self.values[perm])

    def conj(self) -> "GridFunction":
        return GridFunction(self.p, self.D, np.conj(self.values))

    def __mul__(self, other: "GridFunction") -> "GridFunction":
        self._check_same_grid(other)
        return GridFunction(self.p, self.D, self.values * other.values)

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        self._check_same_grid(other)
        return GridFunction(self.p, self.D, self.values - other.values)

    def __add__(self, other: "GridFunction") -> "GridFunction":
        self._check_same_grid(other)
        return GridFunction(self.p, self.D, self.values + other.values)

    def _check_same_grid(self, other: "GridFunction") -> None:
        if (self.p, self.D) != (other.p, other.D):
            raise ValueError(
                f"grid mismatch: (p={self.p}, D={self.D}) vs (p={other.p}, D={other.D})"
            )

    def __repr__(self) -> str:
        return f"GridFunction(p={self.p}, D={self.D})"


def _point_index(x, p: int, D: int) -> int:
    xt = tuple(int(c) % p for c in x)
    if len(xt) != D:
        raise ValueError(f"point has {len(xt)} coordinates, expected {D}")
    idx = 0
    for c in xt:
        idx = idx * p + c
    return idx


class PhaseFunction:
    """A residue-valued table on the grid, used as x -> e_p(phi(x) * ...)."""

    __slots__ = ("p", "D", "values")

    def __init__(self, p: int, D: int, values: np.ndarray):
        PrimeCtx(p)
        if D < 1:
            raise ValueError(f"dimension D = {D} must be >= 1")
        vals = np.asarray(values, dtype=np.int64).reshape(-1) % p
        if vals.size != p**D:
            raise ValueError(f"expected {p**D} values for p={p}, D={D}, got {vals.size}")
        vals.setflags(write=False)
        self.p = p
        self.D = D
        self.values = vals

    @staticmethod
    def zero(p: int, D: int) -> "PhaseFunction":
        return PhaseFunction(p, D, np.zeros(p**D, dtype=np.int64))

    def translated(self, w) -> "PhaseFunction":
        wr = reduce_vector(tuple(w), self.p)
        perm = translation_perm(self.p, self.D, wr)
        return PhaseFunction(self.p, self.D, self.values[perm])

    def __repr__(self) -> str:
        return f"PhaseFunction(p={self.p}, D={self.D})"


class SubsetMask:
    """A 0/1 indicator on the grid."""

    __slots__ = ("p", "D", "bits")

    def __init__(self, p: int, D: int, bits: np.ndarray):
        PrimeCtx(p)
        if D < 1:
            raise ValueError(f"dimension D = {D} must be >= 1")
        b = np.asarray(bits).reshape(-1).astype(bool)
        if b.size != p**D:
            raise ValueError(f"expected {p**D} bits for p={p}, D={D}, got {b.size}")
        b.setflags(write=False)
        self.p = p
        self.D = D
        self.bits = b

    @staticmethod
    def full(p: int, D: int) -> "SubsetMask":
        return SubsetMask(p, D, np.ones(p**D, dtype=bool))

    @staticmethod
    def empty(p: int, D: int) -> "SubsetMask":
        return SubsetMask(p, D, np.zeros(p**D, dtype=bool))

    @staticmethod
    def from_points(p: int, D: int, points) -> "SubsetMask":
        bits = np.zeros(p**D, dtype=bool)
        for x in points:
            bits[_point_index(x, p, D)] = True
        return SubsetMask(p, D, bits)

    def density(self) -> float:
        return float(self.bits.mean())

    def contains(self, x) -> bool:
        return bool(self.bits[_point_index(x, self.p, self.D)])

    def indicator(self) -> GridFunction:
        return GridFunction(self.p, self.D, self.bits.astype(np.complex128))

    def translated(self, w) -> "SubsetMask":
        wr = reduce_vector(tuple(w), self.p)
        perm = translation_perm(self.p, self.D, wr)
        return SubsetMask(self.p, self.D, self.bits[perm])

    def __repr__(self) -> str:
        return f"SubsetMask(p={self.p}, D={self.D}, density={self.density():.3f})"


# ---------------------------------------------------------------------------
# directional averaging and Fourier analysis
# ---------------------------------------------------------------------------


def line_matrix(f: GridFunction, v) -> np.ndarray:
    """(L, p) view of f: row = coset of span{v}, column n = value at rep + v*n."""
    vr = _check_direction(v, f.p, f.D)
    perm, _ = line_layout(f.p, f.D, vr)
    return f.values[perm].reshape(-1, f.p)


def conditional_expectation(f: GridFunction, v) -> GridFunction:
    """E(f | V)(x) = E_n f(x + v*n), constant along each coset of V = span{v}."""
    vr = _check_direction(v, f.p, f.D)
    perm, inv = line_layout(f.p, f.D, vr)
    rows = f.values[perm].reshape(-1, f.p)
    means = rows.mean(axis=1)
    spread = np.repeat(means, f.p)[inv]
    return GridFunction(f.p, f.D, spread)


def _line_through(f: GridFunction, x, v) -> np.ndarray:
    """Values [f(x + v*n) for n in 0..p-1]."""
    p, D = f.p, f.D
    vr = _check_direction(v, p, D)
    xt = tuple(int(c) % p for c in x)
    if len(xt) != D:
        raise ValueError(f"point has {len(xt)} coordinates, expected {D}")
    idx = np.zeros(p, dtype=np.int64)
    ns = np.arange(p)
    for j in range(D):
        idx = idx * p + (xt[j] + vr[j] * ns) % p
    return f.values[idx]


def fourier_along(f: GridFunction, x, v, k: int) -> complex:
    """Directional Fourier coefficient E_n f(x + v*n) e_p(-k*n), anchored at x."""
    line = _line_through(f, x, v)
    roots = ep_table(f.p)
    return complex(np.mean(line * np.conj(roots[(k % f.p) * np.arange(f.p) % f.p])))


def fourier_line(f: GridFunction, x, v) -> np.ndarray:
    """All p directional Fourier coefficients at anchor x, index = frequency."""
    line = _line_through(f, x, v)
    p = f.p
    w = ep_table(p)[(np.outer(np.arange(p), np.arange(p)) % p)]
    return (np.conj(w) @ line) / p


def fourier_reconstruct(f: GridFunction, x, v, n: int) -> complex:
    """Resynthesize f(x + v*n) as sum_k fhat(x; v; k) e_p(k*n)."""
    coeffs = fourier_line(f, x, v)
    roots = ep_table(f.p)
    return complex(np.sum(coeffs * roots[(np.arange(f.p) * (n % f.p)) % f.p]))


# ---------------------------------------------------------------------------
# text serialization
# ---------------------------------------------------------------------------


class GridParseError(ValueError):
    """Raised for malformed grid files; carries the 1-based offending line."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


_MAGICS = {"gridfn": "gridfn", "phase": "phase", "mask": "mask"}


def _write_header(fh, magic: str, p: int, D: int) -> None:
    fh.write(f"{magic} 1\n")
    fh.write(f"p={p} D={D}\n")


def _read_header(lines: list[str], magic: str) -> tuple[int, int]:
    if not lines or not lines[0].strip():
        raise GridParseError("missing header", 1)
    head = lines[0].split()
    if len(head) != 2 or head[0] != magic:
        raise GridParseError(f"expected header {magic!r} <version>, got {lines[0].strip()!r}", 1)
    if head[1] != "1":
        raise GridParseError(f"unsupported version {head[1]!r}", 1)
    if len(lines) < 2:
        raise GridParseError("missing size line 'p=<p> D=<D>'", 2)
    fields = dict()
    for tok in lines[1].split():
        if "=" not in tok:
            raise GridParseError(f"bad size token {tok!r}", 2)
        key, _, val = tok.partition("=")
        fields[key] = val
    try:
        p = int(fields["p"])
        D = int(fields["D"])
    except (KeyError, ValueError):
        raise GridParseError(f"size line must read 'p=<p> D=<D>', got {lines[1].strip()!r}", 2) from None
    try:
        PrimeCtx(p)
    except ValueError as exc:
        raise GridParseError(str(exc), 2) from None
    if D < 1:
        raise GridParseError(f"D = {D} must be >= 1", 2)
    return p, D


def _payload_lines(lines: list[str], expected: int) -> list[tuple[int, str]]:
    body = [(i + 1, s.strip()) for i, s in enumerate(lines[2:], start=2) if s.strip()]
    if len(body) != expected:
        where = body[expected][0] if len(body) > expected else len(lines) + 1
        raise GridParseError(f"expected {expected} value lines, found {len(body)}", where)
    return body


def write_grid(f: GridFunction, path: str) -> None:
    """Write the .gridfn text format: header, size line, then re/im pairs.

    Floats are printed with 17 significant digits so read_grid(write_grid(f))
    reproduces the table bit for bit.
    """
    with open(path, "w") as fh:
        _write_header(fh, "gridfn", f.p, f.D)
        for z in f.values:
            fh.write(f"{z.real:.17g} {z.imag:.17g}\n")


def read_grid(path: str) -> GridFunction:
    with open(path) as fh:
        lines = fh.read().splitlines()
    p, D = _read_header(lines, "gridfn")
    vals = np.empty(p**D, dtype=np.complex128)
    for slot, (lineno, text) in enumerate(_payload_lines(lines, p**D)):
        parts = text.split()
        if len(parts) != 2:
            raise GridParseError(f"expected '<re> <im>', got {text!r}", lineno)
        try:
            vals[slot] = complex(float(parts[0]), float(parts[1]))
        except ValueError:
            raise GridParseError(f"bad float in {text!r}", lineno) from None
    return GridFunction(p, D, vals)


def write_phase(phi: PhaseFunction, path: str) -> None:
    with open(path, "w") as fh:
        _write_header(fh, "phase", phi.p, phi.D)
        for r in phi.values:
            fh.write(f"{int(r)}\n")


def read_phase(path: str) -> PhaseFunction:
    with open(path) as fh:
        lines = fh.read().splitlines()
    p, D = _read_header(lines, "phase")
    vals = np.empty(p**D, dtype=np.int64)
    for slot, (lineno, text) in enumerate(_payload_lines(lines, p**D)):
        try:
            r = int(text)
        except ValueError:
            raise GridParseError(f"bad residue {text!r}", lineno) from None
        if not 0 <= r < p:
            raise GridParseError(f"residue {r} out of range [0, {p})", lineno)
        vals[slot] = r
    return PhaseFunction(p, D, vals)


def write_mask(mask: SubsetMask, path: str) -> None:
    with open(path, "w") as fh:
        _write_header(fh, "mask", mask.p, mask.D)
        for b in mask.bits:
            fh.write(f"{int(b)}\n")


def read_mask(path: str) -> SubsetMask:
    with open(path) as fh:
        lines = fh.read().splitlines()
    p, D = _read_header(lines, "mask")
    bits = np.empty(p**D, dtype=bool)
    for slot, (lineno, text) in enumerate(_payload_lines(lines, p**D)):
        if text not in ("0", "1"):
            raise GridParseError(f"mask bit must be 0 or 1, got {text!r}", lineno)
        bits[slot] = text == "1"
    return SubsetMask(p, D, bits)
