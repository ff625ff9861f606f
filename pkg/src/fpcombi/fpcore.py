"""Prime-field scalars, integer polynomials, and the shift-symbol ring.

Everything downstream works over Z/p for an odd prime p.  Grid points are
plain tuples of residues; polynomials in the group variable y are kept with
exact integer coefficients (ascending order, index = degree) and only reduced
mod p at evaluation time.  ``BivarPoly`` extends this with one formal shift
symbol h, i.e. elements of Z[y, h], which the descent engine in ``pet`` uses
to reason about generic shifts without committing to an integer value.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from functools import lru_cache
from math import comb, isqrt

import numpy as np

__all__ = [
    "PrimeCtx",
    "IntPoly",
    "BivarPoly",
    "is_prime",
    "primes_between",
    "ep",
    "ep_table",
    "poly_shift",
    "poly_partial",
    "reduce_vector",
]


def is_prime(n: int) -> bool:
    """Trial-division primality check, adequate for the supported p <= 10**4."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    for d in range(3, isqrt(n) + 1, 2):
        if n % d == 0:
            return False
    return True


def primes_between(lo: int, hi: int) -> list[int]:
    """All primes q with lo <= q <= hi, ascending."""
    return [q for q in range(max(lo, 2), hi + 1) if is_prime(q)]


@dataclass(frozen=True)
class PrimeCtx:
    """An odd prime modulus p >= 3.

    Construction fails loudly for composite or even p so that every later
    computation can assume Z/p is a field of odd characteristic.
    """

    p: int

    def __post_init__(self) -> None:
        if not isinstance(self.p, int):
            raise ValueError(f"modulus must be an int, got {type(self.p).__name__}")
        if not is_prime(self.p):
            raise ValueError(f"p = {self.p} is not prime")
        if self.p < 3:
            raise ValueError(f"p = {self.p} must be an odd prime >= 3")

    def inverse(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ValueError(f"0 has no inverse mod {self.p}")
        return pow(a, self.p - 2, self.p)


def ep(a: int, p: int) -> complex:
    """The additive character value exp(2*pi*i*a/p)."""
    return cmath.exp(2j * cmath.pi * (a % p) / p)


@lru_cache(maxsize=64)
def ep_table(p: int) -> np.ndarray:
    """Length-p lookup table t with t[r] = exp(2*pi*i*r/p).  Read-only."""
    t = np.exp(2j * np.pi * np.arange(p) / p)
    t.setflags(write=False)
    return t


def reduce_vector(v: tuple[int, ...] | list[int], p: int) -> tuple[int, ...]:
    """Reduce an integer vector coordinatewise into [0, p)."""
    return tuple(int(c) % p for c in v)


# ---------------------------------------------------------------------------
# integer polynomials in one variable
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IntPoly:
    """A polynomial in y with integer coefficients, ascending order.

    The stored tuple is normalized: either empty (the zero polynomial) or its
    last entry is nonzero.  Degree of the zero polynomial is -1 by convention,
    so "nonconstant" is exactly degree >= 1.
    """

    coeffs: tuple[int, ...]

    def __post_init__(self) -> None:
        cs = tuple(int(c) for c in self.coeffs)
        while cs and cs[-1] == 0:
            cs = cs[:-1]
        object.__setattr__(self, "coeffs", cs)

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero() -> "IntPoly":
        return IntPoly(())

    @staticmethod
    def const(c: int) -> "IntPoly":
        return IntPoly((c,))

    @staticmethod
    def monomial(degree: int, c: int = 1) -> "IntPoly":
        if degree < 0:
            raise ValueError("monomial degree must be >= 0")
        return IntPoly((0,) * degree + (c,))

    @staticmethod
    def parse(text: str) -> "IntPoly":
        """Parse the comma-separated ascending-coefficient literal, e.g. "0,0,1" = y^2."""
        parts = [s.strip() for s in text.split(",")]
        try:
            return IntPoly(tuple(int(s) for s in parts))
        except ValueError as exc:
            raise ValueError(f"bad polynomial literal {text!r}: {exc}") from None

    # -- structure ---------------------------------------------------------

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    @property
    def leading_coefficient(self) -> int:
        if not self.coeffs:
            return 0
        return self.coeffs[-1]

    def literal(self) -> str:
        if not self.coeffs:
            return "0"
        return ",".join(str(c) for c in self.coeffs)

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for k in range(self.degree, -1, -1):
            c = self.coeffs[k] if k < len(self.coeffs) else 0
            if c == 0:
                continue
            if k == 0:
                parts.append(f"{c}")
            else:
                mono = "y" if k == 1 else f"y^{k}"
                if c == 1:
                    parts.append(mono)
                elif c == -1:
                    parts.append(f"-{mono}")
                else:
                    parts.append(f"{c}*{mono}")
        out = parts[0]
        for s in parts[1:]:
            out += f" - {s[1:]}" if s.startswith("-") else f" + {s}"
        return out

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other: "IntPoly") -> "IntPoly":
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        return IntPoly(tuple((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)))

    def __sub__(self, other: "IntPoly") -> "IntPoly":
        return self + (-other)

    def __neg__(self) -> "IntPoly":
        return IntPoly(tuple(-c for c in self.coeffs))

    def __mul__(self, other: "IntPoly | int") -> "IntPoly":
        if isinstance(other, int):
            return IntPoly(tuple(c * other for c in self.coeffs))
        out = [0] * (len(self.coeffs) + len(other.coeffs))
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return IntPoly(tuple(out))

    __rmul__ = __mul__

    # -- evaluation and shifts ----------------------------------------------

    def eval_mod(self, y: int, p: int) -> int:
        """P(y) mod p by Horner's rule in exact integers."""
        acc = 0
        for c in reversed(self.coeffs):
            acc = (acc * y + c) % p
        return acc

    def eval_mod_all(self, p: int) -> np.ndarray:
        """Residue table [P(0) mod p, ..., P(p-1) mod p] as int64."""
        ys = np.arange(p, dtype=np.int64)
        acc = np.zeros(p, dtype=np.int64)
        for c in reversed(self.coeffs):
            acc = (acc * ys + c % p) % p
        return acc

    def shift(self, k: int) -> "IntPoly":
        """The composed polynomial P(y + k)."""
        out = [0] * len(self.coeffs)
        for a, c in enumerate(self.coeffs):
            if c == 0:
                continue
            for j in range(a + 1):
                out[j] += c * comb(a, j) * k ** (a - j)
        return IntPoly(tuple(out))

    def partial(self, k: int) -> "IntPoly":
        """The difference P(y) - P(y + k)."""
        return self - self.shift(k)

    def reduced_degree(self, p: int) -> int:
        """Degree of P mod p after dropping p-divisible leading coefficients (-1 if P = 0 mod p)."""
        d = -1
        for i, c in enumerate(self.coeffs):
            if c % p != 0:
                d = i
        return d


# ---------------------------------------------------------------------------
# polynomials in (y, h) with exact integer coefficients
# ---------------------------------------------------------------------------


class BivarPoly:
    """An element of Z[y, h]: integer coefficients over monomials y^a * h^b.

    h plays the role of a generic shift amount.  Terms are held in a dict
    keyed by (a, b) with zero coefficients removed, so equality of dicts is
    equality of polynomials.  Instances are immutable by convention; all
    operations return fresh objects.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: dict[tuple[int, int], int] | None = None):
        clean: dict[tuple[int, int], int] = {}
        if terms:
            for (a, b), c in terms.items():
                c = int(c)
                if c != 0:
                    clean[(int(a), int(b))] = c
        self.terms = clean

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero() -> "BivarPoly":
        return BivarPoly()

    @staticmethod
    def const(c: int) -> "BivarPoly":
        return BivarPoly({(0, 0): c})

    @staticmethod
    def y() -> "BivarPoly":
        return BivarPoly({(1, 0): 1})

    @staticmethod
    def h() -> "BivarPoly":
        return BivarPoly({(0, 1): 1})

    @staticmethod
    def from_int_poly(poly: IntPoly) -> "BivarPoly":
        return BivarPoly({(a, 0): c for a, c in enumerate(poly.coeffs)})

    # -- structure ---------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def y_degree(self) -> int:
        """Largest power of y with a nonzero coefficient (-1 for the zero polynomial)."""
        if not self.terms:
            return -1
        return max(a for a, _ in self.terms)

    @property
    def is_y_constant(self) -> bool:
        """True when no monomial involves y (h-only content still counts as constant)."""
        return self.y_degree <= 0

    @property
    def max_abs_coefficient(self) -> int:
        if not self.terms:
            return 0
        return max(abs(c) for c in self.terms.values())

    def leading_y_coefficient(self) -> "BivarPoly":
        """The coefficient of y^deg as a polynomial in h alone (zero poly for zero input)."""
        d = self.y_degree
        if d < 0:
            return BivarPoly()
        return BivarPoly({(0, b): c for (a, b), c in self.terms.items() if a == d})

    def h_degree(self) -> int:
        if not self.terms:
            return -1
        return max(b for _, b in self.terms)

    def sort_key(self) -> tuple:
        """Deterministic total-order key: y-degree first, then the sorted term list."""
        return (self.y_degree, tuple(sorted((a, b, c) for (a, b), c in self.terms.items())))

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other: "BivarPoly") -> "BivarPoly":
        out = dict(self.terms)
        for key, c in other.terms.items():
            out[key] = out.get(key, 0) + c
        return BivarPoly(out)

    def __sub__(self, other: "BivarPoly") -> "BivarPoly":
        out = dict(self.terms)
        for key, c in other.terms.items():
            out[key] = out.get(key, 0) - c
        return BivarPoly(out)

    def __neg__(self) -> "BivarPoly":
        return BivarPoly({key: -c for key, c in self.terms.items()})

    def __mul__(self, other: "BivarPoly | int") -> "BivarPoly":
        if isinstance(other, int):
            return BivarPoly({key: c * other for key, c in self.terms.items()})
        out: dict[tuple[int, int], int] = {}
        for (a1, b1), c1 in self.terms.items():
            for (a2, b2), c2 in other.terms.items():
                key = (a1 + a2, b1 + b2)
                out[key] = out.get(key, 0) + c1 * c2
        return BivarPoly(out)

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BivarPoly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    # -- substitution ------------------------------------------------------

    def shift_y(self, amount: "int | str") -> "BivarPoly":
        """Substitute y -> y + amount, where amount is an int or the symbol "h"."""
        out: dict[tuple[int, int], int] = {}
        symbolic = amount == "h"
        if not symbolic and not isinstance(amount, int):
            raise ValueError(f'shift amount must be an int or "h", got {amount!r}')
        for (a, b), c in self.terms.items():
            for j in range(a + 1):
                w = c * comb(a, j)
                if symbolic:
                    key = (j, b + a - j)
                else:
                    w *= amount ** (a - j)
                    key = (j, b)
                if w:
                    out[key] = out.get(key, 0) + w
        return BivarPoly(out)

    def y_positive_part(self) -> "BivarPoly":
        """Drop every term of y-degree zero, keeping the y-dependent shape."""
        return BivarPoly({(a, b): c for (a, b), c in self.terms.items() if a >= 1})

    def subst_h(self, value: int) -> "BivarPoly":
        """Substitute a concrete integer for h."""
        out: dict[tuple[int, int], int] = {}
        for (a, b), c in self.terms.items():
            w = c * value**b
            if w:
                out[(a, 0)] = out.get((a, 0), 0) + w
        return BivarPoly(out)

    def to_int_poly(self) -> IntPoly:
        if any(b for _, b in self.terms):
            raise ValueError(f"{self} still involves h")
        d = self.y_degree
        coeffs = [0] * (d + 1)
        for (a, _), c in self.terms.items():
            coeffs[a] = c
        return IntPoly(tuple(coeffs))

    # -- printing ----------------------------------------------------------

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        def mono(a: int, b: int) -> str:
            ys = "" if a == 0 else ("y" if a == 1 else f"y^{a}")
            hs = "" if b == 0 else ("h" if b == 1 else f"h^{b}")
            if ys and hs:
                return f"{hs}*{ys}"
            return ys or hs
        keys = sorted(self.terms, key=lambda k: (-k[0], -k[1]))
        parts = []
        for a, b in keys:
            c = self.terms[(a, b)]
            m = mono(a, b)
            if not m:
                parts.append(str(c))
            elif c == 1:
                parts.append(m)
            elif c == -1:
                parts.append(f"-{m}")
            else:
                parts.append(f"{c}*{m}")
        out = parts[0]
        for s in parts[1:]:
            out += f" - {s[1:]}" if s.startswith("-") else f" + {s}"
        return out

    def __repr__(self) -> str:
        return f"BivarPoly({self})"


def poly_shift(poly: "IntPoly | BivarPoly", k: "int | str") -> "IntPoly | BivarPoly":
    """P(y + k).  Integer k keeps an IntPoly in Z[y]; k = "h" lands in Z[y, h]."""
    as_bivar = poly if isinstance(poly, BivarPoly) else BivarPoly.from_int_poly(poly)
    if k == "h":
        return as_bivar.shift_y("h")
    if isinstance(k, int):
        return poly.shift(k) if isinstance(poly, IntPoly) else as_bivar.shift_y(k)
    raise ValueError(f'shift amount must be an int or "h", got {k!r}')


def poly_partial(poly: "IntPoly | BivarPoly", k: "int | str") -> "IntPoly | BivarPoly":
    """The difference P(y) - P(y + k), mirroring poly_shift's symbolic mode."""
    if isinstance(poly, IntPoly) and isinstance(k, int):
        return poly.partial(k)
    as_bivar = poly if isinstance(poly, BivarPoly) else BivarPoly.from_int_poly(poly)
    return as_bivar - poly_shift(as_bivar, k)
