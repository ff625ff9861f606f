"""Counting operators for polynomial point configurations on (Z/p)^D.

A configuration is the point family

    x,  x + v_1 * P_1(y),  ...,  x + v_m * P_m(y)

for fixed directions v_i and integer polynomials P_i, with x ranging over
the grid and y over Z/p.  The two quantities of interest are the counting
average E_{x,y} f_0(x) * prod_i f_i(x + v_i P_i(y)) and its structured main
term E_x f_0(x) * prod_i E(f_i | V_i)(x), where V_i is the line spanned by
v_i.  Everything else here supports comparing the two: twisted averages
obtained by differencing in y, the associated profile and dual functions
with their shared energy identity, exact counts of configurations inside a
subset, and the product lower bound for nonnegative functions.

Counting kernels translate functions with axis rolls on the D-dimensional
view, so one configuration evaluation costs O(p * m * N) for N = p^D.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fpcore import IntPoly, PrimeCtx, ep_table
from .gowers import NormResult
from .gridfn import GridFunction, SubsetMask, conditional_expectation, coords_table

__all__ = [
    "ConfigurationSpec",
    "CountReport",
    "DualSpec",
    "SetCount",
    "SpecValidationError",
    "count_in_set",
    "counting_average",
    "counting_profile",
    "dual_function",
    "error_report",
    "find_config",
    "main_term",
    "product_lower_bound",
    "twisted_average",
    "validate",
]


class SpecValidationError(ValueError):
    """A configuration failed one of the named validity checks."""

    def __init__(self, check: str, message: str):
        super().__init__(f"[{check}] {message}")
        self.check = check


@dataclass(frozen=True)
class ConfigurationSpec:
    """Directions and polynomials defining one point configuration.

    The spec is modulus-free; call validate(spec, p) before evaluating it
    over a concrete prime.
    """

    dimension: int
    directions: tuple[tuple[int, ...], ...]
    polynomials: tuple[IntPoly, ...]

    def __post_init__(self):
        if self.dimension < 1:
            raise SpecValidationError("arity", f"dimension {self.dimension} must be >= 1")
        if len(self.directions) == 0:
            raise SpecValidationError("arity", "a configuration needs at least one moving point")
        if len(self.directions) != len(self.polynomials):
            raise SpecValidationError(
                "arity",
                f"{len(self.directions)} directions but {len(self.polynomials)} polynomials",
            )
        for i, v in enumerate(self.directions, start=1):
            if len(v) != self.dimension:
                raise SpecValidationError(
                    "arity", f"direction {i} has {len(v)} coordinates, expected {self.dimension}"
                )

    @property
    def m(self) -> int:
        """Number of moving points (the anchor x is not counted)."""
        return len(self.directions)

    @staticmethod
    def square_corners() -> "ConfigurationSpec":
        """Planar corner pattern x, x + (y, 0), x + (0, y^2)."""
        return ConfigurationSpec(
            dimension=2,
            directions=((1, 0), (0, 1)),
            polynomials=(IntPoly.monomial(1), IntPoly.monomial(2)),
        )

    @staticmethod
    def cubic_corners() -> "ConfigurationSpec":
        """Spatial corner pattern x, x + (y,0,0), x + (0,y^2,0), x + (0,0,y^3)."""
        return ConfigurationSpec(
            dimension=3,
            directions=((1, 0, 0), (0, 1, 0), (0, 0, 1)),
            polynomials=(IntPoly.monomial(1), IntPoly.monomial(2), IntPoly.monomial(3)),
        )

    def offset(self, i: int, y: int, p: int) -> tuple[int, ...]:
        """The translation vector v_i * P_i(y) reduced mod p (i is 1-based)."""
        c = self.polynomials[i - 1].eval_mod(y, p)
        return tuple((vc * c) % p for vc in self.directions[i - 1])


def validate(spec: ConfigurationSpec, p: int) -> None:
    """Run the four named checks: modulus, arity, direction, degree."""
    try:
        PrimeCtx(p)
    except ValueError as exc:
        raise SpecValidationError("modulus", str(exc)) from None
    # arity is enforced at construction; re-stated here so the check list
    # is complete for callers validating specs built by other means
    if len(spec.directions) != len(spec.polynomials) or spec.m == 0:
        raise SpecValidationError("arity", "directions and polynomials must pair up")
    for i, v in enumerate(spec.directions, start=1):
        if all(c % p == 0 for c in v):
            raise SpecValidationError("direction", f"direction {i} = {v} vanishes mod {p}")
    for i, poly in enumerate(spec.polynomials, start=1):
        d = poly.reduced_degree(p)
        if d < 1:
            raise SpecValidationError(
                "degree", f"polynomial {i} = {poly} is constant mod {p}"
            )
        if d >= p:
            raise SpecValidationError(
                "degree", f"polynomial {i} has reduced degree {d} >= p = {p}"
            )


# ---------------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------------


def _rolled(arr: np.ndarray, w: tuple[int, ...], p: int) -> np.ndarray:
    """View-translate: result[x] = arr[(x + w) mod p] on the D-dim view."""
    shifts = [(-c) % p for c in w]
    axes = [j for j, s in enumerate(shifts) if s]
    if not axes:
        return arr
    return np.roll(arr, shift=[shifts[j] for j in axes], axis=axes)


def _nd_tables(p: int, D: int, functions, allow_real: bool = True):
    """D-dimensional views of the value tables, demoted to float64 if possible."""
    tables = []
    real = allow_real and all(np.all(f.values.imag == 0) for f in functions)
    for f in functions:
        vals = f.values.real if real else f.values
        tables.append(vals.reshape((p,) * D))
    return tables


def _check_functions(spec: ConfigurationSpec, p: int, functions, expected: int, label: str):
    if len(functions) != expected:
        raise ValueError(f"expected {expected} {label}, got {len(functions)}")
    for f in functions:
        if (f.p, f.D) != (p, spec.dimension):
            raise ValueError(
                f"function on (p={f.p}, D={f.D}) does not live on (p={p}, D={spec.dimension})"
            )


def counting_average(spec: ConfigurationSpec, p: int, functions) -> complex:
    """E_{x,y} f_0(x) * prod_i f_i(x + v_i P_i(y)).

    `functions` lists f_0 through f_m.  Real-valued inputs run the whole
    kernel in float64.
    """
    validate(spec, p)
    _check_functions(spec, p, functions, spec.m + 1, "functions (anchor plus moving points)")
    tables = _nd_tables(p, spec.dimension, functions)
    acc = 0.0 + 0.0j
    for y in range(p):
        prod = tables[0].copy()
        for i in range(1, spec.m + 1):
            prod *= _rolled(tables[i], spec.offset(i, y, p), p)
        acc += prod.mean()
    return complex(acc / p)


def main_term(spec: ConfigurationSpec, p: int, functions) -> complex:
    """E_x f_0(x) * prod_i E(f_i | V_i)(x), the structured prediction."""
    validate(spec, p)
    _check_functions(spec, p, functions, spec.m + 1, "functions (anchor plus moving points)")
    prod = functions[0].values.copy()
    for i in range(1, spec.m + 1):
        prod = prod * conditional_expectation(functions[i], spec.directions[i - 1]).values
    return complex(prod.mean())


@dataclass(frozen=True)
class CountReport:
    """Counting average, its main term, and their distance, over one prime."""

    p: int
    counting: complex
    main: complex

    @property
    def abs_error(self) -> float:
        return abs(self.counting - self.main)


def error_report(spec: ConfigurationSpec, p: int, functions) -> CountReport:
    return CountReport(
        p=p,
        counting=counting_average(spec, p, functions),
        main=main_term(spec, p, functions),
    )


# ---------------------------------------------------------------------------
# twisted averages, profiles, duals
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DualSpec:
    """A configuration whose slots split into function and phase carriers.

    Slots 1..split carry grid functions; slots split+1..m of `base` carry
    residue-valued phase tables entering through the character e_p.
    """

    base: ConfigurationSpec
    split: int

    def __post_init__(self):
        if not 1 <= self.split <= self.base.m:
            raise SpecValidationError(
                "arity", f"split {self.split} out of range 1..{self.base.m}"
            )

    @property
    def phase_count(self) -> int:
        return self.base.m - self.split


def _check_dual_args(dspec: DualSpec, p: int, functions, phases, mask):
    validate(dspec.base, p)
    D = dspec.base.dimension
    _check_functions(dspec.base, p, functions, dspec.split, "grid functions")
    if len(phases) != dspec.phase_count:
        raise ValueError(f"expected {dspec.phase_count} phase tables, got {len(phases)}")
    for phi in phases:
        if (phi.p, phi.D) != (p, D):
            raise ValueError(
                f"phase table on (p={phi.p}, D={phi.D}) does not live on (p={p}, D={D})"
            )
    if mask is not None and (mask.p, mask.D) != (p, D):
        raise ValueError(f"mask on (p={mask.p}, D={mask.D}) does not live on (p={p}, D={D})")


def twisted_average(
    dspec: DualSpec,
    p: int,
    functions,
    twins=None,
    phases=(),
    weight: "GridFunction | None" = None,
) -> complex:
    """Differenced configuration average with phase twists.

    Computes E_{x,y,k} of

        w(x) * prod_{i <= split} f_i(x + v_i P_i(y)) * conj(g_i(x + v_i P_i(y+k)))
             * prod_{i > split} e_p(phi_i(x) * (P_i(y) - P_i(y+k)))

    where g defaults to f.  Setting w to a set indicator and g = f makes
    this the squared L^2 norm of the corresponding profile function.
    """
    if twins is None:
        twins = functions
    _check_dual_args(dspec, p, functions, phases, None)
    _check_functions(dspec.base, p, twins, dspec.split, "twin functions")
    D = dspec.base.dimension
    if weight is None:
        w_nd = np.ones((p,) * D)
    else:
        if (weight.p, weight.D) != (p, D):
            raise ValueError("weight lives on the wrong grid")
        w_nd = weight.values.reshape((p,) * D)
    f_nd = [f.values.reshape((p,) * D) for f in functions]
    g_nd = [np.conj(g.values.reshape((p,) * D)) for g in twins]
    roots = ep_table(p)
    phi_flat = [phi.values for phi in phases]
    spec = dspec.base
    acc = 0.0 + 0.0j
    for y in range(p):
        for k in range(p):
            prod = w_nd.astype(np.complex128)
            for i in range(1, dspec.split + 1):
                prod *= _rolled(f_nd[i - 1], spec.offset(i, y, p), p)
                prod *= _rolled(g_nd[i - 1], spec.offset(i, (y + k) % p, p), p)
            for j, i in enumerate(range(dspec.split + 1, spec.m + 1)):
                poly = spec.polynomials[i - 1]
                d = (poly.eval_mod(y, p) - poly.eval_mod(y + k, p)) % p
                prod *= roots[(phi_flat[j] * d) % p].reshape((p,) * D)
            acc += prod.mean()
    return complex(acc / (p * p))


def counting_profile(
    dspec: DualSpec,
    p: int,
    functions,
    phases=(),
    mask: "SubsetMask | None" = None,
) -> GridFunction:
    """The y-averaged configuration profile

        G(x) = 1_U(x) * E_y prod_{i <= split} f_i(x + v_i P_i(y))
                            * prod_{i > split} e_p(phi_i(x) * P_i(y)).
    """
    _check_dual_args(dspec, p, functions, phases, mask)
    D = dspec.base.dimension
    spec = dspec.base
    f_nd = [f.values.reshape((p,) * D) for f in functions]
    roots = ep_table(p)
    acc = np.zeros((p,) * D, dtype=np.complex128)
    for y in range(p):
        prod = np.ones((p,) * D, dtype=np.complex128)
        for i in range(1, dspec.split + 1):
            prod *= _rolled(f_nd[i - 1], spec.offset(i, y, p), p)
        for j, i in enumerate(range(dspec.split + 1, spec.m + 1)):
            c = spec.polynomials[i - 1].eval_mod(y, p)
            prod *= roots[(phases[j].values * c) % p].reshape((p,) * D)
        acc += prod
    acc /= p
    if mask is not None:
        acc *= mask.bits.reshape((p,) * D)
    return GridFunction(p, D, acc.reshape(-1))


def dual_function(
    dspec: DualSpec,
    p: int,
    functions,
    phases=(),
    mask: "SubsetMask | None" = None,
) -> GridFunction:
    """The dual of the profile against its last grid-function slot.

    F is built so that E_x F(x) * conj(f_split(x)) equals the squared L^2
    norm of counting_profile(...) exactly: expand that norm, difference the
    two y variables as (y, y + k), and substitute x so that the conjugated
    copy of the last function sits at the bare point x.
    """
    _check_dual_args(dspec, p, functions, phases, mask)
    spec = dspec.base
    D = spec.dimension
    mref = dspec.split
    f_nd = [f.values.reshape((p,) * D) for f in functions]
    roots = ep_table(p)
    bits_nd = None if mask is None else mask.bits.reshape((p,) * D)
    acc = np.zeros((p,) * D, dtype=np.complex128)
    for y in range(p):
        for k in range(p):
            anchor = spec.offset(mref, (y + k) % p, p)  # v_m * P_m(y + k)
            neg_anchor = tuple((-c) % p for c in anchor)
            prod = np.ones((p,) * D, dtype=np.complex128)
            for i in range(1, mref + 1):
                w = tuple((a - b) % p for a, b in zip(spec.offset(i, y, p), anchor))
                prod *= _rolled(f_nd[i - 1], w, p)
            for i in range(1, mref):
                w = tuple((a - b) % p for a, b in zip(spec.offset(i, (y + k) % p, p), anchor))
                prod *= np.conj(_rolled(f_nd[i - 1], w, p))
            for j, i in enumerate(range(mref + 1, spec.m + 1)):
                poly = spec.polynomials[i - 1]
                d = (poly.eval_mod(y, p) - poly.eval_mod(y + k, p)) % p
                twisted = roots[(phases[j].values * d) % p].reshape((p,) * D)
                prod *= _rolled(twisted, neg_anchor, p)
            if bits_nd is not None:
                prod *= _rolled(bits_nd, neg_anchor, p)
            acc += prod
    acc /= p * p
    return GridFunction(p, D, acc.reshape(-1))


# ---------------------------------------------------------------------------
# configurations inside a subset
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SetCount:
    """Exact configuration counts inside a subset, split by the parameter y."""

    nonzero_y: int
    zero_y: int

    @property
    def total(self) -> int:
        return self.nonzero_y + self.zero_y


def _membership_by_y(spec: ConfigurationSpec, p: int, mask: SubsetMask, y: int) -> np.ndarray:
    bits = mask.bits.reshape((p,) * spec.dimension)
    ok = bits.copy()
    for i in range(1, spec.m + 1):
        ok &= _rolled(bits, spec.offset(i, y, p), p)
    return ok.reshape(-1)


def count_in_set(spec: ConfigurationSpec, p: int, mask: SubsetMask) -> SetCount:
    """Count pairs (x, y) whose whole configuration lies inside the set."""
    validate(spec, p)
    if (mask.p, mask.D) != (p, spec.dimension):
        raise ValueError("mask lives on the wrong grid")
    nonzero = 0
    zero = 0
    for y in range(p):
        c = int(_membership_by_y(spec, p, mask, y).sum())
        if y == 0:
            zero += c
        else:
            nonzero += c
    return SetCount(nonzero_y=nonzero, zero_y=zero)


def find_config(
    spec: ConfigurationSpec,
    p: int,
    mask: SubsetMask,
    skip_degenerate: bool = True,
) -> "tuple[tuple[int, ...], int] | None":
    """First (x, y) in lexicographic order whose configuration sits in the set.

    Ordering is x-major: candidates are compared by the flat index of x
    first, then by y.  With skip_degenerate, values of y for which every
    offset vanishes (so the configuration collapses to the single point x)
    are not considered witnesses.
    """
    validate(spec, p)
    if (mask.p, mask.D) != (p, spec.dimension):
        raise ValueError("mask lives on the wrong grid")
    best: "tuple[int, int] | None" = None
    for y in range(p):
        if skip_degenerate and all(
            all(c == 0 for c in spec.offset(i, y, p)) for i in range(1, spec.m + 1)
        ):
            continue
        hits = np.flatnonzero(_membership_by_y(spec, p, mask, y))
        if hits.size == 0:
            continue
        x_idx = int(hits[0])
        if best is None or x_idx < best[0]:
            best = (x_idx, y)
    if best is None:
        return None
    coords = tuple(int(c) for c in coords_table(p, spec.dimension)[best[0]])
    return coords, best[1]


# ---------------------------------------------------------------------------
# product lower bound
# ---------------------------------------------------------------------------


def product_lower_bound(spec: ConfigurationSpec, p: int, f: GridFunction) -> NormResult:
    """Both sides of E_x f(x) * prod_i E(f | V_i)(x) >= (E f)^(m+1).

    Requires f real and nonnegative; the left side multiplies the function
    itself (the trivial conditioning) with its line averages along every
    configuration direction.
    """
    validate(spec, p)
    if (f.p, f.D) != (p, spec.dimension):
        raise ValueError("function lives on the wrong grid")
    if np.any(f.values.imag != 0) or np.any(f.values.real < 0):
        raise ValueError("the product bound needs a real nonnegative function")
    vals = f.values.real
    prod = vals.copy()
    for v in spec.directions:
        prod *= conditional_expectation(f, v).values.real
    lhs = float(prod.mean())
    rhs = float(vals.mean()) ** (spec.m + 1)
    return NormResult(lhs=lhs, rhs=rhs)
