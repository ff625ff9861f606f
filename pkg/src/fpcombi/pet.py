"""Degree-lowering descent for rectangular polynomial families.

A family is a t x m matrix of polynomials in Z[y, h]: column i collects the
offset polynomials of one moving function, row j the component along one
direction.  Differencing the underlying average in its parameter replaces
the family by a differenced family in which every polynomial is compared
against a subtracted tuple Q and every column splits into an unshifted and
an h-shifted copy.  Iterating this van der Corput style step drives the
family down to y-degree one; the type matrix defined below strictly
decreases at every step, which is what bounds the length of the descent.

Conventions: degrees are y-degrees with deg 0 = -1, the same shift symbol h
is reused at every step, and the distinguished column of a family is its
last one.
"""

from __future__ import annotations

from dataclasses import dataclass

from .fpcore import BivarPoly, IntPoly

__all__ = [
    "NicenessReport",
    "PetError",
    "PolyFamily",
    "TypeMatrix",
    "VdcStep",
    "derived_sets",
    "is_nice",
    "pet_trace",
    "poly_equiv",
    "type_less",
    "type_of",
    "vdc_step",
]

MAX_TRACE_STEPS = 50


class PetError(ValueError):
    """Descent failure: non-nice family, stalled type, or step budget hit.

    `steps` carries the partial trace available when the error was raised.
    """

    def __init__(self, message: str, steps: tuple = ()):
        super().__init__(message)
        self.steps = steps


def _coerce(entry) -> BivarPoly:
    if isinstance(entry, BivarPoly):
        return entry
    if isinstance(entry, IntPoly):
        return BivarPoly.from_int_poly(entry)
    raise TypeError(f"family entries must be polynomials, got {type(entry).__name__}")


@dataclass(frozen=True)
class PolyFamily:
    """Rectangular matrix of Z[y, h] polynomials; rows are directions."""

    rows: tuple

    def __post_init__(self):
        rows = tuple(tuple(_coerce(e) for e in row) for row in self.rows)
        if not rows or not rows[0]:
            raise ValueError("a family needs at least one row and one column")
        m = len(rows[0])
        if any(len(row) != m for row in rows):
            raise ValueError("all rows must have the same number of columns")
        object.__setattr__(self, "rows", rows)

    @property
    def t(self) -> int:
        return len(self.rows)

    @property
    def m(self) -> int:
        return len(self.rows[0])

    @property
    def max_y_degree(self) -> int:
        return max(e.y_degree for row in self.rows for e in row)

    def columns(self) -> tuple:
        return tuple(tuple(row[i] for row in self.rows) for i in range(self.m))

    @staticmethod
    def from_columns(cols) -> "PolyFamily":
        t = len(cols[0])
        return PolyFamily(rows=tuple(tuple(col[j] for col in cols) for j in range(t)))

    @staticmethod
    def from_configuration(spec) -> "PolyFamily":
        """Diagonal encoding of a point configuration: column i moves only
        along direction i, so entry (j, i) is P_i when j = i and 0 otherwise.
        """
        m = spec.m
        zero = BivarPoly.zero()
        rows = tuple(
            tuple(
                BivarPoly.from_int_poly(spec.polynomials[j]) if i == j else zero
                for i in range(m)
            )
            for j in range(m)
        )
        return PolyFamily(rows=rows)

    def normalized(self) -> "PolyFamily":
        """Drop y-constant columns, then merge columns equal mod y-constants.

        Columns whose entries are all y-constant shift nothing and are
        absorbed.  Two columns whose entry-wise difference is y-constant
        carry the same polynomial shape: the constants can be pushed into
        the (arbitrary, bounded) functions occupying the slots, after which
        the slots merge into one by multiplying those functions.  One
        column per shape is kept, represented by its LAST occurrence so the
        distinguished final column survives as its own representative.  If
        everything is absorbed the trivial one-column zero family remains.
        """
        kept = [c for c in self.columns() if any(e.y_degree >= 1 for e in c)]
        if not kept:
            return PolyFamily(rows=tuple((BivarPoly.zero(),) for _ in range(self.t)))
        by_shape: dict = {}
        for col in reversed(kept):
            shape = tuple(e.y_positive_part() for e in col)
            if shape not in by_shape:
                by_shape[shape] = col
        deduped = list(reversed(list(by_shape.values())))
        return PolyFamily.from_columns(tuple(deduped))

    def degenerate_shifts(self, bound: "int | None" = None) -> tuple:
        """Integer values of h at which the generic picture collapses.

        A shift is degenerate when it kills the leading y-coefficient of an
        entry or of a same-row difference of entries (a degree drop or a
        collision), or when it zeroes a y-constant entry that depends on h.
        The search is a brute scan of |h| <= max(10, 10 * largest absolute
        coefficient involved); callers can widen it explicitly.
        """
        suspects: list[BivarPoly] = []

        def add(candidate: BivarPoly) -> None:
            if candidate.is_zero:
                return
            if candidate.is_y_constant:
                suspects.append(candidate)
            else:
                suspects.append(candidate.leading_y_coefficient())

        for row in self.rows:
            for entry in row:
                add(entry)
            for i in range(len(row)):
                for j in range(i + 1, len(row)):
                    add(row[i] - row[j])
        suspects = [s for s in suspects if s.h_degree() >= 1]
        if not suspects:
            return ()
        if bound is None:
            bound = max(10, 10 * max(s.max_abs_coefficient for s in suspects))
        roots = set()
        for s in suspects:
            for hval in range(-bound, bound + 1):
                if s.subst_h(hval).is_zero:
                    roots.add(hval)
        return tuple(sorted(roots))

    def __str__(self) -> str:
        return "\n".join("  |  ".join(str(e) for e in row) for row in self.rows)


def poly_equiv(a, b) -> bool:
    """Same y-degree and same leading y-coefficient; needs y-nonconstant input."""
    a, b = _coerce(a), _coerce(b)
    if a.y_degree < 1 or b.y_degree < 1:
        raise ValueError("equivalence is defined for y-nonconstant polynomials only")
    return a.y_degree == b.y_degree and a.leading_y_coefficient() == b.leading_y_coefficient()


def derived_sets(family: PolyFamily) -> tuple:
    """Row j keeps the entries whose column is y-constant strictly below j.

    Returned per row in column order, duplicates included.  These are the
    entries a differencing step at row j is allowed to subtract: everything
    beneath them moves by constants only.
    """
    t = family.t
    cols = family.columns()
    out = []
    for j in range(t):
        members = []
        for col in cols:
            if all(e.y_degree <= 0 for e in col[j + 1 :]):
                members.append(col[j])
        out.append(tuple(members))
    return tuple(out)


@dataclass(frozen=True)
class TypeMatrix:
    """Per-row counts of equivalence classes among derived entries.

    rows[j][d-1] counts the classes of y-degree d inside the derived set of
    row j; the width is the family's maximum y-degree (at least one).
    """

    rows: tuple

    @property
    def t(self) -> int:
        return len(self.rows)

    @property
    def width(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    def padded(self, width: int) -> "TypeMatrix":
        return TypeMatrix(
            rows=tuple(row + (0,) * (width - len(row)) for row in self.rows)
        )

    def __str__(self) -> str:
        return "[" + ", ".join(str(list(row)) for row in self.rows) + "]"


def type_of(family: PolyFamily) -> TypeMatrix:
    width = max(1, family.max_y_degree)
    rows = []
    for members in derived_sets(family):
        classes: set = set()
        for e in members:
            if e.y_degree >= 1:
                classes.add((e.y_degree, e.leading_y_coefficient()))
        rows.append(
            tuple(sum(1 for (d, _) in classes if d == deg) for deg in range(1, width + 1))
        )
    return TypeMatrix(rows=tuple(rows))


def type_less(a: TypeMatrix, b: TypeMatrix) -> bool:
    """Strict well-ordering: compare row t first, high degrees first."""
    if a.t != b.t:
        raise ValueError(f"type matrices have {a.t} and {b.t} rows; cannot compare")
    width = max(a.width, b.width)
    ap, bp = a.padded(width).rows, b.padded(width).rows
    for j in range(a.t - 1, -1, -1):
        for d in range(width - 1, -1, -1):
            if ap[j][d] != bp[j][d]:
                return ap[j][d] < bp[j][d]
    return False


@dataclass(frozen=True)
class NicenessReport:
    """Outcome of the structural checks a family must pass before a step."""

    nice: bool
    failures: tuple = ()

    def __bool__(self) -> bool:
        return self.nice


def is_nice(family: PolyFamily) -> NicenessReport:
    """Check the three pivot-domination conditions on the family as given.

    With pivot = the last entry of the last row: (a) the pivot's degree is
    maximal within the last row; (b) it strictly dominates every entry of
    the other rows (for a single-row family it only needs degree >= 1);
    (c) subtracting each row's last entry, differences in the last row
    strictly dominate differences in the rows above.
    """
    rows = family.rows
    t, m = family.t, family.m
    pivot = rows[t - 1][m - 1]
    failures = []
    for i in range(m):
        if pivot.y_degree < rows[t - 1][i].y_degree:
            failures.append(
                f"pivot degree {pivot.y_degree} below entry {i + 1} of the last row"
            )
    if t == 1:
        if pivot.y_degree < 1:
            failures.append("single-row family needs a y-nonconstant pivot")
    else:
        for j in range(t - 1):
            for i in range(m):
                if pivot.y_degree <= rows[j][i].y_degree:
                    failures.append(
                        f"pivot degree {pivot.y_degree} does not dominate "
                        f"entry ({j + 1}, {i + 1})"
                    )
    for j in range(t - 1):
        for i in range(m - 1):
            top = (rows[t - 1][m - 1] - rows[t - 1][i]).y_degree
            upper = (rows[j][m - 1] - rows[j][i]).y_degree
            if top <= upper:
                failures.append(
                    f"difference degree {top} in the last row does not dominate "
                    f"difference degree {upper} in row {j + 1} (column {i + 1})"
                )
    return NicenessReport(nice=not failures, failures=tuple(failures))


@dataclass(frozen=True)
class VdcStep:
    """One differencing step: what was subtracted and what came out.

    `raw` keeps all 2m interleaved columns (unshifted and h-shifted copy of
    each input column, the subtracted tuple removed from both); `result` is
    its normalization.  Types are taken before and after, on the normalized
    families; the raw family has the same type as `result`.
    """

    input: PolyFamily
    normalized: PolyFamily
    pivot_row: int
    subtracted: tuple
    raw: PolyFamily
    result: PolyFamily
    type_before: TypeMatrix
    type_after: TypeMatrix


def _select_subtraction(work: PolyFamily, derived: tuple) -> "tuple[int, tuple]":
    """Choose the pivot row l and the subtracted tuple Q."""
    t, m = work.t, work.m
    l = None
    for j, members in enumerate(derived):
        if any(e.y_degree >= 1 for e in members):
            l = j
            break
    if l is None:
        raise PetError("family has no y-nonconstant entry to difference")
    if l < t - 1:
        candidates = [e for e in derived[l] if e.y_degree >= 1]
        q = min(candidates, key=BivarPoly.sort_key)
        return l, tuple(q if j == l else BivarPoly.zero() for j in range(t))
    last_row = work.rows[t - 1]
    if all(poly_equiv(e, last_row[m - 1]) for e in last_row):
        return l, tuple(work.rows[j][m - 1] for j in range(t))
    i_star = min(range(m), key=lambda i: (last_row[i].y_degree, last_row[i].sort_key(), i))
    return l, tuple(work.rows[j][i_star] for j in range(t))


def vdc_step(family: PolyFamily) -> VdcStep:
    """Run one differencing step and verify the type strictly decreased.

    The input is normalized first; it must then be nice and of y-degree at
    least two.  Each column i of the normalized family contributes the pair
    of columns P_i - Q and P_i(y + h) - Q to the raw output, which is
    normalized again before the type comparison.
    """
    work = family.normalized()
    if work.max_y_degree < 2:
        raise PetError(
            f"family has y-degree {work.max_y_degree}; differencing applies from degree 2"
        )
    report = is_nice(work)
    if not report:
        raise PetError("family is not nice: " + "; ".join(report.failures))
    derived = derived_sets(work)
    l, subtracted = _select_subtraction(work, derived)
    raw_cols = []
    for col in work.columns():
        plain = tuple(col[j] - subtracted[j] for j in range(work.t))
        shifted = tuple(col[j].shift_y("h") - subtracted[j] for j in range(work.t))
        raw_cols.append(plain)
        raw_cols.append(shifted)
    raw = PolyFamily.from_columns(tuple(raw_cols))
    result = raw.normalized()
    type_before = type_of(work)
    type_after = type_of(result)
    if not type_less(type_after, type_before):
        raise PetError(
            f"type did not decrease: {type_before} -> {type_after}\n"
            f"family:\n{work}\nsubtracted: {tuple(str(q) for q in subtracted)}"
        )
    return VdcStep(
        input=family,
        normalized=work,
        pivot_row=l,
        subtracted=subtracted,
        raw=raw,
        result=result,
        type_before=type_before,
        type_after=type_after,
    )


def pet_trace(family: PolyFamily, max_steps: int = MAX_TRACE_STEPS) -> tuple:
    """Difference until the family is nice of y-degree one.

    Returns the tuple of steps taken.  Raises PetError, with the partial
    trace attached, when a family stops being nice, the type stalls, or the
    step budget runs out.
    """
    steps: list[VdcStep] = []
    current = family
    while True:
        work = current.normalized()
        degree = work.max_y_degree
        if degree < 1:
            raise PetError("family has no y-dependence left to trace", tuple(steps))
        if degree == 1:
            report = is_nice(work)
            if report:
                return tuple(steps)
            raise PetError(
                "terminal degree-1 family is not nice: " + "; ".join(report.failures),
                tuple(steps),
            )
        if len(steps) >= max_steps:
            raise PetError(
                f"no nice degree-1 family within {max_steps} steps", tuple(steps)
            )
        try:
            step = vdc_step(current)
        except PetError as exc:
            raise PetError(str(exc), tuple(steps)) from None
        steps.append(step)
        current = step.result
