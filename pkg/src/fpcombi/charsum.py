"""Complete exponential sums of polynomial arguments over a prime field.

The central quantity is the averaged sum E_y e_p(P(y)) over all residues y.
For a polynomial whose mod-p reduction has degree d with 1 <= d < p the
square-root cancellation bound |E_y e_p(P(y))| <= (d - 1) / sqrt(p) holds;
quadratics achieve it with equality whenever the leading coefficient
survives reduction.

Degree bookkeeping uses the reduced degree: coefficients divisible by p
contribute nothing to the sum, so they are ignored when classifying P.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fpcore import IntPoly, PrimeCtx, ep_table

__all__ = ["WeylResult", "weyl_sum", "weyl_bound_scan", "random_poly_of_degree"]


@dataclass(frozen=True)
class WeylResult:
    """Value and bound context for one averaged exponential sum."""

    poly: IntPoly
    p: int
    value: complex
    reduced_degree: int

    @property
    def modulus(self) -> float:
        return abs(self.value)

    @property
    def bound(self) -> "float | None":
        """(d - 1) / sqrt(p) when it applies, None outside 1 <= d < p."""
        d = self.reduced_degree
        if d < 1 or d >= self.p:
            return None
        return (d - 1) / math.sqrt(self.p)

    @property
    def bound_ratio(self) -> "float | None":
        """modulus / bound; None when the bound does not apply or is zero."""
        b = self.bound
        if b is None or b == 0.0:
            return None
        return self.modulus / b

    def within_bound(self, tol: float = 0.0) -> bool:
        if self.bound is None:
            raise ValueError(
                f"no square-root bound for reduced degree {self.reduced_degree} mod {self.p}"
            )
        return self.modulus <= self.bound + tol


def weyl_sum(poly: IntPoly, p: int) -> WeylResult:
    """Evaluate E_y e_p(P(y)) exactly (up to float roundoff) over Z/p."""
    PrimeCtx(p)
    residues = poly.eval_mod_all(p)
    value = complex(ep_table(p)[residues].mean())
    return WeylResult(poly=poly, p=p, value=value, reduced_degree=poly.reduced_degree(p))


def random_poly_of_degree(degree: int, p: int, rng: np.random.Generator) -> IntPoly:
    """Uniform polynomial with reduced degree exactly `degree` mod p."""
    if degree < 0:
        raise ValueError(f"degree {degree} must be nonnegative")
    if degree >= p:
        raise ValueError(f"degree {degree} must be below p = {p} to be attainable")
    low = [int(c) for c in rng.integers(0, p, size=degree)]
    lead = int(rng.integers(1, p))
    return IntPoly(tuple(low + [lead]))


def weyl_bound_scan(
    degree: int,
    primes,
    samples_per_prime: int,
    seed: int = 0,
) -> list[WeylResult]:
    """Worst observed sum per prime over random degree-`degree` polynomials.

    For each prime, draws `samples_per_prime` polynomials of exact reduced
    degree and keeps the one with the largest modulus.  The returned list is
    ordered like `primes`; callers compare each entry's modulus against its
    bound.
    """
    if degree < 2:
        raise ValueError(f"scan degree {degree} must be at least 2")
    if samples_per_prime < 1:
        raise ValueError("samples_per_prime must be positive")
    rng = np.random.default_rng(seed)
    worst: list[WeylResult] = []
    for p in primes:
        if degree >= p:
            raise ValueError(f"degree {degree} is not attainable mod p = {p}")
        best: WeylResult | None = None
        for _ in range(samples_per_prime):
            res = weyl_sum(random_poly_of_degree(degree, p, rng), p)
            if best is None or res.modulus > best.modulus:
                best = res
        worst.append(best)
    return worst
