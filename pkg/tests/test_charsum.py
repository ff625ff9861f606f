"""Complete exponential sums: frozen values, the square-root bound, scans."""

import math

import numpy as np
import pytest

from fpcombi.charsum import random_poly_of_degree, weyl_bound_scan, weyl_sum
from fpcombi.fpcore import IntPoly, ep, primes_between


def test_constant_polynomial_sum_is_unit():
    res = weyl_sum(IntPoly.const(3), 7)
    assert res.modulus == pytest.approx(1.0)
    assert res.reduced_degree == 0
    assert res.bound is None
    with pytest.raises(ValueError):
        res.within_bound()


def test_linear_sum_vanishes():
    res = weyl_sum(IntPoly((2, 3)), 11)
    assert res.modulus == pytest.approx(0.0, abs=1e-15)
    assert res.reduced_degree == 1
    assert res.bound == 0.0
    assert res.within_bound(tol=1e-12)


def test_gauss_sum_frozen_value():
    # E_y e_5(y^2): modulus is exactly 5^(-1/2) = 0.4472135954999579
    res = weyl_sum(IntPoly.monomial(2), 5)
    assert res.modulus == pytest.approx(0.4472135954999579, abs=1e-12)
    direct = np.mean([ep(y * y, 5) for y in range(5)])
    assert res.value == pytest.approx(complex(direct), abs=1e-12)


@pytest.mark.parametrize("p", [5, 7, 11, 13, 31])
def test_quadratic_modulus_is_exact(p):
    rng = np.random.default_rng(p)
    for _ in range(10):
        a = int(rng.integers(1, p))
        b = int(rng.integers(0, p))
        c = int(rng.integers(0, p))
        res = weyl_sum(IntPoly((c, b, a)), p)
        assert res.reduced_degree == 2
        assert res.modulus == pytest.approx(p**-0.5, abs=1e-12)
        assert res.bound_ratio == pytest.approx(1.0, abs=1e-9)


def test_p_divisible_leading_coefficient_is_dropped():
    # 7y^3 + y^2 behaves as a quadratic mod 7
    res = weyl_sum(IntPoly((0, 0, 1, 7)), 7)
    assert res.reduced_degree == 2
    assert res.modulus == pytest.approx(7**-0.5, abs=1e-12)
    # and as a genuine cubic mod 5
    assert weyl_sum(IntPoly((0, 0, 1, 7)), 5).reduced_degree == 3


def test_bound_holds_for_random_cubics_and_quartics():
    rng = np.random.default_rng(2026)
    for degree in (3, 4):
        for p in (7, 11, 13, 17, 19):
            for _ in range(20):
                q = random_poly_of_degree(degree, p, rng)
                res = weyl_sum(q, p)
                assert res.reduced_degree == degree
                assert res.within_bound(tol=1e-9), (q, p, res.modulus, res.bound)


def test_random_poly_degree_validation():
    rng = np.random.default_rng(0)
    with pytest.raises(ValueError):
        random_poly_of_degree(-1, 7, rng)
    with pytest.raises(ValueError):
        random_poly_of_degree(7, 7, rng)


def test_scan_returns_worst_case_per_prime():
    primes = primes_between(11, 31)
    results = weyl_bound_scan(2, primes, samples_per_prime=25, seed=7)
    assert [r.p for r in results] == primes
    for r in results:
        # every quadratic has the same modulus, so the worst one does too
        assert r.modulus == pytest.approx(r.p**-0.5, abs=1e-12)
        assert r.within_bound(tol=1e-9)


def test_scan_validation():
    with pytest.raises(ValueError):
        weyl_bound_scan(1, [7], 5)
    with pytest.raises(ValueError):
        weyl_bound_scan(2, [7], 0)
    with pytest.raises(ValueError):
        weyl_bound_scan(5, [5], 3)


def test_scan_is_deterministic():
    a = weyl_bound_scan(3, [11, 13], samples_per_prime=10, seed=42)
    b = weyl_bound_scan(3, [11, 13], samples_per_prime=10, seed=42)
    assert [r.poly for r in a] == [r.poly for r in b]
    assert all(math.isclose(x.modulus, y.modulus) for x, y in zip(a, b))
