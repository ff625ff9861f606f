"""Grid functions: indexing, translation, line averages, Fourier, file I/O."""

import numpy as np
import pytest

from fpcombi.fpcore import ep
from fpcombi.gridfn import (
    GridFunction,
    GridParseError,
    PhaseFunction,
    SubsetMask,
    conditional_expectation,
    coords_table,
    encode_points,
    fourier_along,
    fourier_line,
    fourier_reconstruct,
    line_matrix,
    read_grid,
    read_mask,
    read_phase,
    write_grid,
    write_mask,
    write_phase,
)


def random_function(p, D, seed, unimodular=False):
    rng = np.random.default_rng(seed)
    n = p**D
    if unimodular:
        vals = np.exp(2j * np.pi * rng.random(n))
    else:
        vals = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return GridFunction(p, D, vals)


def test_index_convention_first_coordinate_most_significant():
    f = GridFunction.from_point_values(5, 2, {(1, 2): 3.0})
    # index(x) = x1*5 + x2
    assert f.values[7] == 3.0
    assert f.at((1, 2)) == 3.0
    assert f.at((6, -3)) == 3.0  # coordinates reduce mod p


def test_coords_encode_round_trip():
    p, D = 7, 3
    coords = coords_table(p, D)
    assert coords.shape == (p**D, D)
    assert np.array_equal(encode_points(coords, p, D), np.arange(p**D))


def test_validation_errors():
    with pytest.raises(ValueError):
        GridFunction(6, 2, np.zeros(36))
    with pytest.raises(ValueError):
        GridFunction(5, 2, np.zeros(24))
    with pytest.raises(ValueError):
        GridFunction(5, 0, np.zeros(1))
    f = GridFunction.constant(5, 1)
    with pytest.raises(ValueError):
        f.translated((1, 0))  # wrong arity
    with pytest.raises(ValueError):
        conditional_expectation(f, (0,))  # direction vanishes
    with pytest.raises(ValueError):
        conditional_expectation(f, (5,))  # vanishes mod p


def test_translation_pointwise():
    p, D = 5, 2
    f = random_function(p, D, seed=1)
    g = f.translated((2, 3))
    for x1 in range(p):
        for x2 in range(p):
            assert g.at((x1, x2)) == pytest.approx(f.at(((x1 + 2) % p, (x2 + 3) % p)))


def test_translation_composes_and_inverts():
    f = random_function(7, 3, seed=2)
    w = (1, 4, 6)
    back = tuple(-c for c in w)
    assert np.allclose(f.translated(w).translated(back).values, f.values)
    two_step = f.translated((1, 0, 0)).translated((0, 2, 5))
    assert np.allclose(two_step.values, f.translated((1, 2, 5)).values)


def test_line_matrix_rows_are_cosets():
    p = 5
    f = random_function(p, 2, seed=3)
    v = (1, 2)
    M = line_matrix(f, v)
    assert M.shape == (p, p)
    # each row must equal [f(rep + v*n)] for its representative
    seen = set()
    for row in M:
        # recover the representative by matching row[0] against f
        matches = np.flatnonzero(np.isclose(f.values, row[0]))
        assert len(matches) >= 1
        idx = int(matches[0])
        x = tuple(coords_table(p, 2)[idx])
        for n in range(p):
            pt = ((x[0] + v[0] * n) % p, (x[1] + v[1] * n) % p)
            assert f.at(pt) == pytest.approx(complex(row[n]))
        seen.add(idx)
    assert len(seen) == p


def test_conditional_expectation_is_projection():
    for v in [(1, 0), (0, 1), (1, 1), (2, 3)]:
        f = random_function(7, 2, seed=hash(v) % 1000)
        ce = conditional_expectation(f, v)
        # constant along the direction
        assert np.allclose(ce.values, ce.translated(v).values)
        # idempotent and mean-preserving
        assert np.allclose(conditional_expectation(ce, v).values, ce.values)
        assert ce.mean() == pytest.approx(f.mean())


def test_conditional_expectation_full_space_when_d_is_one():
    f = random_function(11, 1, seed=4)
    ce = conditional_expectation(f, (3,))
    assert np.allclose(ce.values, f.mean())


def test_fourier_matches_direct_sum():
    p = 7
    f = random_function(p, 2, seed=5)
    v, x = (2, 1), (3, 4)
    for k in range(p):
        direct = np.mean(
            [
                f.at(((x[0] + v[0] * n) % p, (x[1] + v[1] * n) % p)) * ep(-k * n, p)
                for n in range(p)
            ]
        )
        assert fourier_along(f, x, v, k) == pytest.approx(direct, abs=1e-12)


def test_fourier_inversion_and_parseval():
    p = 11
    f = random_function(p, 2, seed=6)
    v, x = (1, 5), (2, 9)
    for n in [0, 1, 4, p - 1]:
        pt = ((x[0] + v[0] * n) % p, (x[1] + v[1] * n) % p)
        assert fourier_reconstruct(f, x, v, n) == pytest.approx(f.at(pt), abs=1e-12)
    coeffs = fourier_line(f, x, v)
    line_energy = np.mean([abs(f.at(((x[0] + v[0] * n) % p, (x[1] + v[1] * n) % p))) ** 2 for n in range(p)])
    assert np.sum(np.abs(coeffs) ** 2) == pytest.approx(line_energy, abs=1e-12)


def test_fourier_anchor_shift_reindexes_frequencies():
    # moving the anchor along the line multiplies coefficients by a character
    p = 7
    f = random_function(p, 1, seed=8)
    v = (1,)
    base = fourier_line(f, (0,), v)
    moved = fourier_line(f, (3,), v)
    for k in range(p):
        assert moved[k] == pytest.approx(base[k] * ep(3 * k, p), abs=1e-12)


def test_phase_function_reduces_residues():
    phi = PhaseFunction(5, 1, np.array([0, 7, -1, 2, 12]))
    assert phi.values.tolist() == [0, 2, 4, 2, 2]
    assert PhaseFunction.zero(5, 2).values.sum() == 0


def test_mask_basics():
    m = SubsetMask.from_points(5, 2, [(0, 0), (1, 2), (1, 2)])
    assert m.density() == pytest.approx(2 / 25)
    assert m.contains((1, 2)) and not m.contains((2, 1))
    ind = m.indicator()
    assert ind.values.sum() == pytest.approx(2.0)
    assert SubsetMask.full(3, 1).density() == 1.0
    shifted = m.translated((1, 2))
    assert shifted.contains((0, 0))


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def test_grid_round_trip_is_bit_exact(tmp_path):
    f = random_function(7, 2, seed=9)
    path = tmp_path / "f.gridfn"
    write_grid(f, str(path))
    g = read_grid(str(path))
    assert g.p == f.p and g.D == f.D
    assert np.array_equal(g.values, f.values)  # exact, not approximate


def test_grid_file_layout(tmp_path):
    f = GridFunction(5, 1, np.arange(5) * (1 + 2j))
    path = tmp_path / "f.gridfn"
    write_grid(f, str(path))
    lines = path.read_text().splitlines()
    assert lines[0] == "gridfn 1"
    assert lines[1] == "p=5 D=1"
    assert lines[2] == "0 0"
    assert lines[3] == "1 2"
    assert len(lines) == 2 + 5


def test_phase_and_mask_round_trip(tmp_path):
    rng = np.random.default_rng(10)
    phi = PhaseFunction(7, 2, rng.integers(0, 7, size=49))
    write_phase(phi, str(tmp_path / "a.phase"))
    assert np.array_equal(read_phase(str(tmp_path / "a.phase")).values, phi.values)

    m = SubsetMask(7, 2, rng.random(49) < 0.4)
    write_mask(m, str(tmp_path / "a.mask"))
    assert np.array_equal(read_mask(str(tmp_path / "a.mask")).bits, m.bits)


@pytest.mark.parametrize(
    "text,bad_line",
    [
        ("", 1),
        ("gridfn 2\np=5 D=1\n" + "0 0\n" * 5, 1),
        ("wrong 1\np=5 D=1\n" + "0 0\n" * 5, 1),
        ("gridfn 1\np=6 D=1\n" + "0 0\n" * 6, 2),
        ("gridfn 1\np=5\n" + "0 0\n" * 5, 2),
        ("gridfn 1\np=5 D=1\n" + "0 0\n" * 4, None),  # too few rows
        ("gridfn 1\np=5 D=1\n" + "0 0\n" * 6, None),  # too many rows
        ("gridfn 1\np=5 D=1\n0 0\n0\n0 0\n0 0\n0 0\n", 4),
        ("gridfn 1\np=5 D=1\n0 0\nx 0\n0 0\n0 0\n0 0\n", 4),
    ],
)
def test_grid_parse_errors(tmp_path, text, bad_line):
    path = tmp_path / "bad.gridfn"
    path.write_text(text)
    with pytest.raises(GridParseError) as exc_info:
        read_grid(str(path))
    if bad_line is not None:
        assert exc_info.value.line == bad_line


def test_phase_parse_rejects_out_of_range(tmp_path):
    path = tmp_path / "bad.phase"
    path.write_text("phase 1\np=5 D=1\n0\n1\n5\n2\n3\n")
    with pytest.raises(GridParseError) as exc_info:
        read_phase(str(path))
    assert exc_info.value.line == 5


def test_mask_parse_rejects_non_bits(tmp_path):
    path = tmp_path / "bad.mask"
    path.write_text("mask 1\np=5 D=1\n0\n1\n2\n0\n1\n")
    with pytest.raises(GridParseError):
        read_mask(str(path))
