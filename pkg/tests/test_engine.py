from fractions import Fraction

import pytest

from bautin_lab.engine import (
    accumulate_rhs,
    compute_series,
    compute_series_unknown,
    dense_rotational_solve,
    residual,
    rotational_solve,
    tiebreak_slot,
)
from bautin_lab.errors import UsageError
from bautin_lab.fields import (
    parse_vector_field,
    random_divergence_free_field,
    random_field,
    random_homogeneous_field,
    random_reversible_field,
)
from bautin_lab.hpoly import HomogPoly
from bautin_lab.scalars import LinearForm
from bautin_lab.structure import gap_profile


def F(*args):
    return Fraction(*args)


def test_tiebreak_slots():
    # half-degree even -> the (h, h) slot; odd -> (h-1, h+1)
    assert tiebreak_slot(4) == (2, 2)
    assert tiebreak_slot(6) == (2, 4)
    assert tiebreak_slot(8) == (4, 4)
    assert tiebreak_slot(10) == (4, 6)
    with pytest.raises(UsageError):
        tiebreak_slot(5)


def test_solve_zero_rhs_odd_degree():
    V, L, tb = rotational_solve(3, HomogPoly.zero(3))
    assert V.is_zero() and L is None and tb is None


def test_solve_degree4_x_drive():
    # R = x * F_3 with F_3 = x^3
    V, L, tb = rotational_solve(4, HomogPoly.monomial(4, 0, F(1)))
    assert L == F(3, 8)
    assert V.coeff(3, 1) == F(-5, 8)
    assert V.coeff(1, 3) == F(-3, 8)
    assert V.coeff(4, 0) == 0 and V.coeff(2, 2) == 0 and V.coeff(0, 4) == 0
    assert tb.slot == (2, 2) and tb.value == 0


def test_solve_degree4_y3_drive():
    # R = x * F_3 with F_3 = y^3
    V, L, _ = rotational_solve(4, HomogPoly.monomial(1, 3, F(1)))
    assert L == 0
    assert V.coeffs == (0, F(0), F(0), F(0), F(-1, 4))


def test_accumulate_homogeneous_cubic():
    vf = parse_vector_field("n 3\nF 3 0 1\nF 0 3 -2\nG 2 1 5\n")
    series = compute_series(vf, 3)
    x = HomogPoly.monomial(1, 0, F(1))
    y = HomogPoly.monomial(0, 1, F(1))
    expected4 = x * vf.f_part(3) + y * vf.g_part(3)
    assert accumulate_rhs(series, 4).coeffs == expected4.coeffs
    # V_3 = 0, so the degree-5 source is empty
    assert accumulate_rhs(series, 5).is_zero()
    expected6 = series.V[4].dx() * vf.f_part(3) + series.V[4].dy() * vf.g_part(3)
    assert accumulate_rhs(series, 6).coeffs == expected6.coeffs


def test_series_divergence_free_quadratic():
    vf = parse_vector_field("n 2\nF 2 0 1\nG 1 1 -2\n")
    series = compute_series(vf, 6)
    assert all(L == 0 for _, L in series.l_values())


def test_series_cubic_f30():
    vf = parse_vector_field("n 3\nF 3 0 1\n")
    assert compute_series(vf, 1).L[1] == F(3, 8)


def test_series_quartic_first_constant_at_three():
    vf = random_homogeneous_field(4, seed=9)
    series = compute_series(vf, 3)
    assert series.L[1] == 0 and series.L[2] == 0
    assert series.L[3] != 0


def test_residuals_vanish_everywhere():
    for seed in range(6):
        n = 2 + seed % 5
        vf = random_field(n, seed)
        J = n + 3
        series = compute_series(vf, J)
        for k in range(3, 2 * J + 3):
            assert residual(series, k).is_zero(), (n, seed, k)


def test_gap_law_and_scaling():
    for n in (2, 3, 4):
        vf = random_homogeneous_field(n, seed=n)
        J = 2 * (n + 2)
        base = compute_series(vf, J)
        profile = gap_profile(n)
        for j, L in base.l_values():
            if not profile.l_index_expected_nonzero(j):
                assert L == 0
        for s in (F(2), F(-3), F(1, 5)):
            scaled = compute_series(vf.scale_params(s), J)
            for m in range(1, 7):
                k = 2 + m * (n - 1)
                if k % 2 == 0 and k <= 2 * J + 2:
                    j = k // 2 - 1
                    assert scaled.L[j] == s**m * base.L[j], (n, s, m)


def test_reversible_and_divergence_free_oracles():
    for seed in range(3):
        for n in (2, 3, 4):
            for vf in (
                random_divergence_free_field(n, seed),
                random_reversible_field(n, seed),
            ):
                series = compute_series(vf, 8)
                assert all(L == 0 for _, L in series.l_values()), (n, seed)


def test_dense_oracle_agreement():
    for seed in range(8):
        n = 2 + seed % 4
        vf = random_field(n, seed + 100)
        series = compute_series(vf, n + 2)
        for k in range(3, 2 * (n + 2) + 3):
            R = accumulate_rhs(series, k)
            fast = rotational_solve(k, R)
            dense = dense_rotational_solve(k, R)
            assert fast[0].coeffs == dense[0].coeffs
            assert fast[1] == dense[1]


def test_unknown_mode_quadratic_forms():
    vf = random_homogeneous_field(2, seed=5)
    series = compute_series_unknown(vf, [2], J=4)
    assert [u.slot for u in series.unknowns] == [(3, 0), (2, 1), (1, 2), (0, 3)]
    for j in (1, 2, 3, 4):
        form = series.L[j]
        assert isinstance(form, LinearForm)
        assert form.const == 0
        assert len(form.coeffs) == 4


def test_unknown_mode_cubic_leading_constant_decoupled():
    # at odd top degree the first constant never involves the block unknowns
    vf = random_homogeneous_field(3, seed=6)
    series = compute_series_unknown(vf, [3], J=5)
    lead = series.L[1]
    assert isinstance(lead, LinearForm) and not lead.carries_unknowns()
    assert lead.const == compute_series(vf, 1).L[1]
    # later constants do involve them
    assert series.L[2].carries_unknowns()


def test_unknown_mode_matches_plain_on_substitution():
    for seed in range(4):
        n = 2 + seed % 3
        vf = random_field(n, seed + 7)
        J = n + 3
        unknown = compute_series_unknown(vf, range(2, n + 1), J)
        plain = compute_series(vf, J)
        evaluated = unknown.evaluate_at(unknown.plain_assignment())
        for j, L in plain.l_values():
            assert evaluated.L[j] == L, (n, seed, j)
        for k in plain.V:
            assert evaluated.V[k].coeffs == plain.V[k].coeffs, (n, seed, k)


def test_unknown_mode_residuals_identically_zero_off_levels():
    vf = random_field(3, seed=8)
    series = compute_series_unknown(vf, [2, 3], J=5)
    for k in range(5, 13):  # degrees above every replaced level
        r = residual(series, k)
        assert all(
            c == 0 or (isinstance(c, LinearForm) and c.is_zero()) for c in r.coeffs
        ), k


def test_budget_and_validation():
    vf = random_homogeneous_field(2, seed=1)
    with pytest.raises(UsageError):
        compute_series(vf, 0)
    with pytest.raises(UsageError):
        compute_series_unknown(vf, [], 3)
    with pytest.raises(UsageError):
        compute_series_unknown(vf, [5], 3)
    series = compute_series(vf, 4)
    assert series.max_index == 4
    assert series.max_degree == 10
    assert series.V[2].coeffs == (F(1, 2), 0, F(1, 2))
