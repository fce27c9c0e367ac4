"""Degree-by-degree construction of Lyapunov functions and constants.

For a field (F, G) the formal derivative of V = V_2 + V_3 + ... with
V_2 = (x^2 + y^2)/2 along the flow is matched, degree by degree, against
L_1 (x^2+y^2)^2 + L_2 (x^2+y^2)^3 + ....  Writing rot for the operator
x*d/dy - y*d/dx, the degree-K slice reads

    rot(V_K) + R_K  =  [K even] * L_(K/2-1) * (x^2+y^2)^(K/2),

where R_K collects the already-known lower terms

    R_K = sum over d = 2..n of  (V_(K+1-d))'_x F_d + (V_(K+1-d))'_y G_d,

terms with K+1-d < 2 omitted (V_2 contributes x F_(K-1) + y G_(K-1)).

Because rot maps the monomial slot a (the y-exponent) only to slots a-1 and
a+1, the K+1 equations decouple by slot parity into two chains:

  * odd K: both chains are square bidiagonal systems with unit-free integer
    coefficients, solved by forward/backward substitution -- unique V_K, no L;
  * even K: the even-slot equations couple the odd-slot coefficients together
    with L (square, nonsingular: solved by carrying the solution as an affine
    function of L and closing with the last equation); the odd-slot equations
    leave the even-slot coefficients with a one-dimensional kernel spanned by
    (x^2+y^2)^(K/2), resolved by pinning one designated slot to zero.

The pinned slot at even K with half-degree h = K/2 is (h, h) for even h and
(h-1, h+1) for odd h; the fixed value is always zero.

Two computation modes share this machinery.  Plain mode solves every degree
concretely.  Unknown-carrying mode, used for the center-certificate matrix,
replaces the independent coefficients of selected directly-driven blocks by
formal unknowns and propagates all later degrees as linear forms in them.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import SolverInternalError, UsageError
from .fields import VectorField
from .hpoly import HomogPoly, circle_power, rot_apply
from .scalars import RATIONAL, Domain, LinearForm, Scalar, UnknownId


def tiebreak_slot(degree: int) -> tuple[int, int]:
    """The even-degree coefficient slot pinned to zero: (h, h) when the
    half-degree h is even, else (h-1, h+1)."""
    if degree % 2 != 0:
        raise UsageError("tie-break slots exist only at even degrees")
    h = degree // 2
    return (h, h) if h % 2 == 0 else (h - 1, h + 1)


@dataclass(frozen=True)
class TieBreakRecord:
    """One pinned slot: at even degree k the coefficient of x^slot[0] y^slot[1]
    in V_k was fixed to 0 to select a unique solution."""

    degree: int
    slot: tuple[int, int]
    value: int = 0


@dataclass(frozen=True)
class Unknown:
    """A formal unknown standing for one independent coefficient of a
    directly-driven homogeneous block V^h (slot = (x-exp, y-exp)), together
    with the concrete value that block takes in plain mode."""

    slot: UnknownId
    level: int
    plain_value: Scalar


@dataclass
class LyapunovSeries:
    """Computed Lyapunov-function terms V_k and constants L_j.

    ``V`` maps degree k -> HomogPoly (V_2 included), ``L`` maps index j -> the
    constant solved at degree 2j+2.  In unknown-carrying mode the V and L
    entries hold linear forms over the registered unknowns and ``unknowns``
    lists them in registration order (ascending level, then descending
    x-power)."""

    field: VectorField
    mode: str  # "plain" | "unknown"
    domain: Domain
    V: dict[int, HomogPoly] = dataclass_field(default_factory=dict)
    L: dict[int, Scalar] = dataclass_field(default_factory=dict)
    tiebreaks: list[TieBreakRecord] = dataclass_field(default_factory=list)
    unknowns: list[Unknown] = dataclass_field(default_factory=list)
    #: per replaced level: the response part of that block at the unknown
    #: slots, as linear forms in the lower-level unknowns
    level_responses: dict[int, dict[UnknownId, Scalar]] = dataclass_field(default_factory=dict)

    @property
    def max_index(self) -> int:
        return max(self.L, default=0)

    @property
    def max_degree(self) -> int:
        return max(self.V, default=2)

    def l_values(self) -> list[tuple[int, Scalar]]:
        return sorted(self.L.items())

    def plain_assignment(self) -> dict[UnknownId, Scalar]:
        """Map each unknown to the concrete value its slot takes in plain mode."""
        return {u.slot: u.plain_value for u in self.unknowns}

    def evaluate_at(self, assignment: Mapping[UnknownId, Scalar]) -> "LyapunovSeries":
        """Substitute concrete values for the unknowns in every V and L."""
        def subst(x: Scalar) -> Scalar:
            return x.evaluate(assignment) if isinstance(x, LinearForm) else x

        out = LyapunovSeries(self.field, "plain", self.domain)
        out.V = {k: p.map_coeffs(subst) for k, p in self.V.items()}
        out.L = {j: subst(v) for j, v in self.L.items()}
        out.tiebreaks = list(self.tiebreaks)
        return out


def accumulate_rhs(series: LyapunovSeries, k: int, include_direct: bool = True) -> HomogPoly:
    """The degree-k source term R_k built from already-solved V terms.

    ``include_direct=False`` drops the d = k-1 contribution x*F_(k-1) +
    y*G_(k-1) (the one coming from V_2), which the unknown-carrying mode
    handles separately.
    """
    vf = series.field
    total = HomogPoly.zero(k)
    top = min(vf.degree, k - 1 if include_direct else k - 2)
    for d in range(2, top + 1):
        Vm = series.V.get(k + 1 - d)
        if Vm is None or Vm.is_zero():
            continue
        Fd = vf.f_part(d)
        Gd = vf.g_part(d)
        if not Fd.is_zero():
            total = total + Vm.dx() * Fd
        if not Gd.is_zero():
            total = total + Vm.dy() * Gd
    return total


def rotational_solve(
    k: int, R: HomogPoly, domain: Domain = RATIONAL
) -> tuple[HomogPoly, Scalar | None, TieBreakRecord | None]:
    """Solve rot(V) + R = [k even] * L * (x^2+y^2)^(k/2) for V (and L).

    Returns (V, L, tiebreak); L and the tie-break record are None at odd
    degrees.  The two parity chains are always solvable in exact arithmetic;
    a vanishing closing denominator would mean a solver bug, not bad input.
    """
    if k < 3:
        raise UsageError("rotational solve needs degree >= 3")
    if R.degree != k:
        raise UsageError(f"source term has degree {R.degree}, expected {k}")
    c = [domain.coerce(x) if isinstance(x, int) else x for x in R.coeffs]
    v: list[Scalar | None] = [None] * (k + 1)

    if k % 2 == 1:
        # Equation at slot b: (b+1) v[b+1] - (k-b+1) v[b-1] + c[b] = 0.
        for b in range(0, k, 2):  # determines odd slots, left to right
            v[b + 1] = -c[0] if b == 0 else ((k - b + 1) * v[b - 1] - c[b]) / (b + 1)
        for b in range(k, 0, -2):  # determines even slots, right to left
            v[b - 1] = c[k] if b == k else ((b + 1) * v[b + 1] + c[b]) / (k - b + 1)
        return HomogPoly(k, v), None, None

    cp = circle_power(k // 2).coeffs
    # Odd slots plus L: carry v[odd] = base + L * unit, with `unit` concrete,
    # then close with the slot-k equation  -v[k-1] + c[k] = L.
    base: dict[int, Scalar] = {}
    unit: dict[int, Scalar] = {}
    for b in range(0, k, 2):
        if b == 0:
            base[1] = -c[0]
            unit[1] = domain.coerce(cp[0])
        else:
            base[b + 1] = ((k - b + 1) * base[b - 1] - c[b]) / (b + 1)
            unit[b + 1] = ((k - b + 1) * unit[b - 1] + cp[b]) / (b + 1)
    den = 1 + unit[k - 1]
    if den == 0:
        raise SolverInternalError(f"closing denominator vanished at degree {k}")
    L = (c[k] - base[k - 1]) / den
    for a in range(1, k, 2):
        v[a] = base[a] + L * unit[a]

    # Even slots: bidiagonal chain with nullity one, pinned at the designated slot.
    slot = tiebreak_slot(k)
    a_t = slot[1]
    v[a_t] = domain.coerce(0)
    for b in range(a_t + 1, k, 2):
        v[b + 1] = ((k - b + 1) * v[b - 1] - c[b]) / (b + 1)
    for b in range(a_t - 1, 0, -2):
        v[b - 1] = ((b + 1) * v[b + 1] + c[b]) / (k - b + 1)
    return HomogPoly(k, v), L, TieBreakRecord(k, slot)


def dense_rotational_solve(
    k: int, R: HomogPoly
) -> tuple[HomogPoly, Scalar | None, TieBreakRecord | None]:
    """Oracle for rotational_solve: assemble the full linear system over exact
    rationals (tie-break row included) and run dense Gaussian elimination.

    Kept deliberately independent of the structured parity-chain solver so the
    two can be compared on every degree of a run.
    """
    if k < 3:
        raise UsageError("rotational solve needs degree >= 3")
    if R.degree != k:
        raise UsageError(f"source term has degree {R.degree}, expected {k}")
    even = k % 2 == 0
    ncols = k + 2 if even else k + 1  # v_0..v_k (+ L)
    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    cp = circle_power(k // 2).coeffs if even else None
    for b in range(k + 1):
        row = [Fraction(0)] * ncols
        if b + 1 <= k:
            row[b + 1] = Fraction(b + 1)
        if b - 1 >= 0:
            row[b - 1] = Fraction(-(k - b + 1))
        if even:
            row[k + 1] = Fraction(-cp[b])
        rows.append(row)
        rhs.append(Fraction(-R.coeffs[b]))
    tb = None
    if even:
        tb = TieBreakRecord(k, tiebreak_slot(k))
        row = [Fraction(0)] * ncols
        row[tb.slot[1]] = Fraction(1)
        rows.append(row)
        rhs.append(Fraction(0))

    sol = _gauss_solve(rows, rhs)
    V = HomogPoly(k, sol[: k + 1])
    return (V, sol[k + 1], tb) if even else (V, None, None)


def _gauss_solve(rows: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    """Exact Gaussian elimination for a consistent square-rank system."""
    m, n = len(rows), len(rows[0])
    A = [row[:] + [b] for row, b in zip(rows, rhs)]
    piv_rows: list[tuple[int, int]] = []
    r = 0
    for col in range(n):
        piv = next((i for i in range(r, m) if A[i][col] != 0), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        for i in range(m):
            if i != r and A[i][col] != 0:
                f = A[i][col] / A[r][col]
                A[i] = [a - f * b for a, b in zip(A[i], A[r])]
        piv_rows.append((r, col))
        r += 1
    for i in range(r, m):
        if A[i][n] != 0:
            raise SolverInternalError("dense oracle hit an inconsistent system")
    if len(piv_rows) != n:
        raise SolverInternalError("dense oracle hit a rank-deficient system")
    sol = [Fraction(0)] * n
    for i, col in piv_rows:
        sol[col] = A[i][n] / A[i][col]
    return sol


def compute_series(vf: VectorField, J: int) -> LyapunovSeries:
    """Plain-mode series: V_3..V_(2J+2) and L_1..L_J in the field's domain."""
    if J < 1:
        raise UsageError("need at least one Lyapunov constant (J >= 1)")
    domain = vf.domain
    series = LyapunovSeries(vf, "plain", domain)
    with domain.context():
        half = domain.coerce(Fraction(1, 2))
        series.V[2] = HomogPoly(2, [half, 0, half])
    return extend_series(series, J)


def extend_series(series: LyapunovSeries, J: int) -> LyapunovSeries:
    """Continue a plain-mode series in place until L_J is solved.

    Lets callers that only need the first nonzero constant grow the budget
    one pattern index at a time instead of paying for the full run up front.
    """
    if series.mode != "plain":
        raise UsageError("only plain-mode series can be extended")
    domain = series.domain
    with domain.context():
        for k in range(series.max_degree + 1, 2 * J + 3):
            R = accumulate_rhs(series, k)
            Vk, L, tb = rotational_solve(k, R, domain)
            series.V[k] = Vk
            if L is not None:
                series.L[k // 2 - 1] = L
            if tb is not None:
                series.tiebreaks.append(tb)
        return series


def compute_series_unknown(
    vf: VectorField, levels: Iterable[int], J: int
) -> LyapunovSeries:
    """Unknown-carrying series: like compute_series, but at each degree k+1
    with k in ``levels`` the directly-driven block is solved, its independent
    coefficients are replaced by fresh formal unknowns, and the response to
    the accumulated lower contributions is added on top.  Every later V and L
    is then a linear form in the registered unknowns.

    At an even driven degree the constant solved there keeps the concrete
    directly-driven part as the form's constant term; with no lower levels
    selected (the homogeneous case) that constant carries no unknowns at all.
    """
    levels = sorted(set(levels))
    if not levels:
        raise UsageError("need at least one level to replace by unknowns")
    if any(k < 2 or k > vf.degree for k in levels):
        raise UsageError(f"levels must lie in 2..{vf.degree}")
    if J < 1:
        raise UsageError("need at least one Lyapunov constant (J >= 1)")
    domain = vf.domain
    level_set = set(levels)
    with domain.context():
        series = LyapunovSeries(vf, "unknown", domain)
        half = domain.coerce(Fraction(1, 2))
        series.V[2] = HomogPoly(2, [half, 0, half])
        for k in range(3, 2 * J + 3):
            if k - 1 in level_set:
                x = HomogPoly.monomial(1, 0, domain.coerce(1))
                y = HomogPoly.monomial(0, 1, domain.coerce(1))
                drive = x * vf.f_part(k - 1) + y * vf.g_part(k - 1)
                block, Lh, tb = rotational_solve(k, drive, domain)
                skip = tb.slot if tb is not None else None
                unknown_coeffs: list[Scalar] = [0] * (k + 1)
                for a in range(k + 1):
                    slot = (k - a, a)
                    if slot == skip:
                        continue
                    series.unknowns.append(Unknown(slot, k - 1, block.coeffs[a]))
                    unknown_coeffs[a] = LinearForm.unknown(slot, domain.coerce(1))
                response = accumulate_rhs(series, k, include_direct=False)
                U, Lu, _ = rotational_solve(k, response, domain)
                series.V[k] = HomogPoly(k, unknown_coeffs) + U
                series.level_responses[k - 1] = {
                    (k - a, a): U.coeffs[a] for a in range(k + 1) if (k - a, a) != skip
                }
                if Lu is not None:
                    # Constant part: the L the direct drive alone would produce.
                    series.L[k // 2 - 1] = _as_form(Lu) + Lh
            else:
                R = accumulate_rhs(series, k)
                Vk, L, tb = rotational_solve(k, R, domain)
                series.V[k] = Vk
                if L is not None:
                    series.L[k // 2 - 1] = _as_form(L)
            if k % 2 == 0:
                series.tiebreaks.append(TieBreakRecord(k, tiebreak_slot(k)))
        return series


def _as_form(x: Scalar) -> LinearForm:
    return x if isinstance(x, LinearForm) else LinearForm(x)


def residual(series: LyapunovSeries, k: int) -> HomogPoly:
    """rot(V_k) + R_k - [k even] L * (x^2+y^2)^(k/2); identically zero for
    every plain-mode degree and for every unknown-mode degree that was not
    replaced by formal unknowns."""
    R = accumulate_rhs(series, k)
    out = rot_apply(series.V[k]) + R
    if k % 2 == 0:
        L = series.L.get(k // 2 - 1)
        if L is not None:
            out = out - circle_power(k // 2).scale(L)
    return out
