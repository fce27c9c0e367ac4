"""A cubic family with eight small-amplitude limit cycles.

The family

    dx/dt = -y + a1 x^2 - 2 b1 x y + (a3 - a1) y^2 - a5 x^2 y - a7 y^3
    dy/dt =  x + b1 x^2 + 2 a1 x y - b1 y^2 - b4 x^3 - b5 x^2 y - (b6 - a5) x y^2

admits a parameter resolution that makes the first seven Lyapunov constants
vanish while the eighth stays nonzero.  The stages, in order:

    a3 = b5 = 0                          kills L_1, L_2
    a7 = -b4                             kills L_3
    a1 = sqrt((b8-a8)/2), b1 = sqrt((b8+a8)/2), a5 = a7 - a9 + b6/2
        followed by a8 = (13 a9 b6 + 60 b4 b6) / (20 (a9 + 4 b4))     kills L_4
    b8 = rational function of (a9, b4)                                kills L_5
    b6^2 = rational function of (a9, b4)                              kills L_6
    a9 = sigma b4 with sigma a root of the integer polynomial Q       kills L_7

Q has four real roots but only two leave b6^2 positive; those two admissible
roots sit in known rational brackets and are refined here by safeguarded
Newton iteration at the requested precision.  a1 and b1 take the positive
square root.  Both b6 branches give valid family members with the same seven
vanishing constants; the default branch is the one whose L_8 is negative for
b4 < 0 (the opposite branch flips the signs of L_8 and of the odd-degree
certificate-matrix columns), and the other remains selectable so both can be
recorded.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath as mp

from .engine import compute_series
from .errors import SolverInternalError, StageDomainError, UsageError
from .fields import VectorField
from .hpoly import HomogPoly
from .scalars import BigRealDomain, Scalar
from .structure import build_p_matrix

#: Coefficients of Q(sigma), constant term first, leading coefficient last.
Q_COEFFS: tuple[int, ...] = (
    210691031040000000,
    389728972800000000,
    308644781875200000,
    136983308014080000,
    37257726560256000,
    6325502424166400,
    642634655826240,
    33468743564464,
    447644512436,
    -5941780227,
    1324524586,
)

# Transcription anchors: a mistyped table would break every root bracket.
assert Q_COEFFS[0] == 210691031040000000
assert Q_COEFFS[10] == 1324524586

#: Rational brackets known to isolate the two admissible roots of Q.
SIGMA1_BRACKET = (Fraction(-17166571, 2500000), Fraction(-1716657, 250000))
SIGMA2_BRACKET = (Fraction(-11335691, 5000000), Fraction(-11335689, 5000000))

#: Branch of b6 whose L_8 comes out negative for b4 < 0.
DEFAULT_B6_SIGN = -1

#: Column order used for the published form of the 8x8 certificate matrix.
REPORT_COLUMN_ORDER: tuple[tuple[int, int], ...] = (
    (0, 3), (0, 4), (1, 2), (1, 3), (2, 1), (3, 0), (3, 1), (4, 0),
)


@dataclass(frozen=True)
class CubicFamilyParams:
    """One member of the family.  ``b2 = sqrt(-b4)`` is kept purely for
    display scaling of the certificate matrix; computation uses b4 itself."""

    a1: Scalar = 0
    b1: Scalar = 0
    a3: Scalar = 0
    a5: Scalar = 0
    a7: Scalar = 0
    a8: Scalar = 0
    a9: Scalar = 0
    b4: Scalar = 0
    b5: Scalar = 0
    b6: Scalar = 0
    b8: Scalar = 0
    sigma: Scalar | None = None
    b2: Scalar | None = None

    def as_dict(self) -> dict[str, Scalar]:
        return {
            name: getattr(self, name)
            for name in ("a1", "b1", "a3", "a5", "a7", "a8", "a9", "b4", "b5", "b6", "b8")
        }


def q_eval(x: Scalar, coeffs: Sequence[int] = Q_COEFFS) -> Scalar:
    """Horner evaluation; exact when x is a Fraction."""
    acc: Scalar = 0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def q_derivative_eval(x: Scalar) -> Scalar:
    acc: Scalar = 0
    for power in range(len(Q_COEFFS) - 1, 0, -1):
        acc = acc * x + power * Q_COEFFS[power]
    return acc


def count_real_roots() -> int:
    """Number of distinct real roots of Q, by exact Sturm-chain sign counting
    over the whole line."""
    chain = _sturm_chain([Fraction(c) for c in Q_COEFFS])
    return _sign_changes_at_minus_inf(chain) - _sign_changes_at_plus_inf(chain)


def _sturm_chain(poly: list[Fraction]) -> list[list[Fraction]]:
    def derivative(p: list[Fraction]) -> list[Fraction]:
        return [i * c for i, c in enumerate(p)][1:]

    def poly_mod(num: list[Fraction], den: list[Fraction]) -> list[Fraction]:
        num = num[:]
        while len(num) >= len(den) and any(c != 0 for c in num):
            if num[-1] == 0:
                num.pop()
                continue
            factor = num[-1] / den[-1]
            shift = len(num) - len(den)
            for i, c in enumerate(den):
                num[shift + i] -= factor * c
            num.pop()
        while num and num[-1] == 0:
            num.pop()
        return num

    chain = [poly, derivative(poly)]
    while chain[-1]:
        rem = poly_mod(chain[-2], chain[-1])
        if not rem:
            break
        chain.append([-c for c in rem])
    return chain


def _sign_changes(signs: list[int]) -> int:
    signs = [s for s in signs if s != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a * b < 0)


def _sign_changes_at_minus_inf(chain: list[list[Fraction]]) -> int:
    signs = []
    for p in chain:
        lead = p[-1]
        deg = len(p) - 1
        s = 1 if lead > 0 else -1
        signs.append(s if deg % 2 == 0 else -s)
    return _sign_changes(signs)


def _sign_changes_at_plus_inf(chain: list[list[Fraction]]) -> int:
    return _sign_changes([1 if p[-1] > 0 else -1 for p in chain])


def count_sign_changes_between(a: Fraction, b: Fraction) -> int:
    """Distinct real roots of Q in (a, b], by the same Sturm chain."""
    chain = _sturm_chain([Fraction(c) for c in Q_COEFFS])

    def changes(x: Fraction) -> int:
        signs = []
        for p in chain:
            val = sum(c * x**i for i, c in enumerate(p))
            signs.append(0 if val == 0 else (1 if val > 0 else -1))
        return _sign_changes(signs)

    return changes(a) - changes(b)


def b6_squared_value(a9: Scalar, b4: Scalar) -> Scalar:
    """The squared-b6 stage as a rational function of (a9, b4)."""
    num = 25 * (
        77851 * a9**6
        + 2086817 * a9**5 * b4
        + 24208900 * a9**4 * b4**2
        + 155084544 * a9**3 * b4**3
        + 568011840 * a9**2 * b4**4
        + 1104076800 * a9 * b4**5
        + 870912000 * b4**6
    )
    den = 36 * (
        596 * a9**4
        + 16780 * a9**3 * b4
        + 173525 * a9**2 * b4**2
        + 777000 * a9 * b4**3
        + 1260000 * b4**4
    )
    if den == 0:
        raise StageDomainError("b6_squared", "denominator vanished")
    return num / den


def sigma_is_admissible(sigma: Scalar) -> bool:
    """A real root of Q only yields a real b6 when the squared-b6 stage is
    nonnegative; b4 enters that stage through an even power, so the test
    depends on sigma alone."""
    return b6_squared_value(sigma, 1 if isinstance(sigma, Fraction) else mp.mpf(1)) >= 0


def _newton_refine(bracket: tuple[Fraction, Fraction], dps: int) -> tuple[mp.mpf, list[mp.mpf]]:
    """Safeguarded Newton iteration inside an exact sign-change bracket.

    Returns the root and the |Q| residual history of the Newton steps."""
    lo, hi = bracket
    sa, sb = q_eval(lo), q_eval(hi)
    if sa == 0 or sb == 0 or (sa > 0) == (sb > 0):
        raise SolverInternalError(
            "no sign change in the root bracket; coefficient table is corrupt"
        )
    with mp.workdps(dps):
        a = mp.mpf(lo.numerator) / lo.denominator
        b = mp.mpf(hi.numerator) / hi.denominator
        fa = q_eval(a)
        x = (a + b) / 2
        history: list[mp.mpf] = []
        tol = mp.mpf(10) ** (-(dps - 2))
        for _ in range(dps + 60):
            fx = q_eval(x)
            history.append(abs(fx))
            if fx == 0:
                break
            if (fx > 0) == (fa > 0):
                a = x
            else:
                b = x
            dfx = q_derivative_eval(x)
            step_ok = dfx != 0
            if step_ok:
                nxt = x - fx / dfx
                step_ok = a < nxt < b
            if not step_ok:
                nxt = (a + b) / 2  # bisection fallback keeps the bracket
            if abs(nxt - x) <= tol * abs(x):
                x = nxt
                history.append(abs(q_eval(x)))
                break
            x = nxt
        return x, history


def find_sigma_roots(precision: int = 60) -> tuple[mp.mpf, mp.mpf]:
    """The two admissible roots of Q at the requested decimal precision.

    Each returned value x satisfies |Q(x)| < 10^(20-precision) |Q'(x) x|.
    """
    if precision < 40:
        raise UsageError("root refinement needs precision >= 40")
    roots = []
    with mp.workdps(precision):
        for bracket in (SIGMA1_BRACKET, SIGMA2_BRACKET):
            x, _ = _newton_refine(bracket, precision)
            bound = mp.mpf(10) ** (20 - precision) * abs(q_derivative_eval(x) * x)
            if not abs(q_eval(x)) < bound:
                raise SolverInternalError(
                    f"root refinement stalled: |Q| residual {abs(q_eval(x))} "
                    f"exceeds {bound}"
                )
            roots.append(x)
    return roots[0], roots[1]


def substitution_chain(
    b4: Scalar, sigma: Scalar, precision: int = 60, b6_sign: int = DEFAULT_B6_SIGN
) -> CubicFamilyParams:
    """Resolve the full parameter set from (b4, sigma).

    Raises StageDomainError naming the stage whose denominator vanishes or
    whose radicand goes negative.  ``b6_sign`` selects the square-root branch
    for b6 (+1 by default; both branches are legitimate family members).
    """
    if b6_sign not in (1, -1):
        raise UsageError("b6_sign must be +1 or -1")
    with mp.workdps(precision):
        b4 = mp.mpf(b4.numerator) / b4.denominator if isinstance(b4, Fraction) else mp.mpf(b4)
        if not b4 < 0:
            raise StageDomainError("b4", "b4 must be negative")
        sigma = mp.mpf(sigma)
        a9 = sigma * b4

        b6_sq = b6_squared_value(a9, b4)
        if b6_sq < 0:
            raise StageDomainError("b6_squared", f"negative radicand {b6_sq}")
        b6 = b6_sign * mp.sqrt(b6_sq)

        a8_den = 20 * (a9 + 4 * b4)
        if a8_den == 0:
            raise StageDomainError("a8", "denominator vanished")
        a8 = (13 * a9 * b6 + 60 * b4 * b6) / a8_den

        b8_den = 48 * (2 * a9**2 + 23 * a9 * b4 + 60 * b4**2)
        if b8_den == 0:
            raise StageDomainError("b8", "denominator vanished")
        b8 = (-601 * a9**3 - 7240 * a9**2 * b4 - 30480 * a9 * b4**2 - 43200 * b4**3) / b8_den

        ra = (b8 - a8) / 2
        if ra < 0:
            raise StageDomainError("a1", f"negative radicand {ra}")
        rb = (b8 + a8) / 2
        if rb < 0:
            raise StageDomainError("b1", f"negative radicand {rb}")
        a1 = mp.sqrt(ra)
        b1 = mp.sqrt(rb)

        a7 = -b4
        a5 = a7 - a9 + b6 / 2
        b2 = mp.sqrt(-b4)
        return CubicFamilyParams(
            a1=a1, b1=b1, a3=mp.mpf(0), a5=a5, a7=a7, a8=a8, a9=a9,
            b4=b4, b5=mp.mpf(0), b6=b6, b8=b8, sigma=sigma, b2=b2,
        )


def family_vector_field(params: CubicFamilyParams, precision: int = 60) -> VectorField:
    """The degree-3 field for one parameter set.

    Only the sign condition on b4 is enforced here (b4 <= 0); the stage
    consistency relations are checked by the resolution pipeline, so partially
    substituted family members remain constructible.
    """
    p = params
    if p.b4 > 0:
        raise UsageError("b4 must be <= 0 in this family")
    domain = BigRealDomain(dps=precision)
    with domain.context():
        c = domain.coerce
        F2 = HomogPoly(2, [c(p.a1), c(-2 * p.b1), c(p.a3 - p.a1)])
        G2 = HomogPoly(2, [c(p.b1), c(2 * p.a1), c(-p.b1)])
        F3 = HomogPoly(3, [c(0), c(-p.a5), c(0), c(-p.a7)])
        G3 = HomogPoly(3, [c(-p.b4), c(-p.b5), c(-(p.b6 - p.a5)), c(0)])
        return VectorField(3, {2: F2, 3: F3}, {2: G2, 3: G3}, domain)


def reproduce_example(
    root: int = 1,
    b4: Scalar | Fraction = Fraction(-1),
    precision: int = 60,
    b6_sign: int = DEFAULT_B6_SIGN,
    scaling_check_second_b4: Fraction | None = None,
) -> dict:
    """Full quantitative reproduction for one admissible root.

    Resolves the parameters, computes L_1..L_8, builds the 8x8 certificate
    matrix in the published column order, and reports the b4-scaled values
    L_8 / b4^8 and det(P) / b4^30.  The two scaling exponents are verified by
    recomputing at a second b4 value and comparing ratios rather than assumed.
    """
    if root not in (1, 2):
        raise UsageError("root must be 1 or 2")
    if isinstance(b4, (int, str)):
        b4 = Fraction(b4)

    sigma1, sigma2 = find_sigma_roots(precision)
    sigma = sigma1 if root == 1 else sigma2
    second_b4 = scaling_check_second_b4
    if second_b4 is None:
        second_b4 = (b4 if isinstance(b4, Fraction) else Fraction(-1)) / 2

    main = _resolved_run(sigma, b4, precision, b6_sign)
    other = _resolved_run(sigma, second_b4, precision, b6_sign)

    with mp.workdps(precision):
        ratio = mp.mpf(second_b4.numerator) / second_b4.denominator
        ratio /= mp.mpf(Fraction(b4).numerator) / Fraction(b4).denominator
        l8_dev = abs(other["L8"] / main["L8"] / ratio**8 - 1)
        det_dev = abs(other["detP"] / main["detP"] / ratio**30 - 1)

    domain = BigRealDomain(dps=precision)
    report = {
        "schema": "bautin-lab/1",
        "root_index": root,
        "precision": precision,
        "b6_sign": b6_sign,
        "sigma": domain.to_str(sigma),
        "b4": str(Fraction(b4)),
        "params": {k: domain.to_str(v) for k, v in main["params"].as_dict().items()},
        "L": {str(j): domain.to_str(v) for j, v in main["series"].l_values()},
        "L8_over_b4_8": domain.to_str(main["L8_scaled"]),
        "detP": domain.to_str(main["detP"]),
        "detP_over_b4_30": domain.to_str(main["detP_scaled"]),
        "P": {
            "rows": [f"L{j}" for j in main["P"].row_labels],
            "columns": [f"v{i}{j}" for i, j in main["P"].col_labels],
            "entries": [[domain.to_str(e) for e in row] for row in main["P"].entries],
            "row_offsets": [domain.to_str(o) for o in main["P"].row_offsets],
        },
        "scaling_check": {
            "second_b4": str(second_b4),
            "l8_exponent": 8,
            "l8_relative_deviation": domain.to_str(l8_dev),
            "det_exponent": 30,
            "det_relative_deviation": domain.to_str(det_dev),
        },
    }
    return report


def _resolved_run(sigma: mp.mpf, b4: Fraction, precision: int, b6_sign: int) -> dict:
    params = substitution_chain(b4, sigma, precision, b6_sign)
    vf = family_vector_field(params, precision)
    series = compute_series(vf, 8)
    P = build_p_matrix(vf, column_order=REPORT_COLUMN_ORDER)
    with mp.workdps(precision):
        det = P.determinant()
        b4f = mp.mpf(b4.numerator) / b4.denominator
        return {
            "params": params,
            "series": series,
            "P": P,
            "L8": series.L[8],
            "detP": det,
            "L8_scaled": series.L[8] / b4f**8,
            "detP_scaled": det / b4f**30,
        }
