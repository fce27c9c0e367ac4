"""Coefficient domains: exact rationals, extended-precision reals, linear forms.

Every higher layer of the package is generic over a small "scalar" protocol:
values combine with ``+ - * /`` and with plain ints, and ``x == 0`` is a
meaningful zero test.  Three carriers satisfy it:

  * ``fractions.Fraction``     -- exact rational mode (the default),
  * ``mpmath.mpf``             -- extended-precision real mode,
  * ``LinearForm``             -- an affine form  c0 + sum_i c_i * u_i  in
                                  registered unknowns, over either base carrier.

A linear form may be multiplied or divided by a concrete scalar, but the
product of two forms that both carry unknowns is refused: the degree-by-degree
recursion never needs it, and allowing it would silently create quadratic
expressions in the unknowns.

A ``Domain`` object packages the carrier choice, the conversion of ints /
Fractions / text into it, and (for the floating carrier) the working precision
and the magnitude below which a value is treated as zero by the analysis
layers.  Domain values are immutable and freely shareable between threads; the
extended-precision domain installs its precision via a context manager around
each top-level computation, so concurrent computations at different precisions
must run in separate processes (mpmath's precision is process-global).
"""

from __future__ import annotations

from contextlib import contextmanager, nullcontext
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping, Union

import mpmath as mp

from .errors import UsageError

#: Unknowns are labelled by the (x-exponent, y-exponent) slot they stand for.
UnknownId = tuple[int, int]

Scalar = Union[int, Fraction, mp.mpf, "LinearForm"]


def parse_rational(text: str) -> Fraction:
    """Parse ``p/q``, integer, or decimal text into an exact Fraction.

    Decimals are scaled by the exact power of ten ("0.25" -> 1/4); binary
    floating point is never involved.
    """
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"not a rational number: {text!r}") from exc


class LinearForm:
    """Affine expression ``const + sum coeffs[u] * u`` over formal unknowns.

    Coefficients and the constant live in a concrete base carrier (Fraction or
    mpf).  Structurally zero coefficients are pruned on construction so the
    exact zero test is just "constant is zero and no coefficients survive".
    """

    __slots__ = ("const", "coeffs")

    def __init__(self, const: Scalar = 0, coeffs: Mapping[UnknownId, Scalar] | None = None):
        self.const = const
        self.coeffs: dict[UnknownId, Scalar] = {}
        if coeffs:
            for uid, c in coeffs.items():
                if c != 0:
                    self.coeffs[uid] = c

    @classmethod
    def unknown(cls, uid: UnknownId, one: Scalar = 1) -> "LinearForm":
        return cls(0, {uid: one})

    def is_zero(self) -> bool:
        return self.const == 0 and not self.coeffs

    def carries_unknowns(self) -> bool:
        return bool(self.coeffs)

    def evaluate(self, assignment: Mapping[UnknownId, Scalar]) -> Scalar:
        """Substitute concrete values for every unknown this form mentions."""
        total = self.const
        for uid, c in self.coeffs.items():
            total = total + c * assignment[uid]
        return total

    def coefficient(self, uid: UnknownId) -> Scalar:
        return self.coeffs.get(uid, 0)

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, LinearForm):
            out = dict(self.coeffs)
            for uid, c in other.coeffs.items():
                out[uid] = out.get(uid, 0) + c
            return LinearForm(self.const + other.const, out)
        return LinearForm(self.const + other, self.coeffs)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return LinearForm(-self.const, {uid: -c for uid, c in self.coeffs.items()})

    def __mul__(self, other):
        if isinstance(other, LinearForm):
            if other.carries_unknowns():
                if self.carries_unknowns():
                    raise UsageError("product of two unknown-carrying linear forms")
                return other * self.const
            other = other.const
        return LinearForm(self.const * other, {uid: c * other for uid, c in self.coeffs.items()})

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, LinearForm):
            if other.carries_unknowns():
                raise UsageError("division by an unknown-carrying linear form")
            other = other.const
        return LinearForm(self.const / other, {uid: c / other for uid, c in self.coeffs.items()})

    def __eq__(self, other):
        if isinstance(other, LinearForm):
            return self.const == other.const and self.coeffs == other.coeffs
        return not self.coeffs and self.const == other

    def __hash__(self):
        return hash((self.const, tuple(sorted(self.coeffs.items()))))

    def __repr__(self):
        terms = [repr(self.const)] if self.const != 0 or not self.coeffs else []
        terms += [f"{c!r}*u{uid}" for uid, c in sorted(self.coeffs.items())]
        return " + ".join(terms) if terms else "0"


@dataclass(frozen=True)
class RationalDomain:
    """Exact rational coefficients (fractions.Fraction)."""

    name: str = "rational"
    exact: bool = True

    def coerce(self, x) -> Scalar:
        if isinstance(x, (Fraction, LinearForm)):
            return x
        if isinstance(x, int):
            return Fraction(x)
        if isinstance(x, str):
            return parse_rational(x)
        raise UsageError(f"cannot coerce {type(x).__name__} into rational domain")

    def context(self):
        return nullcontext()

    def is_negligible(self, x) -> bool:
        return x == 0

    def to_str(self, x) -> str:
        return str(x)


@dataclass(frozen=True)
class BigRealDomain:
    """Extended-precision real coefficients at a fixed decimal precision.

    ``dps`` is the number of decimal digits carried per operation (>= 30).
    Analysis layers treat magnitudes below 10**(20 - dps) as zero (no exact
    zero test exists in floating mode); the 20-digit headroom absorbs the
    error-amplification of quantities derived from dps-digit data, e.g. a
    root-resolution residual passing through steep polynomial stages.
    """

    dps: int = 60
    name: str = "bigreal"
    exact: bool = False

    def __post_init__(self):
        if self.dps < 30:
            raise UsageError("extended-precision domain needs at least 30 digits")

    def coerce(self, x) -> Scalar:
        if isinstance(x, LinearForm):
            return x
        with mp.workdps(self.dps):
            if isinstance(x, Fraction):
                return mp.mpf(x.numerator) / x.denominator
            if isinstance(x, str):
                if "/" in x:
                    num, _, den = x.partition("/")
                    return mp.mpf(num.strip()) / mp.mpf(den.strip())
                return mp.mpf(x.strip())
            return mp.mpf(x)

    @contextmanager
    def context(self) -> Iterator[None]:
        with mp.workdps(self.dps):
            yield

    @property
    def zero_threshold(self) -> mp.mpf:
        with mp.workdps(self.dps):
            return mp.mpf(10) ** (20 - self.dps)

    def is_negligible(self, x) -> bool:
        return abs(x) < self.zero_threshold

    def to_str(self, x) -> str:
        with mp.workdps(self.dps):
            return mp.nstr(mp.mpf(x), self.dps)

    def widened(self, factor: int = 2) -> "BigRealDomain":
        return BigRealDomain(dps=self.dps * factor)


Domain = Union[RationalDomain, BigRealDomain]

RATIONAL = RationalDomain()


def scalar_is_zero(x, domain: Domain) -> bool:
    """Zero test appropriate to the domain: exact for rationals, thresholded
    for extended-precision reals.  Linear forms are tested structurally."""
    if isinstance(x, LinearForm):
        return x.is_zero()
    return domain.is_negligible(x)


def scalar_to_str(x, domain: Domain) -> str:
    """Lossless text for a scalar: 'p/q' in rational mode, a full-precision
    decimal in floating mode."""
    if isinstance(x, LinearForm):
        inner = {uid: scalar_to_str(c, domain) for uid, c in sorted(x.coeffs.items())}
        return f"LinearForm(const={scalar_to_str(x.const, domain)}, coeffs={inner})"
    if isinstance(x, int):
        return str(x)
    return domain.to_str(x)
