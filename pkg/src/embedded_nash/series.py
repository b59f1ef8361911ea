"""Truncated power series with fractional exponents and exact coefficients.

Exponents are stored as integers in units of ``1/denom``.  ``prec`` is the
truncation order in the same units (terms of exponent >= prec are unknown);
``None`` marks an exact finite sum.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Mapping, Optional, Union

from .errors import DivisorNotUnit, IncompatibleDenominators, OrderNotOne, PrecisionExhausted

Number = Union[int, Fraction]

MAX_DENOM = 10**6


def _min_prec(*ps: Optional[int]) -> Optional[int]:
    known = [p for p in ps if p is not None]
    return min(known) if known else None


def _add_prec(p: Optional[int], o: Optional[int]) -> Optional[int]:
    if p is None or o is None:
        return None
    return p + o


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


class TruncSeries:
    __slots__ = ("coeffs", "prec", "denom")

    def __init__(self, coeffs: Mapping[int, Number] | None = None, prec: Optional[int] = None, denom: int = 1):
        if denom < 1:
            raise ValueError("denominator must be positive")
        cs = {}
        for e, c in (coeffs or {}).items():
            if c and (prec is None or e < prec):
                cs[int(e)] = Fraction(c)
        g = denom
        for e in cs:
            g = gcd(g, e)
        if prec is not None:
            g = gcd(g, prec)
        if g > 1:
            cs = {e // g: c for e, c in cs.items()}
            denom //= g
            if prec is not None:
                prec //= g
        self.coeffs: dict[int, Fraction] = cs
        self.prec: Optional[int] = prec
        self.denom: int = denom

    # -- construction ---------------------------------------------------

    @classmethod
    def from_terms(cls, terms: Mapping[Number, Number], trunc: Optional[Number] = None) -> "TruncSeries":
        """Build from ``{exponent: coefficient}`` with rational exponents."""
        exps = [Fraction(e) for e in terms]
        d = 1
        for e in exps + ([Fraction(trunc)] if trunc is not None else []):
            d = _lcm(d, e.denominator)
        cs = {int(Fraction(e) * d): c for e, c in terms.items()}
        prec = None if trunc is None else int(Fraction(trunc) * d)
        return cls(cs, prec, d)

    @classmethod
    def monomial(cls, c: Number, e: Number = 0, trunc: Optional[Number] = None) -> "TruncSeries":
        return cls.from_terms({e: c}, trunc)

    @classmethod
    def zero(cls, trunc: Optional[Number] = None) -> "TruncSeries":
        return cls.from_terms({}, trunc)

    # -- inspection -----------------------------------------------------

    @property
    def trunc(self) -> Optional[Fraction]:
        return None if self.prec is None else Fraction(self.prec, self.denom)

    def is_zero(self) -> bool:
        """True when no nonzero term is known (the series may still be O(t^T))."""
        return not self.coeffs

    @property
    def order(self) -> Optional[Fraction]:
        """Minimal exponent, or None for a series that vanishes up to its truncation."""
        if not self.coeffs:
            return None
        return Fraction(min(self.coeffs), self.denom)

    def _ord(self) -> Optional[int]:
        # order in 1/denom units used by precision rules; a zero series counts as O(t^prec)
        if self.coeffs:
            return min(self.coeffs)
        return self.prec

    def terms(self) -> list[tuple[Fraction, Fraction]]:
        return [(Fraction(e, self.denom), c) for e, c in sorted(self.coeffs.items())]

    def coefficient(self, e: Number) -> Fraction:
        e = Fraction(e) * self.denom
        if e.denominator != 1:
            return Fraction(0)
        if self.prec is not None and e >= self.prec:
            raise PrecisionExhausted(f"coefficient of t^{Fraction(e, self.denom)} is beyond truncation")
        return self.coeffs.get(int(e), Fraction(0))

    def leading(self) -> tuple[Fraction, Fraction]:
        if not self.coeffs:
            raise PrecisionExhausted("series vanishes up to its truncation order")
        e = min(self.coeffs)
        return Fraction(e, self.denom), self.coeffs[e]

    def constant_term(self) -> Fraction:
        return self.coefficient(0)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = TruncSeries({0: other})
        if not isinstance(other, TruncSeries):
            return NotImplemented
        return (self.denom, self.prec, self.coeffs) == (other.denom, other.prec, other.coeffs)

    def __hash__(self) -> int:
        return hash((self.denom, self.prec, tuple(sorted(self.coeffs.items()))))

    def agrees_with(self, other: "TruncSeries") -> bool:
        """Equality of all coefficients both series know."""
        a, b, d = _align(self, other)
        p = _min_prec(a.prec, b.prec)
        keys = set(a.coeffs) | set(b.coeffs)
        return all(a.coeffs.get(e, 0) == b.coeffs.get(e, 0) for e in keys if p is None or e < p)

    def __repr__(self) -> str:
        parts = []
        for e, c in self.terms():
            parts.append(f"{c}*t^{e}" if e else f"{c}")
        body = " + ".join(parts) or "0"
        if self.prec is not None:
            body += f" + O(t^{self.trunc})"
        return f"TruncSeries({body})"

    # -- rescaling ------------------------------------------------------

    def with_denom(self, d: int) -> "TruncSeries":
        if d % self.denom:
            raise IncompatibleDenominators(f"cannot express denominator {self.denom} in units of 1/{d}")
        f = d // self.denom
        out = TruncSeries.__new__(TruncSeries)
        out.coeffs = {e * f: c for e, c in self.coeffs.items()}
        out.prec = None if self.prec is None else self.prec * f
        out.denom = d
        return out

    def truncate(self, trunc: Number) -> "TruncSeries":
        """Forget all terms of exponent >= trunc (never raises precision)."""
        t = Fraction(trunc)
        d = _lcm(self.denom, t.denominator)
        s = self.with_denom(d)
        td = t * d
        p = _min_prec(s.prec, -(-td.numerator // td.denominator))
        return TruncSeries(s.coeffs, p, d)

    def scale_exponents(self, q: Number) -> "TruncSeries":
        """Substitute t -> t**q for a positive rational q."""
        q = Fraction(q)
        if q <= 0:
            raise ValueError("exponent scale must be positive")
        d = self.denom * q.denominator
        cs = {e * q.numerator: c for e, c in self.coeffs.items()}
        p = None if self.prec is None else self.prec * q.numerator
        return TruncSeries(cs, p, d)

    def shift(self, e: Number) -> "TruncSeries":
        """Multiply by t**e (e may be negative)."""
        e = Fraction(e)
        d = _lcm(self.denom, e.denominator)
        s = self.with_denom(d)
        k = int(e * d)
        return TruncSeries({x + k: c for x, c in s.coeffs.items()}, None if s.prec is None else s.prec + k, d)

    # -- ring operations ------------------------------------------------

    def __neg__(self) -> "TruncSeries":
        return TruncSeries({e: -c for e, c in self.coeffs.items()}, self.prec, self.denom)

    def __add__(self, other: Union["TruncSeries", Number]) -> "TruncSeries":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b, d = _align(self, other)
        p = _min_prec(a.prec, b.prec)
        cs = dict(a.coeffs)
        for e, c in b.coeffs.items():
            cs[e] = cs.get(e, 0) + c
        return TruncSeries(cs, p, d)

    __radd__ = __add__

    def __sub__(self, other: Union["TruncSeries", Number]) -> "TruncSeries":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: Number) -> "TruncSeries":
        return _coerce(other) - self

    def __mul__(self, other: Union["TruncSeries", Number]) -> "TruncSeries":
        if isinstance(other, (int, Fraction)):
            if not other:
                return TruncSeries({})
            return TruncSeries({e: c * other for e, c in self.coeffs.items()}, self.prec, self.denom)
        if not isinstance(other, TruncSeries):
            return NotImplemented
        a, b, d = _align(self, other)
        oa, ob = a._ord(), b._ord()
        p = _min_prec(_add_prec(a.prec, ob), _add_prec(b.prec, oa))
        if oa is None or ob is None:  # an exact zero factor
            return TruncSeries({}, None, d)
        cs: dict[int, Fraction] = {}
        bi = sorted(b.coeffs.items())
        for ea, ca in a.coeffs.items():
            for eb, cb in bi:
                e = ea + eb
                if p is not None and e >= p:
                    break
                cs[e] = cs.get(e, 0) + ca * cb
        return TruncSeries(cs, p, d)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "TruncSeries":
        if n < 0:
            return TruncSeries({0: 1}).divide(self ** (-n))
        result = TruncSeries({0: 1})
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def unit_inverse(self, cap: Optional[Number] = None) -> "TruncSeries":
        """Inverse of a series with nonzero constant term."""
        if not self.coeffs or 0 not in self.coeffs or min(self.coeffs) < 0:
            raise DivisorNotUnit("divisor must have order 0")
        p = self.prec
        if cap is not None:
            cf = Fraction(cap)
            d = _lcm(self.denom, cf.denominator)
            s = self.with_denom(d)
            p = _min_prec(s.prec, int(cf * d))
        else:
            s = self
            d = self.denom
        if p is None:
            if len(s.coeffs) == 1:
                return TruncSeries({0: 1 / s.coeffs[0]}, None, d)
            raise PrecisionExhausted("inverse of an exact non-monomial series needs a truncation cap")
        u0 = s.coeffs[0]
        inv0 = 1 / u0
        rest = sorted((e, c) for e, c in s.coeffs.items() if 0 < e < p)
        w = [Fraction(0)] * p
        w[0] = inv0
        for n in range(1, p):
            acc = Fraction(0)
            for e, c in rest:
                if e > n:
                    break
                wn = w[n - e]
                if wn:
                    acc += c * wn
            w[n] = -inv0 * acc
        return TruncSeries({i: c for i, c in enumerate(w) if c}, p, d)

    def divide(self, other: "TruncSeries", cap: Optional[Number] = None) -> "TruncSeries":
        """Laurent division by a series with a known leading term.

        Dividing two exact series needs ``cap`` unless the divisor is a monomial.
        """
        other = _coerce(other)
        if not other.coeffs:
            raise PrecisionExhausted("division by a series that vanishes up to its truncation")
        a, b, d = _align(self, other)
        ob = min(b.coeffs)
        lead = b.coeffs[ob]
        num = TruncSeries({e - ob: c / lead for e, c in a.coeffs.items()}, None if a.prec is None else a.prec - ob, d)
        unit = TruncSeries({e - ob: c / lead for e, c in b.coeffs.items()}, None if b.prec is None else b.prec - ob, d)
        if len(unit.coeffs) == 1 and unit.prec is None:
            return num if cap is None else num.truncate(cap)
        on = num._ord()
        if on is None:
            return TruncSeries({}, None, d)
        target = _min_prec(num.prec, _add_prec(unit.prec, on))
        if cap is not None:
            cf = Fraction(cap) * d
            target = _min_prec(target, -(-cf.numerator // cf.denominator))
        if target is None:
            raise PrecisionExhausted("exact division by a non-monomial series needs a truncation cap")
        need = max(target - on, 1)
        out = num * unit.unit_inverse(cap=Fraction(need, d))
        return out if cap is None else out.truncate(cap)

    def __truediv__(self, other: Union["TruncSeries", Number]) -> "TruncSeries":
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        return self.divide(other)

    def compose(self, inner: "TruncSeries") -> "TruncSeries":
        """Substitute ``inner`` (positive order) for t in a series with integral exponents."""
        if self.denom != 1:
            raise IncompatibleDenominators("outer series of a composition needs integral exponents")
        if any(e < 0 for e in self.coeffs):
            raise ValueError("outer series of a composition must be a power series")
        oi = inner._ord()
        if oi is None or oi <= 0:
            raise ValueError("inner series of a composition must have positive order")
        cap = None if self.prec is None else Fraction(self.prec * oi, inner.denom)
        if not self.coeffs:
            return TruncSeries.zero(cap)
        top = max(self.coeffs)
        src = inner if cap is None else inner.truncate(cap)
        acc = TruncSeries({0: self.coeffs.get(top, 0)})
        for e in range(top - 1, -1, -1):
            acc = acc * src
            if cap is not None:
                acc = acc.truncate(cap)
            c = self.coeffs.get(e)
            if c:
                acc = acc + c
        if cap is not None:
            acc = acc.truncate(cap)
        return acc

    def reversion(self) -> "TruncSeries":
        """Compositional inverse of a series of order exactly one (Lagrange inversion)."""
        if self.denom != 1 or not self.coeffs or min(self.coeffs) != 1:
            raise OrderNotOne(f"reversion needs integral exponents and order 1, got order {self.order}")
        if self.prec is None:
            raise PrecisionExhausted("reversion of an exact series needs a truncation; call truncate first")
        p = self.prec
        # h = t / s(t); [u^n] s^{-1} = [t^{n-1}] h^n / n
        h = TruncSeries({0: 1}).divide(self.shift(-1))
        h = h.truncate(p - 1)
        cs = {}
        hn = TruncSeries({0: 1})
        for n in range(1, p):
            hn = (hn * h).truncate(p - 1)
            c = hn.coeffs.get(n - 1)
            if c:
                cs[n] = c / n
        return TruncSeries(cs, p)


def _coerce(x: Union[TruncSeries, Number]) -> TruncSeries:
    if isinstance(x, TruncSeries):
        return x
    if isinstance(x, (int, Fraction)):
        return TruncSeries({0: x})
    return NotImplemented  # type: ignore[return-value]


def _align(a: TruncSeries, b: TruncSeries) -> tuple[TruncSeries, TruncSeries, int]:
    if a.denom == b.denom:
        return a, b, a.denom
    d = _lcm(a.denom, b.denom)
    if d > MAX_DENOM:
        raise IncompatibleDenominators(f"common denominator {d} exceeds {MAX_DENOM}")
    return a.with_denom(d), b.with_denom(d), d


def unit_divide(a: TruncSeries, b: TruncSeries) -> TruncSeries:
    """a / b for a divisor of order zero."""
    if not b.coeffs or min(b.coeffs) != 0:
        raise DivisorNotUnit("divisor must have order 0")
    return a.divide(b)


def series_arith(op: str, *operands) -> TruncSeries:
    """Dispatch one of the basic series operations by name."""
    if op == "add":
        return operands[0] + operands[1]
    if op == "mul":
        return operands[0] * operands[1]
    if op == "unit_divide":
        return unit_divide(operands[0], operands[1])
    if op == "int_power":
        return operands[0] ** int(operands[1])
    if op == "scale_exponents":
        return operands[0].scale_exponents(operands[1])
    raise ValueError(f"unknown series operation {op!r}")


def series_reversion(s: TruncSeries) -> TruncSeries:
    return s.reversion()


def polynomial(coeffs: Iterable[Number], trunc: Optional[Number] = None) -> TruncSeries:
    """Dense coefficient list c_0, c_1, ... as a series in t."""
    return TruncSeries.from_terms({i: c for i, c in enumerate(coeffs)}, trunc)
