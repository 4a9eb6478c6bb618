"""Sparse multivariate polynomials over Z or over F_q.

Exponent-map representation: terms is a dict from exponent tuples to
nonzero coefficients (arbitrary-precision ints, or FqElem all from one
field).  Variables carry positive integer weights; weighted homogeneity is
checked, not assumed.  Text form: terms `coef*x^e*y` joined by " + ",
exponent 1 implicit, constants bare, terms ordered by descending exponent
tuple.
"""

import re

from .errors import DomainError, UnsupportedChart
from .field import FqElem


def _is_zero_coeff(c):
    if isinstance(c, FqElem):
        return c.is_zero()
    return c == 0


class MultiPoly:
    __slots__ = ("vars", "weights", "terms")

    def __init__(self, vars, terms, weights=None):
        self.vars = tuple(vars)
        if weights is None:
            weights = (1,) * len(self.vars)
        self.weights = tuple(int(w) for w in weights)
        if len(self.weights) != len(self.vars) or any(w <= 0 for w in self.weights):
            raise DomainError("weights must be positive, one per variable")
        clean = {}
        for exps, c in terms.items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != len(self.vars) or any(e < 0 for e in exps):
                raise DomainError(f"bad exponent vector {exps}")
            if not _is_zero_coeff(c):
                clean[exps] = c
        self.terms = clean

    # -- constructors ---------------------------------------------------------

    @staticmethod
    def zero(vars, weights=None):
        return MultiPoly(vars, {}, weights)

    @staticmethod
    def const(vars, c, weights=None):
        return MultiPoly(vars, {(0,) * len(tuple(vars)): c}, weights)

    @staticmethod
    def var(vars, name, weights=None):
        vars = tuple(vars)
        exps = [0] * len(vars)
        exps[vars.index(name)] = 1
        return MultiPoly(vars, {tuple(exps): 1}, weights)

    @staticmethod
    def from_text(text, vars, weights=None):
        """Parse `coef*x^e*...` terms joined by + or -."""
        vars = tuple(vars)
        text = text.replace("**", "^").replace("-", "+-").replace(" ", "")
        terms = {}
        for chunk in text.split("+"):
            if not chunk:
                continue
            coeff = 1
            exps = [0] * len(vars)
            if chunk == "-":
                raise DomainError(f"dangling sign in {text!r}")
            for factor in chunk.split("*"):
                if not factor:
                    continue
                m = re.fullmatch(r"(-?\d+)", factor)
                if m:
                    coeff *= int(m.group(1))
                    continue
                m = re.fullmatch(r"(-?)([A-Za-z_][A-Za-z_0-9]*)(?:\^(\d+))?", factor)
                if not m:
                    raise DomainError(f"cannot parse term factor {factor!r}")
                if m.group(1):
                    coeff = -coeff
                name = m.group(2)
                if name not in vars:
                    raise DomainError(f"unknown variable {name!r}")
                exps[vars.index(name)] += int(m.group(3) or 1)
            key = tuple(exps)
            coeff = terms.get(key, 0) + coeff
            terms[key] = coeff
        return MultiPoly(vars, terms, weights)

    def to_text(self):
        if not self.terms:
            return "0"
        pieces = []
        for exps in sorted(self.terms, reverse=True):
            c = self.terms[exps]
            c_str = str(c.encoding if isinstance(c, FqElem) else c)
            factors = [c_str]
            for name, e in zip(self.vars, exps):
                if e == 1:
                    factors.append(name)
                elif e > 1:
                    factors.append(f"{name}^{e}")
            if len(factors) > 1 and c_str == "1":
                factors = factors[1:]
            pieces.append("*".join(factors))
        return " + ".join(pieces)

    # -- ring operations -------------------------------------------------------

    def _check_compatible(self, other):
        if self.vars != other.vars or self.weights != other.weights:
            raise DomainError("polynomials live over different variable lists")

    def __add__(self, other):
        if isinstance(other, (int, FqElem)):
            other = MultiPoly.const(self.vars, other, self.weights)
        self._check_compatible(other)
        terms = dict(self.terms)
        for exps, c in other.terms.items():
            terms[exps] = terms.get(exps, 0) + c
        return MultiPoly(self.vars, terms, self.weights)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.vars, {e: -c for e, c in self.terms.items()}, self.weights)

    def __sub__(self, other):
        if isinstance(other, (int, FqElem)):
            other = MultiPoly.const(self.vars, other, self.weights)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, FqElem)):
            return MultiPoly(self.vars,
                             {e: c * other for e, c in self.terms.items()},
                             self.weights)
        self._check_compatible(other)
        terms = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                key = tuple(a + b for a, b in zip(e1, e2))
                terms[key] = terms.get(key, 0) + c1 * c2
        return MultiPoly(self.vars, terms, self.weights)

    __rmul__ = __mul__

    def __pow__(self, e):
        if e < 0:
            raise DomainError("negative power of a polynomial")
        result = MultiPoly.const(self.vars, 1, self.weights)
        acc = self
        while e:
            if e & 1:
                result = result * acc
            acc = acc * acc
            e >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return (self.vars == other.vars and self.weights == other.weights
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.vars, self.weights, tuple(sorted(
            (e, c.encoding if isinstance(c, FqElem) else c)
            for e, c in self.terms.items()))))

    def __repr__(self):
        return f"MultiPoly({self.to_text()!r})"

    # -- structure -------------------------------------------------------------

    def is_zero(self):
        return not self.terms

    def is_constant(self):
        return all(all(e == 0 for e in exps) for exps in self.terms)

    def constant_value(self):
        return self.terms.get((0,) * len(self.vars), 0)

    def involved(self):
        """Indices of variables appearing with positive exponent."""
        out = set()
        for exps in self.terms:
            for i, e in enumerate(exps):
                if e:
                    out.add(i)
        return out

    def weighted_degree(self):
        """Common weighted degree, or None if not weighted-homogeneous."""
        degs = {sum(w * e for w, e in zip(self.weights, exps)) for exps in self.terms}
        if not degs:
            return 0
        if len(degs) > 1:
            return None
        return degs.pop()

    def total_degree(self):
        return max((sum(exps) for exps in self.terms), default=0)

    def homogeneous_part(self, d):
        """Terms of plain total degree d."""
        return MultiPoly(self.vars,
                         {e: c for e, c in self.terms.items() if sum(e) == d},
                         self.weights)

    def content(self):
        """gcd of integer coefficients (0 for the zero polynomial)."""
        from math import gcd
        g = 0
        for c in self.terms.values():
            if isinstance(c, FqElem):
                raise DomainError("content is for integer coefficients")
            g = gcd(g, c)
        return g

    def monomial_content(self):
        """Componentwise min of exponent vectors (the largest common monomial)."""
        if not self.terms:
            return (0,) * len(self.vars)
        mins = None
        for exps in self.terms:
            mins = exps if mins is None else tuple(min(a, b) for a, b in zip(mins, exps))
        return mins

    def divide_monomial(self, mono):
        terms = {}
        for exps, c in self.terms.items():
            key = tuple(a - b for a, b in zip(exps, mono))
            if any(e < 0 for e in key):
                raise DomainError("monomial does not divide every term")
            terms[key] = c
        return MultiPoly(self.vars, terms, self.weights)

    # -- maps ------------------------------------------------------------------

    def map_coefficients(self, fn):
        return MultiPoly(self.vars, {e: fn(c) for e, c in self.terms.items()}, self.weights)

    def reduce_mod(self, p):
        """Integer coefficients reduced into [0, p)."""
        return self.map_coefficients(lambda c: c % p)

    def evaluate(self, point):
        """Exact value at a coordinate vector of ints or FqElems."""
        point = tuple(point)
        if len(point) != len(self.vars):
            raise DomainError(f"expected {len(self.vars)} coordinates, got {len(point)}")
        field = None
        for x in point:
            if isinstance(x, FqElem):
                field = x.field
                break
        total = None
        for exps, c in self.terms.items():
            if field is not None and isinstance(c, int):
                c = field.from_int(c)
            val = c
            for x, e in zip(point, exps):
                if e:
                    if field is not None and isinstance(x, int):
                        x = field.from_int(x)
                    val = val * x ** e
            total = val if total is None else total + val
        if total is None:
            return field.zero if field is not None else 0
        return total

    def dehomogenize(self, name):
        """Substitute 1 for a weight-1 chart variable."""
        idx = self.vars.index(name)
        if self.weights[idx] != 1:
            raise UnsupportedChart(f"chart variable {name} has weight {self.weights[idx]}")
        new_vars = self.vars[:idx] + self.vars[idx + 1:]
        new_weights = self.weights[:idx] + self.weights[idx + 1:]
        terms = {}
        for exps, c in self.terms.items():
            key = exps[:idx] + exps[idx + 1:]
            terms[key] = terms.get(key, 0) + c
        return MultiPoly(new_vars, terms, new_weights)

    def shift(self, point):
        """g with g(t) = f(point + t); exact Taylor shift, one variable at a time."""
        point = tuple(point)
        if len(point) != len(self.vars):
            raise DomainError("shift point has wrong arity")
        result = self
        for i, a in enumerate(point):
            if isinstance(a, int) and a == 0:
                continue
            if isinstance(a, FqElem) and a.is_zero():
                continue
            xi_plus_a = MultiPoly(self.vars, {
                tuple(1 if j == i else 0 for j in range(len(self.vars))): 1,
                (0,) * len(self.vars): a,
            }, self.weights)
            terms = {}
            powers = {0: MultiPoly.const(self.vars, 1, self.weights)}
            maxdeg = max((e[i] for e in result.terms), default=0)
            for d in range(1, maxdeg + 1):
                powers[d] = powers[d - 1] * xi_plus_a
            acc = MultiPoly.zero(self.vars, self.weights)
            for exps, c in result.terms.items():
                rest = MultiPoly(self.vars,
                                 {exps[:i] + (0,) + exps[i + 1:]: c}, self.weights)
                acc = acc + rest * powers[exps[i]]
            result = acc
        return result

    def partial(self, name):
        idx = self.vars.index(name)
        terms = {}
        for exps, c in self.terms.items():
            e = exps[idx]
            if e:
                key = exps[:idx] + (e - 1,) + exps[idx + 1:]
                terms[key] = terms.get(key, 0) + c * e
        return MultiPoly(self.vars, terms, self.weights)

    # -- division by a single polynomial ----------------------------------------

    def _lead(self):
        """Leading (exponent, coeff) under lex order on exponent tuples."""
        exps = max(self.terms)
        return exps, self.terms[exps]

    def reduce_by(self, divisor, p=None):
        """Remainder of division by a single polynomial.

        Over F_p pass the prime p (coefficients must be ints, reduced mod p).
        A single divisor generates its ideal as a Groebner basis, so the
        remainder is zero exactly when the divisor divides self.
        """
        if divisor.is_zero():
            raise DomainError("division by zero polynomial")
        self._check_compatible(divisor)
        lead_exps, lead_c = divisor._lead()
        if p is not None:
            inv = pow(lead_c % p, p - 2, p)
        rem = self if p is None else self.reduce_mod(p)
        while True:
            cand = None
            for exps in rem.terms:
                if all(a >= b for a, b in zip(exps, lead_exps)):
                    if cand is None or exps > cand:
                        cand = exps
            if cand is None:
                return rem
            c = rem.terms[cand]
            if p is not None:
                factor = c * inv % p
            else:
                if c % lead_c:
                    return rem  # not divisible over Z at this term
                factor = c // lead_c
            mono = tuple(a - b for a, b in zip(cand, lead_exps))
            sub = MultiPoly(self.vars, {mono: factor}, self.weights) * divisor
            rem = rem - sub
            if p is not None:
                rem = rem.reduce_mod(p)


def jacobian(polys):
    """Matrix of formal partials, one row per polynomial."""
    return [[f.partial(v) for v in f.vars] for f in polys]


def hessian(f):
    return [[f.partial(v).partial(w) for w in f.vars] for v in f.vars]
