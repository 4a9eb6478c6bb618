"""Exact arithmetic in finite fields F_{p^k} with a deterministic presentation.

The modulus polynomial for F_{p^k} is the least monic irreducible of degree
k over F_p, where "least" means smallest integer encoding sum(c_i * p^i) of
the non-leading coefficients.  Elements are coordinate vectors over that
modulus; the integer encoding sum(coords[i] * p^i) orders the elements, and
the "least generator" of F_{p^k}^x is the generator with smallest encoding.
Everything downstream (characters, twists, enumeration order) is pinned to
this presentation, so results are reproducible across runs.
"""

import numpy as np
from sympy import factorint, isprime

from .errors import BudgetExceeded, DomainError

# Largest field order for which dense log/exp tables are built.
TABLE_LIMIT = 1 << 21


# ---------------------------------------------------------------------------
# Dense polynomial helpers over F_p (used only for modulus search)
# ---------------------------------------------------------------------------

def _poly_mulmod(a, b, modulus, p):
    res = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                res[i + j] = (res[i + j] + ai * bj) % p
    k = len(modulus) - 1
    for i in range(len(res) - 1, k - 1, -1):
        c = res[i]
        if c:
            res[i] = 0
            for j in range(k):
                res[i - k + j] = (res[i - k + j] - c * modulus[j]) % p
    while len(res) > k:
        res.pop()
    while len(res) < k:
        res.append(0)
    return res


def _poly_powmod(base, e, modulus, p):
    k = len(modulus) - 1
    result = [1] + [0] * (k - 1)
    acc = list(base)
    while e:
        if e & 1:
            result = _poly_mulmod(result, acc, modulus, p)
        acc = _poly_mulmod(acc, acc, modulus, p)
        e >>= 1
    return result


def _poly_gcd(a, b, p):
    a, b = list(a), list(b)
    while any(b):
        while b and b[-1] == 0:
            b.pop()
        if not b:
            break
        inv = pow(b[-1], p - 2, p)
        while len(a) >= len(b) and any(a):
            while a and a[-1] == 0:
                a.pop()
            if len(a) < len(b):
                break
            c = a[-1] * inv % p
            shift = len(a) - len(b)
            for j in range(len(b)):
                a[shift + j] = (a[shift + j] - c * b[j]) % p
        a, b = b, a
    while a and a[-1] == 0:
        a.pop()
    return a


def _is_irreducible(coeffs, p):
    """coeffs: non-leading coefficients c_0..c_{k-1} of a monic degree-k poly."""
    k = len(coeffs)
    modulus = list(coeffs) + [1]
    if k == 1:
        return True
    x = [0, 1] + [0] * (k - 2)
    # x^(p^k) == x mod M
    xq = x
    for _ in range(k):
        xq = _poly_powmod(xq, p, modulus, p)
    diff = [(xq[i] - x[i]) % p for i in range(k)]
    if any(diff):
        return False
    # no factor of degree k/r for prime r | k
    for r in factorint(k):
        xe = x
        for _ in range(k // r):
            xe = _poly_powmod(xe, p, modulus, p)
        diff = [(xe[i] - x[i]) % p for i in range(k)]
        g = _poly_gcd(diff, modulus, p)
        if len(g) - 1 != 0:
            return False
    return True


def least_modulus(p, k):
    """Non-leading coefficients of the least monic irreducible of degree k."""
    if k == 1:
        return (0,)
    for enc in range(p ** k):
        coeffs = tuple((enc // p ** i) % p for i in range(k))
        if _is_irreducible(coeffs, p):
            return coeffs
    raise RuntimeError("no irreducible polynomial found")  # unreachable


# ---------------------------------------------------------------------------
# Field and element classes
# ---------------------------------------------------------------------------

class Fq:
    """The field F_{p^k} in its deterministic presentation.  Use Fq.get()."""

    _cache = {}

    def __init__(self, p, k):
        if not isprime(p):
            raise DomainError(f"{p} is not prime")
        if k < 1:
            raise DomainError("extension degree must be >= 1")
        self.p = p
        self.k = k
        self.q = p ** k
        self.modulus = least_modulus(p, k)
        self._gen = None
        self._log = None
        self._exp = None

    @classmethod
    def get(cls, p, k=1):
        key = (p, k)
        fld = cls._cache.get(key)
        if fld is None:
            fld = cls(p, k)
            cls._cache[key] = fld
        return fld

    def __repr__(self):
        return f"Fq({self.p}, {self.k})"

    # -- element construction ------------------------------------------------

    def elem(self, value):
        if isinstance(value, FqElem):
            if value.field is self:
                return value
            if value.field.p == self.p and value.field.k == 1:
                return self.from_int(value.coords[0])
            raise DomainError("element of a different field")
        if isinstance(value, (int, np.integer)):
            return self.from_int(int(value))
        return FqElem(self, tuple(int(c) % self.p for c in value))

    def from_int(self, n):
        coords = [0] * self.k
        coords[0] = n % self.p
        return FqElem(self, tuple(coords))

    def from_encoding(self, enc):
        enc = int(enc)
        return FqElem(self, tuple((enc // self.p ** i) % self.p for i in range(self.k)))

    @property
    def zero(self):
        return self.from_int(0)

    @property
    def one(self):
        return self.from_int(1)

    def elements(self):
        for enc in range(self.q):
            yield self.from_encoding(enc)

    # -- multiplicative structure ---------------------------------------------

    def generator(self):
        """Least generator of F_q^x (by integer encoding)."""
        if self._gen is not None:
            return self._gen
        order_factors = list(factorint(self.q - 1))
        for enc in range(2, self.q):
            g = self.from_encoding(enc)
            if all(g ** ((self.q - 1) // r) != self.one for r in order_factors):
                self._gen = g
                return g
        if self.q == 2:
            self._gen = self.one
            return self._gen
        raise RuntimeError("no generator found")  # unreachable

    def _build_tables(self):
        if self._log is not None:
            return
        if self.q > TABLE_LIMIT:
            raise BudgetExceeded(f"field order {self.q} exceeds table limit {TABLE_LIMIT}")
        g = self.generator()
        exp = np.zeros(self.q - 1, dtype=np.int64)
        log = np.full(self.q, -1, dtype=np.int64)
        acc = self.one
        for i in range(self.q - 1):
            e = acc.encoding
            exp[i] = e
            log[e] = i
            acc = acc * g
        self._exp = exp
        self._log = log

    def dlog(self, x):
        """Discrete log base the least generator; x must be nonzero."""
        self._build_tables()
        if x.is_zero():
            raise DomainError("dlog of zero")
        return int(self._log[x.encoding])

    @property
    def log_table(self):
        self._build_tables()
        return self._log

    @property
    def exp_table(self):
        self._build_tables()
        return self._exp


class FqElem:
    """Element of F_{p^k}: k coordinates over the deterministic modulus."""

    __slots__ = ("field", "coords")

    def __init__(self, field, coords):
        self.field = field
        self.coords = coords

    @property
    def p(self):
        return self.field.p

    @property
    def k(self):
        return self.field.k

    @property
    def encoding(self):
        e = 0
        for c in reversed(self.coords):
            e = e * self.field.p + c
        return e

    def is_zero(self):
        return all(c == 0 for c in self.coords)

    def _coerce(self, other):
        if isinstance(other, FqElem):
            if other.field is self.field:
                return other
            if other.field.p == self.p and other.field.k == 1:
                return self.field.from_int(other.coords[0])
            raise DomainError("mixed fields")
        if isinstance(other, (int, np.integer)):
            return self.field.from_int(int(other))
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        p = self.p
        return FqElem(self.field, tuple((a + b) % p for a, b in zip(self.coords, o.coords)))

    __radd__ = __add__

    def __neg__(self):
        p = self.p
        return FqElem(self.field, tuple((-a) % p for a in self.coords))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        p, k = self.p, self.k
        if k == 1:
            return FqElem(self.field, ((self.coords[0] * o.coords[0]) % p,))
        modulus = self.field.modulus
        res = _poly_mulmod(list(self.coords), list(o.coords), list(modulus) + [1], p)
        return FqElem(self.field, tuple(res))

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        return self ** (self.field.q - 2)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, e):
        if e < 0:
            return self.inverse() ** (-e)
        result = self.field.one
        acc = self
        while e:
            if e & 1:
                result = result * acc
            acc = acc * acc
            e >>= 1
        return result

    def frobenius(self, times=1):
        return self ** (self.p ** times)

    def __eq__(self, other):
        if isinstance(other, (int, np.integer)):
            other = self.field.from_int(int(other))
        if not isinstance(other, FqElem):
            return NotImplemented
        return (self.field.p == other.field.p and self.field.k == other.field.k
                and self.coords == other.coords)

    def __hash__(self):
        return hash((self.field.p, self.field.k, self.coords))

    def __repr__(self):
        if self.k == 1:
            return f"F{self.p}({self.coords[0]})"
        return f"F{self.p}^{self.k}({self.encoding})"


# ---------------------------------------------------------------------------
# Vectorised arithmetic on integer encodings (numpy)
# ---------------------------------------------------------------------------

class VecField:
    """Vectorised F_q arithmetic on numpy arrays of element encodings.

    Addition works digit-wise in base p; multiplication and powers go
    through the log/exp tables of the least generator, with explicit zero
    masks.  Scalars (python ints) are accepted wherever arrays are.
    """

    def __init__(self, field):
        field._build_tables()
        self.field = field
        self.p = field.p
        self.k = field.k
        self.q = field.q
        self.log = field.log_table
        self.exp = field.exp_table

    def add(self, x, y):
        if self.k == 1:
            return (x + y) % self.p
        out = 0
        for i in range(self.k):
            pi = self.p ** i
            out = out + ((x // pi % self.p) + (y // pi % self.p)) % self.p * pi
        return out

    def neg(self, x):
        if self.k == 1:
            return (self.p - x) % self.p
        out = 0
        for i in range(self.k):
            pi = self.p ** i
            out = out + (self.p - (x // pi % self.p)) % self.p * pi
        return out

    def sub(self, x, y):
        return self.add(x, self.neg(y))

    def mul(self, x, y):
        if np.isscalar(x) and np.isscalar(y):
            if x == 0 or y == 0:
                return 0
            return int(self.exp[(int(self.log[x]) + int(self.log[y])) % (self.q - 1)])
        x, y = np.broadcast_arrays(np.asarray(x, dtype=np.int64),
                                   np.asarray(y, dtype=np.int64))
        mask = (x != 0) & (y != 0)
        out = np.zeros(x.shape, dtype=np.int64)
        if mask.any():
            out[mask] = self.exp[(self.log[x[mask]] + self.log[y[mask]]) % (self.q - 1)]
        return out

    def pow(self, x, e):
        """x**e for integer e >= 1 (elementwise), with 0**e = 0."""
        if e == 1:
            return x if not np.isscalar(x) else int(x)
        if np.isscalar(x):
            if x == 0:
                return 0
            return int(self.exp[(int(self.log[x]) * e) % (self.q - 1)])
        x = np.asarray(x)
        out = np.zeros_like(x)
        mask = x != 0
        out[mask] = self.exp[(self.log[x[mask]] * e) % (self.q - 1)]
        return out

    def mul_poly(self, x, y):
        """Product by digit-wise polynomial arithmetic, no log tables.

        Slower than mul(); used as an independent oracle for table-backed
        multiplication and characters.
        """
        p, k = self.p, self.k
        if k == 1:
            return (x * y) % p
        xd = [(x // p ** i) % p for i in range(k)]
        yd = [(y // p ** i) % p for i in range(k)]
        prod = [0] * (2 * k - 1)
        for i in range(k):
            for j in range(k):
                prod[i + j] = (prod[i + j] + xd[i] * yd[j]) % p
        for i in range(2 * k - 2, k - 1, -1):
            c = prod[i]
            prod[i] = 0
            for j in range(self.k):
                prod[i - k + j] = (prod[i - k + j] - c * self.field.modulus[j]) % p
        out = 0
        for i in range(k - 1, -1, -1):
            out = out * p + prod[i]
        return out

    def inv(self, x):
        if np.isscalar(x):
            if x == 0:
                raise ZeroDivisionError("inverse of zero")
            return int(self.exp[(-int(self.log[x])) % (self.q - 1)])
        x = np.asarray(x)
        if (x == 0).any():
            raise ZeroDivisionError("inverse of zero")
        return self.exp[(-self.log[x]) % (self.q - 1)]

    def char_code(self, x, n):
        """j in 0..n-1 with chi_n(x) = j/n, or -1 where x = 0.  Needs n | q-1."""
        if (self.q - 1) % n:
            raise DomainError(f"{n} does not divide q-1 = {self.q - 1}")
        if np.isscalar(x):
            return -1 if x == 0 else int(self.log[x]) % n
        x = np.asarray(x)
        out = np.full(x.shape, -1, dtype=np.int64)
        mask = x != 0
        out[mask] = self.log[x[mask]] % n
        return out

    def eval_terms(self, terms, coords):
        """Evaluate a sparse polynomial at encoded points.

        terms: iterable of (exponent tuple, integer coefficient);
        coords: per-variable encodings, ints or broadcastable arrays.
        """
        total = None
        for exps, coeff in terms:
            c = int(coeff) % self.p
            val = c
            for i, e in enumerate(exps):
                if e:
                    val = self.mul(val, self.pow(coords[i], e))
            total = val if total is None else self.add(total, val)
        if total is None:
            return 0
        return total
