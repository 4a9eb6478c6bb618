"""The invariant group Q/Z, power-residue characters, and independence tests.

Characters are normalised through the least generator g of F_q^x: the
identification of the n-th roots of unity with Z/n sends g^((q-1)/n) to 1.
This choice may differ from the class-field-theory normalisation by an
automorphism of Z/n; all shipped tests assert only order, constancy,
surjectivity, or n = 2 values, which are invariant under that ambiguity,
and the n = 2 case is pinned against the Hilbert symbol.
"""

from dataclasses import dataclass
from math import gcd, lcm

from .errors import DomainError, UnsupportedCharacter
from .field import FqElem


@dataclass(frozen=True)
class QZClass:
    """Element a/n of Q/Z, stored in lowest terms with 0 <= a < n."""

    num: int
    den: int

    @staticmethod
    def of(num, den):
        if den <= 0:
            raise DomainError("denominator must be positive")
        num %= den
        g = gcd(num, den)
        return QZClass(num // g, den // g)

    @property
    def order(self):
        return self.den

    def is_zero(self):
        return self.num == 0

    def __add__(self, other):
        d = lcm(self.den, other.den)
        return QZClass.of(self.num * (d // self.den) + other.num * (d // other.den), d)

    def __neg__(self):
        return QZClass.of(-self.num, self.den)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, m):
        if not isinstance(m, int):
            return NotImplemented
        return QZClass.of(self.num * m, self.den)

    __rmul__ = __mul__

    def with_denominator(self, n):
        """Numerator of this class written over denominator n."""
        if n % self.den:
            raise DomainError(f"{self} has no representative with denominator {n}")
        return self.num * (n // self.den)

    def __str__(self):
        return "0" if self.num == 0 else f"{self.num}/{self.den}"


QZ_ZERO = QZClass(0, 1)


@dataclass(frozen=True)
class FinAbElement:
    """Element of a product of cyclic groups prod (1/m_i)Z/Z."""

    moduli: tuple
    values: tuple

    @staticmethod
    def of(moduli, values):
        moduli = tuple(int(m) for m in moduli)
        vals = []
        for m, v in zip(moduli, values):
            if not isinstance(v, QZClass):
                v = QZClass.of(int(v), m)
            if m % v.den:
                raise DomainError(f"component {v} does not lie in (1/{m})Z/Z")
            vals.append(v)
        if len(vals) != len(moduli):
            raise DomainError("component count mismatch")
        return FinAbElement(moduli, tuple(vals))

    @property
    def order(self):
        return lcm(*[v.order for v in self.values]) if self.values else 1

    def __add__(self, other):
        if self.moduli != other.moduli:
            raise DomainError("mismatched ambient groups")
        return FinAbElement(self.moduli, tuple(a + b for a, b in zip(self.values, other.values)))

    def __neg__(self):
        return FinAbElement(self.moduli, tuple(-v for v in self.values))


def power_residue_character(x, n):
    """The class j/n with x^((q-1)/n) = g^(j(q-1)/n), g the least generator.

    Zero iff x is an n-th power in F_q^x.
    """
    if not isinstance(x, FqElem):
        raise DomainError("character argument must be a field element")
    if x.is_zero():
        raise DomainError("character of zero")
    q = x.field.q
    if n < 1 or (q - 1) % n:
        raise UnsupportedCharacter(f"order {n} does not divide q-1 = {q - 1}")
    return QZClass.of(x.field.dlog(x) % n, n)


def _check_same_ambient(elements):
    if not elements:
        raise DomainError("empty generator list")
    moduli = elements[0].moduli
    for e in elements:
        if e.moduli != moduli:
            raise DomainError("mismatched ambient groups")
    return moduli


def subgroup_order(elements):
    """Order of the subgroup generated, by closure enumeration."""
    _check_same_ambient(elements)
    zero = FinAbElement(elements[0].moduli,
                        tuple(QZ_ZERO for _ in elements[0].moduli))
    seen = {zero.values}
    frontier = [zero]
    while frontier:
        nxt = []
        for el in frontier:
            for gen in elements:
                s = el + gen
                if s.values not in seen:
                    seen.add(s.values)
                    nxt.append(s)
        frontier = nxt
    return len(seen)


def is_linearly_independent(elements):
    """True iff the generated subgroup has order prod(order of element)."""
    _check_same_ambient(elements)
    prod = 1
    for e in elements:
        prod *= e.order
    return subgroup_order(elements) == prod


def character_orders(tables):
    return [lcm(*[v.order for v in t]) if t else 1 for t in tables]


def product_characters_surjective(tables):
    """Whether the joint character map hits all of prod (1/n_i)Z/Z.

    Each table lists the character's values on an enumerated finite group;
    n_i is the order of the i-th character.
    """
    if not tables or not tables[0]:
        raise DomainError("empty group")
    size = len(tables[0])
    if any(len(t) != size for t in tables):
        raise DomainError("value tables enumerate different groups")
    orders = character_orders(tables)
    target = 1
    for n in orders:
        target *= n
    image = {tuple(t[i] for t in tables) for i in range(size)}
    return len(image) == target
