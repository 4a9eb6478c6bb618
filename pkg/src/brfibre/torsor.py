"""Kummer torsors on the smooth locus of the special fibre.

A symbol class (a, f) of order n with n | p-1 has residue along the fibre
the class of the tame symbol

    (-1)^(v(a) v(f)) * a^(v(f)) / f^(v(a))   reduced mod p,

v the p-adic valuation (on f: the valuation of its content after making
numerator and denominator p-primitive).  The residue is stored as a cyclic
degree-n cover t^n = g, with g a ratio of equal-weighted-degree forms over
F_p, together with a constant twist class.  Several representatives of the
same class (differing by n-th powers) are carried so that evaluation can
dodge the indeterminacy locus of any single one; representatives obtained
by the weight-1 coordinate swaps g * (x_i/x_j)^n are registered
automatically, and callers may register further ones.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import numpy as np

from .arith import QZ_ZERO, QZClass, power_residue_character
from .errors import (DegenerateResidue, DomainError, IndeterminateAtPoint,
                     UnsupportedChart)
from .model import FibrePoint, fibre_solutions, point_is_smooth
from .poly import MultiPoly


@dataclass(frozen=True)
class SymbolAlgebra:
    """Cyclic symbol class (a, f_num/f_den) of order dividing n."""

    n: int
    a: Fraction
    f_num: MultiPoly
    f_den: MultiPoly

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        if self.n < 1:
            raise DomainError("symbol order must be >= 1")
        if self.a == 0:
            raise DomainError("symbol scalar must be nonzero")
        if self.f_num.is_zero() or self.f_den.is_zero():
            raise DomainError("symbol function must be nonzero")
        dn = self.f_num.weighted_degree()
        dd = self.f_den.weighted_degree()
        if dn is None or dd is None or dn != dd:
            raise DomainError("f must be a ratio of weighted-homogeneous forms "
                              "of equal weighted degree")

    def involved(self):
        return self.f_num.involved() | self.f_den.involved()


def _cancel(num, den):
    cn = num.monomial_content()
    cd = den.monomial_content()
    common = tuple(min(a, b) for a, b in zip(cn, cd))
    if not any(common):
        return num, den
    return num.divide_monomial(common), den.divide_monomial(common)


@dataclass(frozen=True)
class TorsorRep:
    """One representative of the residue class.

    (f_num, f_den) is the symbol function representative mod p; evaluation
    is licensed exactly where both are nonzero.  (num, den) is the residue
    function t^n = num/den there.  When the scalar's valuation is divisible
    by n the residue function is constant but the licensing gate still
    comes from f.
    """

    f_num: MultiPoly
    f_den: MultiPoly
    num: MultiPoly
    den: MultiPoly

    def key(self):
        return (tuple(sorted(self.f_num.terms.items())),
                tuple(sorted(self.f_den.terms.items())))


@dataclass(frozen=True)
class KummerTorsor:
    n: int
    base: object                  # ModelSpec
    reps: tuple                   # TorsorRep, primary first
    twist: QZClass = QZ_ZERO
    exponent: int = 1             # (-v_p(a)) mod n: how g is built from f
    const: int = 1                # unit factor of the tame symbol, mod p

    def __post_init__(self):
        p = self.base.prime
        if gcd(self.n, p) != 1:
            raise DomainError("torsor order must be coprime to p")
        if (p - 1) % self.n:
            raise DomainError(f"Kummer representation needs n | p-1; "
                              f"n={self.n}, p={p}")
        if self.n % self.twist.den:
            raise DomainError("twist class does not have order dividing n")

    def involved(self):
        out = set()
        for r in self.reps:
            out |= (r.f_num.involved() | r.f_den.involved()
                    | r.num.involved() | r.den.involved())
        return out

    def with_twist(self, cls):
        return KummerTorsor(self.n, self.base, self.reps, self.twist + cls,
                            self.exponent, self.const)

    def with_representative(self, h_num, h_den):
        """Register the representative obtained from f * (h_num/h_den)^n."""
        if h_num.is_zero() or h_den.is_zero():
            raise DomainError("representative multiplier must be nonzero")
        p = self.base.prime
        primary = self.reps[0]
        fn, fd = _cancel((primary.f_num * h_num ** self.n).reduce_mod(p),
                         (primary.f_den * h_den ** self.n).reduce_mod(p))
        rep = _make_rep(fn, fd, self.exponent, self.const, p,
                        self.base.ambient)
        _check_rep_alive(rep, self.base)
        if rep.key() in {r.key() for r in self.reps}:
            return self
        return KummerTorsor(self.n, self.base, self.reps + (rep,), self.twist,
                            self.exponent, self.const)


def twist(torsor, cls):
    """Shift the torsor class by a constant class with denominator dividing n."""
    if torsor.n % cls.den:
        raise DomainError(f"twist denominator {cls.den} does not divide n={torsor.n}")
    return torsor.with_twist(cls)


def _check_rep_alive(rep, model):
    pairs = ((rep.f_num, "symbol numerator"), (rep.f_den, "symbol denominator"),
             (rep.num, "residue numerator"), (rep.den, "residue denominator"))
    for poly, side in pairs:
        if poly.is_zero():
            raise DegenerateResidue(f"{side} is zero mod p")
        if model.is_hypersurface():
            if poly.reduce_by(model.reduced_equations()[0], model.prime).is_zero():
                raise DegenerateResidue(
                    f"{side} vanishes identically on the special fibre")


def _make_rep(f_num, f_den, e, const, p, ambient):
    names = ambient.var_names
    weights = ambient.weights
    if e == 0:
        g_num = MultiPoly.const(names, const, weights)
        g_den = MultiPoly.const(names, 1, weights)
    else:
        g_num, g_den = _cancel((f_num ** e * const).reduce_mod(p),
                               (f_den ** e).reduce_mod(p))
    return TorsorRep(f_num, f_den, g_num, g_den)


def _auto_representatives(primary, model, n, e, const):
    reps = [primary]
    keys = {primary.key()}
    names = model.ambient.var_names
    p = model.prime
    # swaps through variables the data never touches cannot help, and would
    # drag those variables into every later enumeration
    used = primary.f_num.involved() | primary.f_den.involved()
    for eq in model.reduced_equations():
        used |= eq.involved()
    w1 = [i for i in model.ambient.weight_one_positions() if i in used]
    for i in w1:
        for j in w1:
            if i == j:
                continue
            xi = MultiPoly.var(names, names[i], model.ambient.weights)
            xj = MultiPoly.var(names, names[j], model.ambient.weights)
            fn, fd = _cancel((primary.f_num * xi ** n).reduce_mod(p),
                             (primary.f_den * xj ** n).reduce_mod(p))
            cand = _make_rep(fn, fd, e, const, p, model.ambient)
            if cand.key() in keys:
                continue
            try:
                _check_rep_alive(cand, model)
            except DegenerateResidue:
                continue
            keys.add(cand.key())
            reps.append(cand)
    return tuple(reps)


def residue(algebra, model):
    """Residue of a symbol class along the special fibre, as a Kummer torsor.

    The representative list starts from the symbol's own function and its
    weight-1 coordinate swaps; each carries the licensing gate (f nonzero)
    together with the residue function.
    """
    p = model.prime
    n = algebra.n
    if algebra.f_num.vars != model.ambient.var_names:
        raise DomainError("symbol function variables do not match the model")

    va = 0
    num, den = algebra.a.numerator, algebra.a.denominator
    while num % p == 0:
        num //= p
        va += 1
    while den % p == 0:
        den //= p
        va -= 1
    u_mod_p = num % p * pow(den % p, p - 2, p) % p

    def primitive(poly):
        v = 0
        while all(c % p == 0 for c in poly.terms.values()):
            poly = poly.map_coefficients(lambda c: c // p)
            v += 1
        return poly, v

    f1, v1 = primitive(algebra.f_num)
    f2, v2 = primitive(algebra.f_den)
    vf = v1 - v2

    sign = p - 1 if (va * vf) % 2 else 1
    const = sign * pow(u_mod_p, vf % (p - 1), p) % p if u_mod_p else 0
    if const == 0:
        raise DegenerateResidue("unit part of the scalar vanishes mod p")

    e = (-va) % n
    fn, fd = _cancel(f1.reduce_mod(p), f2.reduce_mod(p))
    primary = _make_rep(fn, fd, e, const, p, model.ambient)
    _check_rep_alive(primary, model)
    reps = _auto_representatives(primary, model, n, e, const)
    return KummerTorsor(n, model, reps, QZ_ZERO, e, const)


# ---------------------------------------------------------------------------
# Fibre classes
# ---------------------------------------------------------------------------

def fibre_class(torsor, point):
    """Class of the torsor fibre above a smooth point, in (1/n)Z/Z.

    For a point over F_{p^k} the constant twist contributes k times (its
    restriction to the degree-k extension).
    """
    if not isinstance(point, FibrePoint):
        point = FibrePoint(tuple(point))
    smooth = point.smooth
    if smooth is None:
        if not point.chart_ok:
            raise UnsupportedChart("no weight-1 chart at this point")
        smooth = point_is_smooth(torsor.base, point.coords)
    if not smooth:
        raise DomainError("fibre classes are defined over smooth points only")
    k = point.field_degree
    for rep in torsor.reps:
        if rep.f_num.evaluate(point.coords).is_zero():
            continue
        if rep.f_den.evaluate(point.coords).is_zero():
            continue
        nv = rep.num.evaluate(point.coords)
        dv = rep.den.evaluate(point.coords)
        base = power_residue_character(nv / dv, torsor.n)
        return base + k * torsor.twist
    raise IndeterminateAtPoint(
        f"all {len(torsor.reps)} representatives are 0 or undefined at {point}")


def codes_on_solutions(torsor, sols):
    """Per-stratum twist-adjusted class codes; -1 marks indeterminate points.

    The strata must have been built with the torsor's variables declared
    (see solutions_for_torsors).
    """
    vec = sols.vec
    n = torsor.n
    k = sols.k
    shift = (k * torsor.twist.with_denominator(n)) % n
    out = []
    for s in sols.strata:
        m = s.sols.shape[0]
        template = s.coord_template(sols.model.ambient.nvars)
        codes = np.full(m, -1, dtype=np.int64)
        for rep in torsor.reps:
            unresolved = codes < 0
            if not unresolved.any():
                break
            gate_n = np.broadcast_to(np.asarray(
                vec.eval_terms(rep.f_num.terms.items(), template)), (m,))
            gate_d = np.broadcast_to(np.asarray(
                vec.eval_terms(rep.f_den.terms.items(), template)), (m,))
            ok = unresolved & (gate_n != 0) & (gate_d != 0)
            if ok.any():
                nv = np.broadcast_to(np.asarray(
                    vec.eval_terms(rep.num.terms.items(), template)), (m,))
                dv = np.broadcast_to(np.asarray(
                    vec.eval_terms(rep.den.terms.items(), template)), (m,))
                cn = vec.char_code(nv[ok], n)
                cd = vec.char_code(dv[ok], n)
                codes[ok] = (cn - cd + shift) % n
        out.append(codes)
    return out


def solutions_for_torsors(model, k, torsors, budget=None):
    involved = set()
    for t in torsors:
        involved |= t.involved()
    kwargs = {} if budget is None else {"budget": budget}
    return fibre_solutions(model, k, extra_involved=involved, **kwargs)


@dataclass
class TwistPointCount:
    count: int
    determinate: int
    indeterminate: int
    skipped: int


def count_twist_points(torsor, k, budget=None):
    """F_{p^k} points of the torsor over smooth determinate fibre points.

    A fibre with trivial class contributes n points, any other class none;
    indeterminate smooth points are tallied separately, as are
    chart-unsupported points of weighted ambients.
    """
    sols = solutions_for_torsors(torsor.base, k, [torsor], budget)
    codes = codes_on_solutions(torsor, sols)
    count = det = indet = 0
    for s, c in zip(sols.strata, codes):
        m = s.multiplicity
        smooth = s.smooth
        det += int((smooth & (c >= 0)).sum()) * m
        indet += int((smooth & (c < 0)).sum()) * m
        count += int((smooth & (c == 0)).sum()) * m * torsor.n
    return TwistPointCount(count, det, indet, len(sols.tail_points))


@dataclass
class NonconstancyWitness:
    result: str              # "Nonconstant" | "Inconclusive"
    degree: int = 0
    values: tuple = ()

    def __bool__(self):
        return self.result == "Nonconstant"


def nonconstancy_witness(torsor, max_degree, budget=None):
    """Search for varying fibre classes over F_{p^k}, k <= max_degree.

    Variation witnesses that the geometric class of the torsor is nonzero;
    absence of variation decides nothing, so the other outcome is
    Inconclusive, never "constant".
    """
    for k in range(1, max_degree + 1):
        sols = solutions_for_torsors(torsor.base, k, [torsor], budget)
        seen = set()
        for s, c in zip(sols.strata, codes_on_solutions(torsor, sols)):
            vals = c[s.smooth & (c >= 0)]
            seen.update(int(v) for v in np.unique(vals))
        if len(seen) > 1:
            values = tuple(QZClass.of(v, torsor.n) for v in sorted(seen))
            return NonconstancyWitness("Nonconstant", k, values)
    return NonconstancyWitness("Inconclusive")
