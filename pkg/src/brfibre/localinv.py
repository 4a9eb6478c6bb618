"""Local invariants: Hilbert symbols and evaluation of symbol classes.

Evaluation at a p-adic point goes through reduction: the invariant of
(a, f) at P equals the class of the residue torsor's fibre above the
reduction of P.  That converts image/constancy/surjectivity questions
about the infinite set of p-adic points into finite enumeration over the
special fibre, which is how every report here is computed.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import numpy as np

from .arith import QZ_ZERO, QZClass
from .errors import (DomainError, NoDeterminatePoints, SingularReduction,
                     Unsupported, UnsupportedChart)
from .field import Fq
from .model import FibrePoint, point_is_smooth
from .torsor import (codes_on_solutions, fibre_class, residue,
                     solutions_for_torsors)

_VALUE_MAP_LIMIT = 20_000


# ---------------------------------------------------------------------------
# Hilbert symbol (the n = 2 ground truth)
# ---------------------------------------------------------------------------

def _split_unit(x, p):
    x = Fraction(x)
    v = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v, num * pow(den % p, p - 2, p) % p


def _legendre(u, p):
    s = pow(u % p, (p - 1) // 2, p)
    return 1 if s == 1 else -1


def hilbert_symbol(a, b, p):
    """(a, b)_p for an odd prime p, by the tame formula."""
    if p == 2:
        raise Unsupported("p = 2 is out of scope")
    if a == 0 or b == 0:
        raise DomainError("Hilbert symbol arguments must be nonzero")
    va, u = _split_unit(a, p)
    vb, v = _split_unit(b, p)
    res = _legendre(u, p) ** (vb % 2) * _legendre(v, p) ** (va % 2)
    if va % 2 and vb % 2 and (p - 1) // 2 % 2:
        res = -res
    return res


# ---------------------------------------------------------------------------
# p-adic points
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PadicPoint:
    """Primitive integer homogeneous coordinates of a point of X(Q_p).

    precision None means the coordinates satisfy the equations exactly
    over the integers; otherwise they satisfy them mod p^precision
    (precision >= 2) and the reduction must be a smooth fibre point, which
    is the Hensel certificate that a genuine point lies above.
    """

    coords: tuple
    precision: object = None

    def __post_init__(self):
        coords = tuple(int(c) for c in self.coords)
        g = 0
        for c in coords:
            g = gcd(g, c)
        if g == 0:
            raise DomainError("zero coordinate vector")
        if g > 1:
            coords = tuple(c // g for c in coords)
        object.__setattr__(self, "coords", coords)
        if self.precision is not None and self.precision < 2:
            raise DomainError("certified precision must be >= 2")


def reduce_point(point, model):
    """Validate a PadicPoint against the model and reduce it mod p."""
    p = model.prime
    coords = point.coords
    if all(c % p == 0 for c in coords):
        raise DomainError("coordinates all divisible by p (not primitive)")
    for eq in model.equations:
        val = eq.evaluate(coords)
        if point.precision is None:
            if val != 0:
                raise DomainError(f"point does not satisfy {eq.to_text()} exactly")
        elif val % p ** point.precision:
            raise DomainError(
                f"point fails {eq.to_text()} mod p^{point.precision}")
    fld = Fq.get(p, 1)
    red = [fld.from_int(c) for c in coords]
    w1 = model.ambient.weight_one_positions()
    lead = next((i for i in w1 if not red[i].is_zero()), None)
    if lead is None:
        raise UnsupportedChart("reduction has no nonzero weight-1 coordinate")
    lam = red[lead].inverse()
    norm = tuple(red[i] * lam ** model.ambient.weights[i] for i in range(len(red)))
    smooth = point_is_smooth(model, norm)
    if point.precision is not None and not smooth:
        raise SingularReduction(
            "certified-precision points must reduce to the smooth locus")
    return FibrePoint(norm, smooth)


def hensel_adjust(model, coords, precision=2):
    """One Newton step: integer coordinates moved to satisfy F mod p^precision.

    Hypersurface only; the reduction must be smooth with a unit partial.
    """
    if not model.is_hypersurface():
        raise Unsupported("Hensel adjustment implemented for hypersurfaces only")
    F = model.equations[0]
    p = model.prime
    m = p ** precision
    coords = [int(c) for c in coords]
    if F.evaluate(coords) % p:
        raise DomainError("coordinates do not satisfy the equation mod p")
    for _ in range(precision):
        val = F.evaluate(coords) % m
        if val == 0:
            break
        for i, name in enumerate(F.vars):
            d = F.partial(name).evaluate(coords)
            if d % p:
                coords[i] = (coords[i] - val * pow(d % m, -1, m)) % m
                break
        else:
            raise SingularReduction("no unit partial at the reduction")
    if F.evaluate(coords) % m:
        raise DomainError("Newton step failed to reach the requested precision")
    return PadicPoint(tuple(coords), precision)


# ---------------------------------------------------------------------------
# Evaluation of a single algebra
# ---------------------------------------------------------------------------

def evaluate_algebra(algebra, point, model, torsor=None):
    """Local invariant of the symbol class at a p-adic point, in (1/n)Z/Z."""
    if torsor is None:
        torsor = residue(algebra, model)
    fp = reduce_point(point, model) if isinstance(point, PadicPoint) else point
    if fp.smooth is False:
        raise SingularReduction(f"reduction {fp} is a singular fibre point")
    return fibre_class(torsor, fp)


@dataclass
class EvalReport:
    image: frozenset
    constant: bool
    normalization_point: object
    normalization_value: object
    class_counts: dict
    determinate: int
    indeterminate: int
    skipped: int
    values: object           # {FibrePoint: QZClass} when small, else None

    def describe_counts(self):
        return {str(c): n for c, n in sorted(self.class_counts.items(),
                                             key=lambda t: (t[0].den, t[0].num))}


def _first_determinate(sols, codes_list):
    for s, codes in zip(sols.strata, codes_list):
        rows = np.nonzero(s.smooth & (codes >= 0))[0]
        if rows.size:
            r = int(rows[0])
            pt = next(s.points_for_rows([r]))
            return pt, int(codes[r])
    return None, None


def evaluation_image(algebra, model, k, torsor=None, budget=None):
    """Image of the evaluation map on points with smooth F_{p^k} reduction.

    Evaluation factors through reduction, so enumerating fibre classes over
    smooth determinate F_{p^k} points computes the image exactly.
    """
    model.check_fibre_components()
    if torsor is None:
        torsor = residue(algebra, model)
    n = torsor.n
    sols = solutions_for_torsors(model, k, [torsor], budget)
    codes_list = codes_on_solutions(torsor, sols)

    counts = {}
    det = indet = 0
    for s, codes in zip(sols.strata, codes_list):
        m = s.multiplicity
        good = s.smooth & (codes >= 0)
        det += int(good.sum()) * m
        indet += int((s.smooth & (codes < 0)).sum()) * m
        for v in np.unique(codes[good]):
            counts[QZClass.of(int(v), n)] = counts.get(QZClass.of(int(v), n), 0) \
                + int((codes[good] == v).sum()) * m

    norm_pt, norm_code = _first_determinate(sols, codes_list)
    values = None
    if det and det <= _VALUE_MAP_LIMIT:
        values = {}
        for s, codes in zip(sols.strata, codes_list):
            rows = np.nonzero(s.smooth & (codes >= 0))[0]
            for r in rows:
                cls = QZClass.of(int(codes[r]), n)
                for pt in s.points_for_rows([int(r)]):
                    values[pt] = cls
    image = frozenset(counts)
    return EvalReport(
        image=image,
        constant=len(image) == 1,
        normalization_point=norm_pt,
        normalization_value=QZClass.of(norm_code, n) if norm_code is not None else None,
        class_counts=counts,
        determinate=det,
        indeterminate=indet,
        skipped=len(sols.tail_points),
        values=values,
    )


# ---------------------------------------------------------------------------
# Constancy certificates
# ---------------------------------------------------------------------------

@dataclass
class ConstancyReport:
    status: str              # ConstantCertified | NonconstantWitness | Unknown
    witness_degree: int = 0
    values: tuple = ()


def is_constant_with_trivial_tau(algebra, model, max_degree, torsor=None,
                                 budget=None):
    """Constancy analysis of the evaluation map.

    ConstantCertified only when the residue function is constant on the
    fibre (so the geometric part of the residue class is trivially zero);
    a variation of fibre classes at any degree <= max_degree is a
    nonconstancy witness; otherwise Unknown.
    """
    from .torsor import nonconstancy_witness
    if torsor is None:
        torsor = residue(algebra, model)
    if _residue_constant_on_fibre(torsor, model, max_degree):
        return ConstancyReport("ConstantCertified")
    w = nonconstancy_witness(torsor, max_degree, budget)
    if w:
        return ConstancyReport("NonconstantWitness", w.degree,
                               tuple(str(v) for v in w.values))
    return ConstancyReport("Unknown")


def _residue_constant_on_fibre(torsor, model, max_degree):
    rep = torsor.reps[0]
    p = model.prime
    if rep.num.is_constant() and rep.den.is_constant():
        return True
    # candidate constant = g at the first determinate smooth point found
    c = None
    for k in range(1, max_degree + 1):
        sols = solutions_for_torsors(model, k, [torsor])
        for s, codes in zip(sols.strata, codes_on_solutions(torsor, sols)):
            rows = np.nonzero(s.smooth & (codes >= 0))[0]
            if rows.size:
                pt = next(s.points_for_rows([int(rows[0])]))
                val = rep.num.evaluate(pt.coords) / rep.den.evaluate(pt.coords)
                if any(val.coords[1:]):
                    return False
                c = val.coords[0]
                break
        if c is not None:
            break
    if c is None:
        return False
    diff = (rep.num - rep.den * c).reduce_mod(p)
    if diff.is_zero():
        return True
    if model.is_hypersurface():
        return diff.reduce_by(model.reduced_equations()[0], p).is_zero()
    return False


# ---------------------------------------------------------------------------
# Joint evaluation of several algebras
# ---------------------------------------------------------------------------

def _joint_code_rows(algebras, model, k, torsors=None, budget=None):
    model.check_fibre_components()
    if torsors is None:
        torsors = [residue(a, model) for a in algebras]
    sols = solutions_for_torsors(model, k, torsors, budget)
    per_torsor = [codes_on_solutions(t, sols) for t in torsors]
    rows = []
    base = None
    for si, s in enumerate(sols.strata):
        good = s.smooth.copy()
        for codes in per_torsor:
            good &= codes[si] >= 0
        idx = np.nonzero(good)[0]
        if idx.size == 0:
            continue
        stacked = np.stack([codes[si][idx] for codes in per_torsor], axis=1)
        if base is None:
            base = stacked[0]
        rows.append(stacked)
    if base is None:
        raise NoDeterminatePoints("no smooth point is determinate for every class")
    return torsors, np.concatenate(rows, axis=0), base


def joint_image(algebras, model, k, torsors=None, budget=None):
    """Difference tuples (inv A_i(P) - inv A_i(P0))_i over determinate points."""
    if not algebras and not torsors:
        return {()}
    torsors, rows, base = _joint_code_rows(algebras, model, k, torsors, budget)
    ns = [t.n for t in torsors]
    diffs = (rows - base) % np.array(ns)
    out = set()
    for row in np.unique(diffs, axis=0):
        out.add(tuple(QZClass.of(int(v), n) for v, n in zip(row, ns)))
    return out


def prolific_check(algebras, model, k, torsors=None, budget=None):
    """Whether the joint evaluation map hits every tuple of prod (1/n_i)Z/Z."""
    if not algebras and not torsors:
        return True
    torsors2, rows, base = _joint_code_rows(algebras, model, k, torsors, budget)
    ns = np.array([t.n for t in torsors2])
    diffs = (rows - base) % ns
    target = 1
    for n in ns:
        target *= int(n)
    return len(np.unique(diffs, axis=0)) == target


# ---------------------------------------------------------------------------
# Zero-cycles
# ---------------------------------------------------------------------------

def _exact_degree_value_set(sols, codes_list):
    """Invariant codes attained at closed points of exact degree sols.k.

    A solution row with free coordinates always sits under points of exact
    degree k (pick a primitive free coordinate); a fully constrained row
    does so iff no proper-subfield Frobenius power fixes it.
    """
    k = sols.k
    fld = sols.field
    frob = None
    values = set()
    for s, codes in zip(sols.strata, codes_list):
        good = np.nonzero(s.smooth & (codes >= 0))[0]
        if good.size == 0:
            continue
        if s.free or k == 1:
            values.update(int(v) for v in np.unique(codes[good]))
            continue
        if frob is None:
            frob = np.array([(fld.from_encoding(e) ** fld.p).encoding
                             for e in range(fld.q)], dtype=np.int64)
        rows = s.sols[good]
        exact = np.ones(good.size, dtype=bool)
        for d in range(1, k):
            if k % d:
                continue
            img = rows
            for _ in range(d):
                img = frob[img]
            exact &= ~(img == rows).all(axis=1)
        if exact.any():
            values.update(int(v) for v in np.unique(codes[good][exact]))
    return values


def zero_cycle_image(algebra, model, max_degree, torsor=None, budget=None):
    """Invariants of degree-0 cycles supported in closed points of low degree.

    Generators are c(P) - deg(P) * c(P0) over closed points P of degree up
    to max_degree (corestriction preserves invariants on unramified
    extensions); the result is the subgroup of (1/n)Z/Z they generate.
    """
    model.check_fibre_components()
    if torsor is None:
        torsor = residue(algebra, model)
    n = torsor.n
    sols1 = solutions_for_torsors(model, 1, [torsor], budget)
    codes1 = codes_on_solutions(torsor, sols1)
    _, c0 = _first_determinate(sols1, codes1)
    if c0 is None:
        raise NoDeterminatePoints("no determinate smooth rational point to normalise at")

    gens = []
    for k in range(1, max_degree + 1):
        if k == 1:
            sols, codes_list = sols1, codes1
        else:
            sols = solutions_for_torsors(model, k, [torsor], budget)
            codes_list = codes_on_solutions(torsor, sols)
        for v in sorted(_exact_degree_value_set(sols, codes_list)):
            gens.append((v - k * c0) % n)

    d = n
    for g in gens:
        d = gcd(d, g)
    return {QZClass.of(j, n) for j in range(0, n, d)}
