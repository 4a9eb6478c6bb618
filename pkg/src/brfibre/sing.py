"""ADE classification of isolated surface singularities and Brauer tables.

The classifier is invariant-based: Hessian corank, Milnor number, and the
root structure of the residual binary cubic decide the type without any
blow-ups.  The Milnor number is the codimension of the Jacobian ideal in
the local algebra, computed by linear algebra on monomials up to a cutoff
degree.  Cutoffs run 8, 16, 32; at each cutoff the computed staircase is
accepted as exact when its top degree lies strictly below the cutoff (then
m^a lies in the ideal up to the cutoff for a = top+1, and Nakayama closes
the gap), otherwise the cutoff is doubled; past 32 the singularity is
declared non-isolated.
"""

import os
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import (DomainError, NonIsolated, NotADE, TableMiss, Unsupported,
                     UnsupportedCharacteristic, UnsupportedChart)
from .field import Fq, FqElem, VecField
from .model import find_singular_points
from .poly import MultiPoly, hessian

_MILNOR_CUTOFFS = (8, 16, 32)


@dataclass(frozen=True)
class AdeType:
    family: str
    index: int

    def __post_init__(self):
        if self.family == "A":
            ok = self.index >= 1
        elif self.family == "D":
            ok = self.index >= 4
        elif self.family == "E":
            ok = self.index in (6, 7, 8)
        else:
            ok = False
        if not ok:
            raise DomainError(f"no ADE type {self.family}{self.index}")

    @property
    def milnor(self):
        return self.index

    def __str__(self):
        return f"{self.family}{self.index}"


@dataclass(frozen=True)
class SingularityType:
    entries: tuple   # ((AdeType, field_degree), ...) one per geometric point

    @staticmethod
    def of(entries):
        order = {"A": 0, "D": 1, "E": 2}
        entries = tuple(sorted(entries,
                               key=lambda e: (order[e[0].family], e[0].index, e[1])))
        return SingularityType(entries)

    def is_smooth(self):
        return not self.entries

    def label(self):
        if not self.entries:
            return "smooth"
        runs = []
        for t, _ in self.entries:
            if runs and runs[-1][0] == t:
                runs[-1][1] += 1
            else:
                runs.append([t, 1])
        return "+".join(f"{n if n > 1 else ''}{t}" for t, n in runs)

    def __str__(self):
        return self.label()


# ---------------------------------------------------------------------------
# Milnor number
# ---------------------------------------------------------------------------

def _monomial_basis(nvars, cutoff):
    """Monomials of total degree <= cutoff, ordered by (degree, exponents)."""
    monos = []
    for d in range(cutoff + 1):
        level = []

        def rec(prefix, remaining, budget):
            if remaining == 1:
                level.append(tuple(prefix) + (budget,))
                return
            for e in range(budget + 1):
                rec(prefix + [e], remaining - 1, budget - e)

        rec([], nvars, d)
        monos.extend(sorted(level))
    return monos


def local_algebra_codim(gens, cutoff):
    """dim of F_q[[x]]/(I + m^(cutoff+1)) for the ideal spanned by gens.

    Returns (codim, top_staircase_degree).  Linear algebra over F_q on the
    monomial basis; the span is closed under multiplication by variables.
    """
    field = None
    for g in gens:
        for c in g.terms.values():
            if isinstance(c, FqElem):
                field = c.field
                break
        if field:
            break
    if field is None:
        raise DomainError("generators must have field coefficients")
    vec = VecField(field)
    nvars = len(gens[0].vars)
    monos = _monomial_basis(nvars, cutoff)
    index = {m: i for i, m in enumerate(monos)}
    M = len(monos)

    shift_maps = []
    for v in range(nvars):
        mp = np.full(M, -1, dtype=np.int64)
        for m, i in index.items():
            up = list(m)
            up[v] += 1
            j = index.get(tuple(up))
            if j is not None:
                mp[i] = j
        shift_maps.append(mp)

    def to_vector(g):
        row = np.zeros(M, dtype=np.int64)
        for exps, c in g.terms.items():
            i = index.get(exps)
            if i is not None:
                enc = c.encoding if isinstance(c, FqElem) else c % field.p
                row[i] = vec.add(row[i], enc)
        return row

    pivots = {}
    queue = [to_vector(g) for g in gens]
    while queue:
        row = queue.pop()
        while True:
            nz = np.nonzero(row)[0]
            if nz.size == 0:
                row = None
                break
            lead = int(nz[0])
            piv = pivots.get(lead)
            if piv is None:
                inv = vec.inv(int(row[lead]))
                row = vec.mul(row, inv)
                break
            row = vec.sub(row, vec.mul(int(row[lead]), piv))
        if row is None:
            continue
        pivots[int(np.nonzero(row)[0][0])] = row
        for mp in shift_maps:
            shifted = np.zeros(M, dtype=np.int64)
            valid = mp >= 0
            shifted[mp[valid]] = row[valid]
            if shifted.any():
                queue.append(shifted)

    staircase = [monos[i] for i in range(M) if i not in pivots]
    top = max((sum(m) for m in staircase), default=-1)
    return len(staircase), top


def milnor_number(f):
    """Milnor number of an isolated singularity at the origin."""
    gens = [f.partial(v) for v in f.vars]
    if all(g.is_zero() for g in gens):
        raise NonIsolated("all partials vanish identically")
    prev = None
    for cutoff in _MILNOR_CUTOFFS:
        mu, top = local_algebra_codim(gens, cutoff)
        if top < cutoff:
            return mu
        if prev is not None and mu == prev:
            return mu
        prev = mu
    raise NonIsolated(f"local algebra dimension not stable below cutoff "
                      f"{_MILNOR_CUTOFFS[-1]}")


# ---------------------------------------------------------------------------
# Corank and the residual cubic
# ---------------------------------------------------------------------------

def _hessian_at_origin(f, field):
    H = hessian(f)
    origin = tuple(field.zero for _ in f.vars)
    return [[field.elem(entry.evaluate(origin)) for entry in row] for row in H]


def _kernel_basis(mat, field):
    n = len(mat)
    rank = 0
    piv_cols = []
    rows = [list(r) for r in mat]
    for col in range(n):
        pivot = None
        for i in range(rank, n):
            if not rows[i][col].is_zero():
                pivot = i
                break
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        inv = rows[rank][col].inverse()
        rows[rank] = [x * inv for x in rows[rank]]
        for i in range(n):
            if i != rank and not rows[i][col].is_zero():
                c = rows[i][col]
                rows[i] = [a - c * b for a, b in zip(rows[i], rows[rank])]
        piv_cols.append(col)
        rank += 1
    basis = []
    free_cols = [c for c in range(n) if c not in piv_cols]
    for fc in free_cols:
        v = [field.zero] * n
        v[fc] = field.one
        for r, pc in enumerate(piv_cols):
            v[pc] = -rows[r][fc]
        basis.append(v)
    return rank, basis


def _residual_cubic(f, kernel, field):
    """Cubic part of f restricted to the Hessian kernel plane."""
    v1, v2 = kernel
    st = ("s", "t")
    lines = []
    for i in range(len(f.vars)):
        lines.append(MultiPoly(st, {(1, 0): v1[i], (0, 1): v2[i]}))
    cubic = MultiPoly.zero(st)
    for exps, c in f.homogeneous_part(3).terms.items():
        term = MultiPoly.const(st, field.elem(c))
        for L, e in zip(lines, exps):
            if e:
                term = term * L ** e
        cubic = cubic + term
    return cubic


def _binary_cubic_shape(cubic, field):
    """'zero' | 'distinct' | 'double' | 'triple' over the algebraic closure."""
    if cubic.is_zero():
        return "zero"
    coef = {e: field.elem(c) for e, c in cubic.terms.items()}
    a = coef.get((3, 0), field.zero)
    b = coef.get((2, 1), field.zero)
    c = coef.get((1, 2), field.zero)
    d = coef.get((0, 3), field.zero)
    disc = (18 * a * b * c * d - 4 * b ** 3 * d + (b * c) ** 2
            - 4 * a * c ** 3 - 27 * (a * d) ** 2)
    if not disc.is_zero():
        return "distinct"
    hs = cubic.partial("s")
    ht = cubic.partial("t")
    hess = hs.partial("s") * ht.partial("t") - hs.partial("t") ** 2
    if hess.is_zero():
        return "triple"
    return "double"


def classify_ade(local_equation):
    """ADE type of an isolated 3-variable hypersurface singularity at 0.

    Requires residue characteristic >= 7, vanishing constant and linear
    parts.  Raises NonIsolated / NotADE when the germ falls outside the
    catalogue.
    """
    f = local_equation
    if len(f.vars) != 3:
        raise DomainError("classifier expects a 3-variable local equation")
    field = None
    for cc in f.terms.values():
        if isinstance(cc, FqElem):
            field = cc.field
            break
    if field is None:
        raise DomainError("local equation must have coefficients in a finite field")
    if field.p < 7:
        raise UnsupportedCharacteristic(f"classifier needs characteristic >= 7, got {field.p}")
    origin = tuple(field.zero for _ in f.vars)
    if not field.elem(f.evaluate(origin)).is_zero():
        raise DomainError("local equation does not vanish at the origin")
    if f.homogeneous_part(1).terms:
        raise DomainError("linear part does not vanish; the point is not singular")

    H = _hessian_at_origin(f, field)
    rank, kernel = _kernel_basis(H, field)
    corank = 3 - rank
    mu = milnor_number(f)

    if corank == 0:
        if mu != 1:
            raise NotADE(f"nondegenerate Hessian with Milnor number {mu}")
        return AdeType("A", 1)
    if corank == 1:
        if mu < 2:
            raise NotADE(f"corank 1 with Milnor number {mu}")
        return AdeType("A", mu)
    if corank >= 3:
        raise NotADE(f"corank {corank} exceeds the ADE range")

    cubic = _residual_cubic(f, kernel, field)
    shape = _binary_cubic_shape(cubic, field)
    if shape == "distinct":
        if mu != 4:
            raise NotADE(f"three distinct cubic roots with Milnor number {mu}")
        return AdeType("D", 4)
    if shape == "double":
        if mu < 5:
            raise NotADE(f"double cubic root with Milnor number {mu}")
        return AdeType("D", mu)
    if shape == "triple":
        if mu in (6, 7, 8):
            return AdeType("E", mu)
        raise NotADE(f"triple cubic root with Milnor number {mu}")
    raise NotADE("residual cubic vanishes identically")


# ---------------------------------------------------------------------------
# Aggregation over a model
# ---------------------------------------------------------------------------

def local_equation_at(model, point):
    """Shifted affine equation at a fibre point, over the point's field."""
    if not model.is_hypersurface():
        raise Unsupported("local equations are extracted for hypersurfaces only")
    coords = point.coords
    fld = coords[0].field
    lead = next(i for i, c in enumerate(coords)
                if not c.is_zero() and model.ambient.weights[i] == 1)
    eq = model.reduced_equations()[0]
    chart = eq.dehomogenize(model.ambient.var_names[lead])
    chart = chart.map_coefficients(lambda c: fld.from_int(c))
    affine = tuple(c for i, c in enumerate(coords) if i != lead)
    return chart.shift(affine)


def singularity_type(model, max_extension=2):
    """Canonical multiset of ADE labels of the special fibre's singularities."""
    search = find_singular_points(model, max_extension=max_extension)
    if search.tail_candidates:
        raise UnsupportedChart(
            "singular candidates off the weight-1 charts cannot be classified: "
            + ", ".join(str(pt) for pt, _ in search.tail_candidates))
    if not search.certificate_ok:
        raise NonIsolated(
            "singular orbits of the top scanned degree were found; raise "
            "max_extension to certify the search is complete")
    entries = []
    for rep, degree in search.orbits:
        local = local_equation_at(model, rep)
        t = classify_ade(local)
        entries.extend([(t, degree)] * degree)
    return SingularityType.of(entries)


# ---------------------------------------------------------------------------
# Brauer-group lookup tables
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GroupDescriptor:
    """Finite abelian group as invariant factors, each dividing the next."""

    factors: tuple

    @staticmethod
    def of(factors):
        factors = tuple(int(f) for f in factors if int(f) != 1)
        for a, b in zip(factors, factors[1:]):
            if b % a:
                raise DomainError(f"invariant factors {factors} do not divide in turn")
        return GroupDescriptor(factors)

    @staticmethod
    def parse(text):
        text = text.strip()
        if text in ("-", "", "0", "1"):
            return GroupDescriptor(())
        return GroupDescriptor.of(int(t) for t in text.split(","))

    @property
    def order(self):
        n = 1
        for f in self.factors:
            n *= f
        return n

    def is_trivial(self):
        return not self.factors

    def __str__(self):
        if not self.factors:
            return "0"
        runs = []
        for f in self.factors:
            if runs and runs[-1][0] == f:
                runs[-1][1] += 1
            else:
                runs.append([f, 1])
        return " x ".join(f"(Z/{f})^{n}" if n > 1 else f"Z/{f}" for f, n in runs)


@dataclass(frozen=True)
class BrauerTableEntry:
    br_bar: GroupDescriptor
    h1: GroupDescriptor
    br_nr: GroupDescriptor   # None when the extension is not resolved
    exact: bool

    @property
    def br_nr_order(self):
        if self.br_nr is not None:
            return self.br_nr.order
        return self.br_bar.order * self.h1.order


_TABLE_PATH = os.path.join(os.path.dirname(__file__), "data", "brauer_groups.tsv")


@lru_cache(maxsize=1)
def _load_table(path=_TABLE_PATH):
    rows = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = [p.strip() for p in line.split("|")]
            if len(parts) != 5:
                raise DomainError(f"bad table row: {line!r}")
            degree, label, bb, h1, bn = parts
            br_bar = GroupDescriptor.parse(bb)
            h1g = GroupDescriptor.parse(h1)
            br_nr = GroupDescriptor.parse(bn) if bn != "?" else None
            if br_nr is not None and br_nr.order != br_bar.order * h1g.order:
                raise DomainError(
                    f"table row {line!r} breaks exactness: "
                    f"{br_bar.order} * {h1g.order} != {br_nr.order}")
            rows[(int(degree), label)] = BrauerTableEntry(
                br_bar, h1g, br_nr, br_nr is not None)
    return rows


def brauer_table(degree, sing_type):
    """Shipped (degree, singularity type) -> Brauer data of the reduction.

    Rows carry the subgroup (algebraically closed fibre), the quotient
    (unramified covers of the smooth locus), and the resolved middle group
    where known; lookups fall back to the per-degree wildcard row and raise
    TableMiss otherwise.
    """
    label = sing_type.label() if isinstance(sing_type, SingularityType) else str(sing_type)
    table = _load_table()
    entry = table.get((int(degree), label))
    if entry is None:
        entry = table.get((int(degree), "*"))
    if entry is None:
        raise TableMiss(f"no table entry for degree {degree}, type {label}")
    return entry


def del_pezzo_degree(model):
    """Degree inferred from the ambient space and equation degrees, or None."""
    amb = model.ambient
    degs = [eq.weighted_degree() for eq in model.equations]
    if amb.weights == (1, 1, 2, 3) and degs == [6]:
        return 1
    if amb.all_weight_one() and amb.nvars == 4 and degs == [3]:
        return 3
    if amb.all_weight_one() and amb.nvars == 5 and degs == [2, 2]:
        return 4
    return None
