"""Arithmetic models, special-fibre point enumeration, singular loci.

Enumeration of F_q points of the reduced special fibre works stratum by
stratum on the normalised representatives: the lead coordinate is the first
nonzero one (weight 1, set to 1), coordinates before it are 0, coordinates
after it are either constrained (they appear in the equations or in a
caller-supplied polynomial) and swept with vectorised arithmetic, or free
(they appear nowhere) and carried as a multiplicity q^f.  In P(1,1,2,3) the
residual locus x = y = 0 has no weight-1 chart; its points are enumerated
by explicit orbit reduction and flagged as chart-unsupported, with
smoothness left unassessed.

Deterministic point order: strata by lead index, solutions in ascending
mixed-radix candidate order, free coordinates expanded most-significant
first, chart-unsupported points last.
"""

import hashlib
import itertools
import json
import os
from dataclasses import dataclass

import numpy as np

from .errors import (BudgetExceeded, CacheError, ComponentError, DomainError,
                     NonIsolated, Unsupported, UnsupportedChart)
from .field import Fq, FqElem, VecField
from .poly import MultiPoly

DEFAULT_CANDIDATE_BUDGET = 60_000_000
DEFAULT_MATERIALIZE_BUDGET = 2_000_000
TAIL_SCALAR_BUDGET = 1_000_000
_CHUNK = 1 << 20


# ---------------------------------------------------------------------------
# Spaces, models, points
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AmbientSpace:
    var_names: tuple
    weights: tuple

    def __post_init__(self):
        names = tuple(self.var_names)
        weights = tuple(int(w) for w in self.weights)
        object.__setattr__(self, "var_names", names)
        object.__setattr__(self, "weights", weights)
        if len(names) != len(weights) or not names:
            raise DomainError("one positive weight per variable required")
        if len(set(names)) != len(names):
            raise DomainError("duplicate variable names")
        if not (all(w == 1 for w in weights) or weights == (1, 1, 2, 3)):
            raise DomainError("only straight projective space and P(1,1,2,3) are supported")

    @property
    def nvars(self):
        return len(self.var_names)

    @property
    def dim(self):
        return self.nvars - 1

    def all_weight_one(self):
        return all(w == 1 for w in self.weights)

    def weight_one_positions(self):
        return [i for i, w in enumerate(self.weights) if w == 1]

    def describe(self):
        if self.all_weight_one():
            return f"P^{self.dim}"
        return "P(" + ",".join(str(w) for w in self.weights) + ")"


class ModelSpec:
    """An integral model: ambient space, integer equations, a prime."""

    def __init__(self, ambient, equations, prime, label=""):
        self.ambient = ambient
        self.equations = tuple(equations)
        self.prime = int(prime)
        self.label = label
        from sympy import isprime
        if not isprime(self.prime):
            raise DomainError(f"{prime} is not prime")
        for eq in self.equations:
            if eq.vars != ambient.var_names or eq.weights != ambient.weights:
                raise DomainError("equation variables do not match the ambient space")
            if eq.is_zero():
                raise DomainError("zero equation")
            if eq.weighted_degree() is None:
                raise DomainError(f"equation {eq.to_text()} is not weighted-homogeneous")
            if eq.content() % self.prime == 0:
                raise DomainError("equation vanishes identically mod p (non-primitive model)")
        self._reduced = None

    def reduced_equations(self):
        """Defining equations of the special fibre, coefficients in [0, p)."""
        if self._reduced is None:
            self._reduced = tuple(eq.reduce_mod(self.prime) for eq in self.equations)
        return self._reduced

    def is_hypersurface(self):
        return len(self.equations) == 1

    def model_hash(self):
        payload = "|".join([
            ",".join(self.ambient.var_names),
            ",".join(str(w) for w in self.ambient.weights),
            str(self.prime),
        ] + [eq.to_text() for eq in self.equations])
        return hashlib.sha256(payload.encode()).hexdigest()[:16]

    def check_fibre_components(self):
        """Cheap sound guard against visibly split special fibres.

        A nontrivial monomial factor of the reduced equation splits off a
        hyperplane component.  Conjugate component splits invisible over F_p
        are not detected here; the singular-search growth certificate is the
        backstop for surfaces.
        """
        for eq in self.reduced_equations():
            if eq.is_zero():
                raise ComponentError("special fibre equation vanishes")
            if any(e > 0 for e in eq.monomial_content()):
                raise ComponentError(
                    "special fibre contains a coordinate hyperplane component")

    def __repr__(self):
        return f"ModelSpec({self.label or self.model_hash()}, p={self.prime})"


@dataclass(frozen=True)
class FibrePoint:
    coords: tuple
    smooth: object = None   # True / False / None (not assessed)
    chart_ok: bool = True

    @property
    def field_degree(self):
        return self.coords[0].field.k

    def encodings(self):
        return tuple(c.encoding for c in self.coords)

    def frobenius(self):
        return FibrePoint(tuple(c.frobenius() for c in self.coords),
                          self.smooth, self.chart_ok)

    def __str__(self):
        return "(" + " : ".join(str(c.encoding) for c in self.coords) + ")"


# ---------------------------------------------------------------------------
# Stratified enumeration
# ---------------------------------------------------------------------------

@dataclass
class Stratum:
    lead: int
    constrained: tuple
    free: tuple
    sols: np.ndarray          # (m, len(constrained)) encodings
    smooth: np.ndarray        # (m,) bool
    field: Fq

    @property
    def multiplicity(self):
        return self.field.q ** len(self.free)

    def coord_template(self, nvars):
        """Per-variable encodings for vectorised evaluation on solutions.

        Free positions are placeholders; only use with polynomials whose
        variables were declared when the strata were built.
        """
        template = [0] * nvars
        template[self.lead] = 1
        for col, pos in enumerate(self.constrained):
            template[pos] = self.sols[:, col]
        return template

    def points_for_rows(self, rows):
        """Materialise the points over the given solution rows."""
        fld = self.field
        q = fld.q
        zero, one = fld.zero, fld.one
        nv = self.lead + 1 + len(self.constrained) + len(self.free)
        for r in rows:
            flag = bool(self.smooth[r])
            base = [zero] * nv
            base[self.lead] = one
            for col, pos in enumerate(self.constrained):
                base[pos] = fld.from_encoding(int(self.sols[r, col]))
            if not self.free:
                yield FibrePoint(tuple(base), flag)
                continue
            for combo in itertools.product(range(q), repeat=len(self.free)):
                coords = list(base)
                for pos, enc in zip(self.free, combo):
                    coords[pos] = fld.from_encoding(enc)
                yield FibrePoint(tuple(coords), flag)

    def points(self, smooth_only=False):
        if smooth_only:
            rows = np.nonzero(self.smooth)[0]
        else:
            rows = range(self.sols.shape[0])
        yield from self.points_for_rows(rows)


@dataclass
class FibreSolutions:
    model: ModelSpec
    k: int
    field: Fq
    strata: list
    tail_points: list       # chart-unsupported FibrePoints (weighted ambient only)
    vec: VecField

    def counts(self):
        """(total including unassessed, smooth, singular, unassessed)."""
        total = smooth = singular = 0
        for s in self.strata:
            m = s.multiplicity
            n = s.sols.shape[0]
            ns = int(s.smooth.sum())
            total += n * m
            smooth += ns * m
            singular += (n - ns) * m
        return total + len(self.tail_points), smooth, singular, len(self.tail_points)

    def materialize(self, smooth_only=False, include_tail=False,
                    budget=DEFAULT_MATERIALIZE_BUDGET):
        total, smooth, _, _ = self.counts()
        n = smooth if smooth_only else total
        if n > budget:
            raise BudgetExceeded(f"would materialise {n} points (budget {budget})")
        out = []
        for s in self.strata:
            out.extend(s.points(smooth_only))
        if include_tail and not smooth_only:
            out.extend(self.tail_points)
        return out


def _weighted_tail_points(model, fld):
    """Points with every weight-1 coordinate zero, one per orbit."""
    ambient = model.ambient
    heavy = [i for i, w in enumerate(ambient.weights) if w > 1]
    if not heavy:
        return []
    q = fld.q
    if q ** len(heavy) > TAIL_SCALAR_BUDGET:
        raise BudgetExceeded("residual weighted locus too large to enumerate")
    eqs = model.reduced_equations()
    units = [fld.from_encoding(e) for e in range(1, q)]
    seen = set()
    points = []
    nv = ambient.nvars
    for combo in itertools.product(range(q), repeat=len(heavy)):
        if all(c == 0 for c in combo):
            continue
        coords = [fld.zero] * nv
        for pos, enc in zip(heavy, combo):
            coords[pos] = fld.from_encoding(enc)
        if any(not eq.evaluate(coords).is_zero() for eq in eqs):
            continue
        orbit = []
        for lam in units:
            scaled = tuple(
                coords[i] * lam ** ambient.weights[i] if i in heavy else fld.zero
                for i in range(nv))
            orbit.append(tuple(c.encoding for c in scaled))
        rep = min(orbit)
        if rep in seen:
            continue
        seen.add(rep)
        rep_coords = tuple(fld.from_encoding(e) for e in rep)
        points.append(FibrePoint(rep_coords, smooth=None, chart_ok=False))
    points.sort(key=lambda pt: pt.encodings())
    return points


def _stratum_smooth_flags(model, vec, template, sols_count):
    """Smoothness per solution: Jacobian rank equals the number of equations."""
    eqs = model.reduced_equations()
    if not eqs:
        return np.ones(sols_count, dtype=bool)
    p = model.prime
    if len(eqs) == 1:
        sing = np.ones(sols_count, dtype=bool)
        for name in eqs[0].vars:
            d = eqs[0].partial(name).reduce_mod(p)
            if d.is_zero():
                continue
            vals = vec.eval_terms(d.terms.items(), template)
            vals = np.broadcast_to(np.asarray(vals), (sols_count,))
            sing &= (vals == 0)
        return ~sing
    # several equations: per-point rank over FqElem (desk scale only)
    fld = vec.field
    flags = np.zeros(sols_count, dtype=bool)
    nv = len(eqs[0].vars)
    partials = [[eq.partial(v).reduce_mod(p) for v in eq.vars] for eq in eqs]
    for r in range(sols_count):
        coords = []
        for j in range(nv):
            t = template[j]
            enc = int(t[r]) if isinstance(t, np.ndarray) else int(t)
            coords.append(fld.from_encoding(enc))
        rows = [[d.evaluate(coords) for d in row] for row in partials]
        flags[r] = _rank(rows, fld) == len(eqs)
    return flags


def _rank(rows, fld):
    rows = [list(r) for r in rows]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for col in range(ncols):
        pivot = None
        for i in range(rank, len(rows)):
            if not rows[i][col].is_zero():
                pivot = i
                break
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        inv = rows[rank][col].inverse()
        rows[rank] = [x * inv for x in rows[rank]]
        for i in range(len(rows)):
            if i != rank and not rows[i][col].is_zero():
                c = rows[i][col]
                rows[i] = [a - c * b for a, b in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def fibre_solutions(model, k, extra_involved=(), budget=DEFAULT_CANDIDATE_BUDGET):
    """Solve the reduced equations over F_{p^k}, stratified as described above."""
    fld = Fq.get(model.prime, k)
    vec = VecField(fld)
    q = fld.q
    ambient = model.ambient
    nv = ambient.nvars
    eqs = model.reduced_equations()
    involved = set(extra_involved)
    for eq in eqs:
        involved |= eq.involved()

    leads = ambient.weight_one_positions()
    total_candidates = sum(q ** len([j for j in involved if j > i]) for i in leads)
    if total_candidates > budget:
        raise BudgetExceeded(
            f"{total_candidates} candidate tuples exceed budget {budget}")

    strata = []
    for i in leads:
        constrained = tuple(sorted(j for j in involved if j > i))
        free = tuple(j for j in range(i + 1, nv) if j not in involved)
        m = len(constrained)
        ncand = q ** m
        sol_chunks = []
        for start in range(0, ncand, _CHUNK):
            stop = min(ncand, start + _CHUNK)
            idx = np.arange(start, stop, dtype=np.int64)
            template = [0] * nv
            template[i] = 1
            for col, pos in enumerate(constrained):
                template[pos] = (idx // q ** (m - 1 - col)) % q
            mask = np.ones(stop - start, dtype=bool)
            for eq in eqs:
                vals = vec.eval_terms(eq.terms.items(), template)
                vals = np.broadcast_to(np.asarray(vals), mask.shape)
                mask &= (vals == 0)
            if mask.any():
                cols = [np.broadcast_to(template[pos], mask.shape)[mask]
                        for pos in constrained]
                sol_chunks.append(np.stack(cols, axis=1) if m else
                                  np.zeros((int(mask.sum()), 0), dtype=np.int64))
        if sol_chunks:
            sols = np.concatenate(sol_chunks, axis=0)
        else:
            sols = np.zeros((0, m), dtype=np.int64)
        template = [0] * nv
        template[i] = 1
        for col, pos in enumerate(constrained):
            template[pos] = sols[:, col]
        smooth = _stratum_smooth_flags(model, vec, template, sols.shape[0])
        strata.append(Stratum(i, constrained, free, sols, smooth, fld))

    tail = _weighted_tail_points(model, fld) if not ambient.all_weight_one() else []
    return FibreSolutions(model, k, fld, strata, tail, vec)


# ---------------------------------------------------------------------------
# Public enumeration API
# ---------------------------------------------------------------------------

@dataclass
class PointEnumeration:
    points: list
    skipped: list
    total: int
    smooth_count: int
    singular_count: int


def enumerate_points(model, k, smooth_only=False,
                     budget=DEFAULT_CANDIDATE_BUDGET,
                     materialize_budget=DEFAULT_MATERIALIZE_BUDGET):
    """All F_{p^k} points of the reduced special fibre, each exactly once.

    Chart-unsupported points (weighted ambient, no weight-1 coordinate
    nonzero) are returned in .skipped with smoothness unassessed; they are
    excluded from .points when smooth_only is set.
    """
    sols = fibre_solutions(model, k, budget=budget)
    total, smooth, singular, _ = sols.counts()
    pts = sols.materialize(smooth_only=smooth_only, budget=materialize_budget)
    return PointEnumeration(pts, sols.tail_points, total, smooth, singular)


def count_points(model, k, smooth_only=False, cache=None,
                 budget=DEFAULT_CANDIDATE_BUDGET):
    """Exact point count without materialisation (cacheable).

    The plain count includes chart-unsupported points; the smooth-only
    count excludes them (their smoothness is never assessed).
    """
    q = model.prime ** k
    if cache is not None:
        try:
            hit = cache.get(model, q, smooth_only)
        except CacheError:
            cache.reset()
            hit = None
        if hit is not None:
            return hit
    sols = fibre_solutions(model, k, budget=budget)
    total, smooth, _, _ = sols.counts()
    n = smooth if smooth_only else total
    if cache is not None:
        cache.put(model, q, smooth_only, n)
    return n


class PointCountCache:
    """Persistent exact point counts, keyed by (model hash, q, smooth_only)."""

    def __init__(self, path):
        self.path = path

    def _load(self):
        if not os.path.exists(self.path):
            return {}
        try:
            with open(self.path) as fh:
                data = json.load(fh)
            if not isinstance(data, dict):
                raise ValueError("not a mapping")
            for v in data.values():
                if not isinstance(v, int):
                    raise ValueError("non-integer count")
        except (ValueError, OSError) as exc:
            raise CacheError(f"corrupt cache file {self.path}: {exc}") from exc
        return data

    @staticmethod
    def _key(model, q, smooth_only):
        return f"{model.model_hash()}:{q}:{int(bool(smooth_only))}"

    def get(self, model, q, smooth_only):
        return self._load().get(self._key(model, q, smooth_only))

    def put(self, model, q, smooth_only, count):
        try:
            data = self._load()
        except CacheError:
            data = {}
        data[self._key(model, q, smooth_only)] = int(count)
        os.makedirs(os.path.dirname(os.path.abspath(self.path)), exist_ok=True)
        with open(self.path, "w") as fh:
            json.dump(data, fh, sort_keys=True, indent=0)

    def reset(self):
        if os.path.exists(self.path):
            os.remove(self.path)

    def entries(self):
        return dict(sorted(self._load().items()))


# ---------------------------------------------------------------------------
# Singular locus
# ---------------------------------------------------------------------------

def frobenius_orbit(point):
    """All conjugates of a point; the orbit size is its exact degree."""
    orbit = [point]
    cur = point.frobenius()
    while cur.encodings() != point.encodings():
        orbit.append(cur)
        cur = cur.frobenius()
    return orbit


@dataclass
class SingularSearch:
    orbits: list            # (representative FibrePoint, degree) pairs, new degree first
    jac_counts: dict        # k -> rational singular points found over F_{p^k}
    tail_candidates: list   # chart-unsupported points where all partials vanish
    certificate_ok: bool


_SINGULAR_CAP = 20_000


def _tail_point_degree(model, pt):
    """Exact degree of a chart-unsupported point, modulo the weighted scaling."""
    fld = pt.coords[0].field
    ambient = model.ambient
    nv = ambient.nvars
    orbit_encs = set()
    for enc in range(1, fld.q):
        lam = fld.from_encoding(enc)
        scaled = tuple(pt.coords[i] * lam ** ambient.weights[i] for i in range(nv))
        orbit_encs.add(tuple(c.encoding for c in scaled))
    cur = pt.frobenius()
    d = 1
    while cur.encodings() not in orbit_encs:
        cur = cur.frobenius()
        d += 1
    return d


def find_singular_points(model, max_extension=2, budget=DEFAULT_CANDIDATE_BUDGET):
    """All non-smooth fibre points over F_{p^k}, k <= max_extension.

    NonIsolated is raised when the rational singular-point counts grow at
    the scale of the field itself (a positive-dimensional locus), which is
    crude but honest at desk scale.  The completeness certificate holds when
    the counts match the found orbits over every scanned extension and no
    new orbit appears at the top extension; new top-degree orbits leave the
    search correct but uncertified (raise max_extension to certify).
    Chart-unsupported points whose cone partials all vanish cannot be
    classified; they are reported in tail_candidates and also leave the
    certificate unconfirmed.
    """
    orbits = []
    jac_counts = {}
    tail_candidates = []
    for k in range(1, max_extension + 1):
        q = model.prime ** k
        sols = fibre_solutions(model, k, budget=budget)
        nsing = sum(int((~s.smooth).sum()) * s.multiplicity for s in sols.strata)
        jac_counts[k] = nsing
        if nsing > _SINGULAR_CAP or nsing >= (q + 1) // 2:
            raise NonIsolated(
                f"{nsing} singular points over a field of size {q}; "
                "treating the singular locus as positive-dimensional")
        singular_pts = []
        for s in sols.strata:
            rows = np.nonzero(~s.smooth)[0]
            singular_pts.extend(s.points_for_rows(rows))
        for pt in sols.tail_points:
            if _all_partials_vanish(model, pt.coords):
                if _tail_point_degree(model, pt) == k:
                    tail_candidates.append((pt, k))
        seen = set()
        for pt in sorted(singular_pts, key=lambda p: p.encodings()):
            if pt.encodings() in seen:
                continue
            orbit = frobenius_orbit(pt)
            for o in orbit:
                seen.add(o.encodings())
            if len(orbit) == k:
                rep = min(orbit, key=lambda o: o.encodings())
                orbits.append((rep, k))

    for k in range(1, max_extension + 1):
        expected = sum(d for (_, d) in orbits if k % d == 0)
        if jac_counts[k] != expected:
            raise NonIsolated(
                f"singular-point bookkeeping failed: counts {jac_counts} "
                f"vs orbits {[(str(o), d) for o, d in orbits]}")
    stabilized = all(d < max_extension for _, d in orbits) or max_extension == 0
    return SingularSearch(orbits, jac_counts, tail_candidates,
                          stabilized and not tail_candidates)


def _all_partials_vanish(model, coords):
    p = model.prime
    for eq in model.reduced_equations():
        for v in eq.vars:
            d = eq.partial(v).reduce_mod(p)
            if not d.is_zero() and not d.evaluate(coords).is_zero():
                return False
    return True


def point_is_smooth(model, coords):
    """Jacobian criterion at a single point (needs a weight-1 chart)."""
    ambient = model.ambient
    w1 = ambient.weight_one_positions()
    if all(coords[i].is_zero() for i in w1):
        raise UnsupportedChart("point has no nonzero weight-1 coordinate")
    eqs = model.reduced_equations()
    if not eqs:
        return True
    fld = coords[0].field
    rows = [[eq.partial(v).reduce_mod(model.prime).evaluate(coords)
             for v in eq.vars] for eq in eqs]
    return _rank(rows, fld) == len(eqs)


# ---------------------------------------------------------------------------
# Regularity of the total space at a fibre-singular point
# ---------------------------------------------------------------------------

def _lift_eval_mod_p2(model, coords):
    """F(lift) in (Z/p^2)[t]/(M(t)) for the coordinate lift with digits in [0,p)."""
    F = model.equations[0]
    p = model.prime
    fld = coords[0].field
    k = fld.k
    modulus = fld.modulus
    p2 = p * p

    def mul(a, b):
        res = [0] * (2 * k - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    res[i + j] = (res[i + j] + ai * bj) % p2
        for i in range(len(res) - 1, k - 1, -1):
            c = res[i]
            if c:
                res[i] = 0
                for j in range(k):
                    res[i - k + j] = (res[i - k + j] - c * modulus[j]) % p2
        return res[:k]

    def power(a, e):
        out = [1] + [0] * (k - 1)
        acc = list(a)
        while e:
            if e & 1:
                out = mul(out, acc)
            acc = mul(acc, acc)
            e >>= 1
        return out

    lifts = [list(c.coords) for c in coords]
    total = [0] * k
    for exps, c in F.terms.items():
        val = [c % p2] + [0] * (k - 1)
        for x, e in zip(lifts, exps):
            if e:
                val = mul(val, power(x, e))
        total = [(a + b) % p2 for a, b in zip(total, val)]
    return total


def regularity_check(model, point):
    """Whether the total space is regular at a fibre-singular point.

    For a hypersurface F this holds iff F(lift)/p is a unit for any (hence
    every) coordinate lift; the fibre partials vanish at the point, which is
    exactly what makes the criterion lift-independent.
    """
    if not model.is_hypersurface():
        raise Unsupported("regularity check is implemented for hypersurfaces only")
    coords = point.coords if isinstance(point, FibrePoint) else tuple(point)
    F0 = model.reduced_equations()[0]
    if not F0.evaluate(coords).is_zero():
        raise DomainError("point does not lie on the special fibre")
    if not _all_partials_vanish(model, coords):
        raise DomainError("point is not singular on the special fibre")
    total = _lift_eval_mod_p2(model, coords)
    return any(c % (model.prime ** 2) for c in total)
