import itertools
import os

import pytest

from brfibre.errors import (BudgetExceeded, ComponentError, DomainError,
                            NonIsolated, Unsupported)
from brfibre.field import Fq
from brfibre.model import (AmbientSpace, FibrePoint, ModelSpec, PointCountCache,
                           count_points, enumerate_points, find_singular_points,
                           frobenius_orbit, point_is_smooth, regularity_check)
from brfibre.poly import MultiPoly


def model_from(text, vars, p, weights=None, label=""):
    amb = AmbientSpace(vars, weights or tuple(1 for _ in vars))
    eqs = [MultiPoly.from_text(t, vars, weights) for t in text] if text else []
    return ModelSpec(amb, eqs, p, label)


DP1 = model_from(
    ["w^2 - z^3 - 2*x^4*z - 5*x^3*y*z + 2*x^2*y^2*z + 5*x*y^3*z - 2*y^4*z"
     " + 3*x^6 - 4*x^5*y + 4*x^4*y^2 + 4*x^2*y^4 + 4*x*y^5 - 8*y^6"],
    ("x", "y", "z", "w"), 11, weights=(1, 1, 2, 3), label="dp1_f11")

QUARTIC_CURVE = model_from(["X0^4 + 47*X1^4 - 103*X2^4"],
                           ("X0", "X1", "X2"), 17, label="quartic_curve")


def test_ambient_validation():
    with pytest.raises(DomainError):
        AmbientSpace(("x", "y"), (1, 2))
    with pytest.raises(DomainError):
        AmbientSpace(("x", "x"), (1, 1))
    assert AmbientSpace(("x", "y", "z", "w"), (1, 1, 2, 3)).describe() == "P(1,1,2,3)"


def test_model_validation():
    with pytest.raises(DomainError):
        model_from(["x^2 + y"], ("x", "y"), 5)          # not homogeneous
    with pytest.raises(DomainError):
        model_from(["5*x^2 + 10*y^2"], ("x", "y"), 5)   # vanishes mod p
    with pytest.raises(DomainError):
        model_from(["x^2"], ("x", "y"), 6)              # composite p


def test_projective_space_counts():
    """|P^n(F_q)| = (q^(n+1)-1)/(q-1) for q <= 49, n <= 3, no equations."""
    qs = [2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 17, 19, 23, 25, 27, 29, 31, 32,
          37, 41, 43, 47, 49]
    for q in qs:
        from sympy import factorint
        (p, k), = factorint(q).items()
        for n in range(1, 4):
            m = model_from([], tuple(f"x{i}" for i in range(n + 1)), p)
            assert count_points(m, k) == (q ** (n + 1) - 1) // (q - 1), (q, n)


def test_conic_count_over_f3():
    m = model_from(["x^2 + y^2 + z^2"], ("x", "y", "z"), 3)
    en = enumerate_points(m, 1)
    assert en.total == 4
    assert len(en.points) == 4
    assert all(pt.smooth for pt in en.points)


def test_quartic_curve_twelve_points():
    assert count_points(QUARTIC_CURVE, 1) == 12


def test_enumeration_each_point_once_and_on_scheme():
    m = model_from(["x^3 + 2*y^3 + 4*z^3"], ("x", "y", "z"), 13)
    en = enumerate_points(m, 1)
    seen = {pt.encodings() for pt in en.points}
    assert len(seen) == len(en.points) == en.total
    eq = m.reduced_equations()[0]
    for pt in en.points:
        assert eq.evaluate(pt.coords).is_zero()
    # brute force cross-check over all of P^2(F_13)
    brute = 0
    for lead in range(3):
        for rest in itertools.product(range(13), repeat=2 - lead):
            coords = (0,) * lead + (1,) + rest
            if eq.evaluate(coords) % 13 == 0:
                brute += 1
    assert brute == en.total


def test_hasse_weil_window_smooth_plane_curves():
    """|N - (q+1)| <= 2g sqrt(q), exactly, for assorted smooth curves."""
    cases = [
        (["x^3 + 2*y^3 + 4*z^3"], 13, 1),                    # genus 1 cubic
        (["x^4 + 3*y^4 + z^4"], 13, 3),                      # genus 3 quartic
        (["X0^4 + 47*X1^4 - 103*X2^4"], 17, 3),
        (["x^2*z - y^3 + 2*z^3"], 11, 1),
    ]
    for eqs, p, g in cases:
        vars = ("x", "y", "z") if eqs[0][0] == "x" else ("X0", "X1", "X2")
        m = model_from(eqs, vars, p)
        for k in (1, 2):
            sm = count_points(m, k, smooth_only=True)
            tot = count_points(m, k)
            assert sm == tot, "curve not smooth"
            q = p ** k
            assert (tot - q - 1) ** 2 <= 4 * g * g * q, (eqs, k)


def test_singular_search_smooth_quadric_empty():
    m = model_from(["x^2 + y^2 + z^2 + w^2"], ("x", "y", "z", "w"), 5)
    search = find_singular_points(m, 2)
    assert search.orbits == []
    assert search.certificate_ok


def test_singular_search_dp1():
    search = find_singular_points(DP1, 2)
    pts = sorted(pt.encodings() for pt, _ in search.orbits)
    assert pts == [(1, 1, 5, 0), (1, 10, 5, 0)]
    assert all(d == 1 for _, d in search.orbits)
    assert search.certificate_ok
    assert search.jac_counts == {1: 2, 2: 2}


def test_singular_search_cone_vertex():
    m = model_from(["X0^4 + 13*X1^4 - X2^4"], ("X0", "X1", "X2", "X3"), 17)
    search = find_singular_points(m, 1)
    assert [pt.encodings() for pt, _ in search.orbits] == [(0, 0, 0, 1)]


def test_singular_search_invariant_under_coordinate_permutation():
    base = ["x^2*w + y^3 - y*z^2"]
    m1 = model_from(base, ("x", "y", "z", "w"), 13)
    # swap x and w
    m2 = model_from(["w^2*x + y^3 - y*z^2"], ("x", "y", "z", "w"), 13)
    s1 = find_singular_points(m1, 1)
    s2 = find_singular_points(m2, 1)
    perm = {0: 3, 1: 1, 2: 2, 3: 0}

    def permuted(pt):
        e = pt.encodings()
        raw = tuple(e[perm[i]] for i in range(4))
        # renormalise: scale so the first nonzero coordinate is 1
        fld = Fq.get(13)
        coords = [fld.from_encoding(c) for c in raw]
        lead = next(i for i, c in enumerate(coords) if not c.is_zero())
        inv = coords[lead].inverse()
        return tuple((c * inv).encoding for c in coords)

    assert sorted(permuted(pt) for pt, _ in s1.orbits) == \
        sorted(pt.encodings() for pt, _ in s2.orbits)


def test_nonisolated_detected():
    # x^2 + y^2 in P^3 over p = 3 mod 4: two conjugate planes meeting in a line
    m = model_from(["x^2 + y^2"], ("x", "y", "z", "w"), 7)
    with pytest.raises(NonIsolated):
        find_singular_points(m, 2)


def test_budget_exceeded():
    m = model_from(["x^4 + 3*y^4 + z^4 + w^4"], ("x", "y", "z", "w"), 17)
    with pytest.raises(BudgetExceeded):
        count_points(m, 3)  # 4913^3 candidates


def test_component_guard():
    m = model_from(["x^2*y + x*y^2"], ("x", "y", "z"), 7)
    with pytest.raises(ComponentError):
        m.check_fibre_components()
    QUARTIC_CURVE.check_fibre_components()


# ---------------------------------------------------------------------------
# regularity
# ---------------------------------------------------------------------------

def _dp1_singular_points():
    return [pt for pt, _ in find_singular_points(DP1, 1).orbits]


def test_regularity_dp1_true_at_both():
    for pt in _dp1_singular_points():
        assert regularity_check(DP1, pt)


def test_regularity_cone_criterion():
    # f(X0,X1,X2) + p*g with unit g(0,0,0,1): regular at the vertex
    m = model_from(["X0^4 + 13*X1^4 - X2^4 + 17*X3^4"],
                   ("X0", "X1", "X2", "X3"), 17)
    fld = Fq.get(17)
    vertex = FibrePoint((fld.zero, fld.zero, fld.zero, fld.one))
    assert regularity_check(m, vertex)
    # p^2-divisible coefficient: not regular
    m2 = model_from(["X0^4 + 13*X1^4 - X2^4 + 289*X3^4"],
                    ("X0", "X1", "X2", "X3"), 17)
    assert not regularity_check(m2, vertex)


def test_regularity_lift_independence():
    """The verdict cannot depend on the coordinate lift."""
    import random
    rng = random.Random(11)
    for pt in _dp1_singular_points():
        base = [c.coords[0] for c in pt.coords]
        want = regularity_check(DP1, pt)
        F = DP1.equations[0]
        p = DP1.prime
        for _ in range(5):
            lift = [c + p * rng.randrange(0, 8) for c in base]
            val = F.evaluate(tuple(lift))
            assert val % p == 0
            assert (val % p ** 2 != 0) == want


def test_regularity_errors():
    two_eqs = model_from(["x*z - y^2", "x^2 - y*z"], ("x", "y", "z"), 7)
    fld = Fq.get(7)
    with pytest.raises(Unsupported):
        regularity_check(two_eqs, FibrePoint((fld.one, fld.zero, fld.zero)))
    smooth_pt = enumerate_points(QUARTIC_CURVE, 1).points[0]
    with pytest.raises(DomainError):
        regularity_check(QUARTIC_CURVE, smooth_pt)


# ---------------------------------------------------------------------------
# cache
# ---------------------------------------------------------------------------

def test_cache_round_trip(tmp_path):
    path = os.path.join(tmp_path, "counts.json")
    cache = PointCountCache(path)
    n1 = count_points(QUARTIC_CURVE, 1, cache=cache)
    assert cache.get(QUARTIC_CURVE, 17, False) == n1
    assert count_points(QUARTIC_CURVE, 1, cache=cache) == n1
    # smooth_only is keyed separately
    s1 = count_points(QUARTIC_CURVE, 1, smooth_only=True, cache=cache)
    assert cache.get(QUARTIC_CURVE, 17, True) == s1
    assert len(cache.entries()) == 2


def test_cache_corruption_recomputes(tmp_path):
    path = os.path.join(tmp_path, "counts.json")
    with open(path, "w") as fh:
        fh.write("{not json")
    cache = PointCountCache(path)
    from brfibre.errors import CacheError
    with pytest.raises(CacheError):
        cache.get(QUARTIC_CURVE, 17, False)
    n = count_points(QUARTIC_CURVE, 1, cache=cache)
    assert n == 12
    assert cache.get(QUARTIC_CURVE, 17, False) == 12


def test_frobenius_orbit_degree():
    fld = Fq.get(5, 2)
    # a point with a coordinate outside the prime field has degree 2
    alpha = fld.generator()
    pt = FibrePoint((fld.one, alpha))
    assert len(frobenius_orbit(pt)) == 2
    pt1 = FibrePoint((fld.one, fld.from_int(3)))
    assert len(frobenius_orbit(pt1)) == 1


def test_point_is_smooth_matches_enumeration():
    en = enumerate_points(DP1, 1)
    for pt in en.points[:40]:
        assert point_is_smooth(DP1, pt.coords) == pt.smooth
