import random

import pytest

from brfibre.errors import (DomainError, NonIsolated, NotADE, TableMiss,
                            UnsupportedCharacteristic)
from brfibre.field import Fq
from brfibre.model import AmbientSpace, ModelSpec
from brfibre.poly import MultiPoly
from brfibre.sing import (AdeType, GroupDescriptor, SingularityType, brauer_table,
                          classify_ade, del_pezzo_degree, local_equation_at,
                          milnor_number, singularity_type)

VARS3 = ("x", "y", "z")


def over(field, text):
    f = MultiPoly.from_text(text, VARS3)
    return f.map_coefficients(lambda c: field.from_int(c))


# The ADE normal forms x^2 + y^2 + z^(n+1), x^2 + y^2*z + z^(n-1), and the
# three exceptional ones, each with its Milnor number.
CATALOG = [
    ("x^2 + y^2 + z^2", AdeType("A", 1)),
    ("x^2 + y^2 + z^3", AdeType("A", 2)),
    ("x^2 + y^2 + z^4", AdeType("A", 3)),
    ("x^2 + y^2 + z^5", AdeType("A", 4)),
    ("x^2 + y^2 + z^7", AdeType("A", 6)),
    ("x^2 + y^3 - y*z^2", AdeType("D", 4)),
    ("x^2 + y^2*z + z^4", AdeType("D", 5)),
    ("x^2 + y^2*z + z^5", AdeType("D", 6)),
    ("x^2 + y^3 + z^4", AdeType("E", 6)),
    ("x^2 + y^3 + y*z^3", AdeType("E", 7)),
    ("x^2 + y^3 + z^5", AdeType("E", 8)),
]


def test_ade_type_validation():
    with pytest.raises(DomainError):
        AdeType("D", 3)
    with pytest.raises(DomainError):
        AdeType("E", 9)
    assert str(AdeType("A", 4)) == "A4"


def test_catalog_normal_forms_over_five_primes():
    for p in (7, 11, 13, 17, 23):
        fld = Fq.get(p)
        for text, expect in CATALOG:
            f = over(fld, text)
            if any(e and e % p == 0 for exps in f.terms for e in exps):
                # a monomial exponent divisible by p kills its partial; the
                # germ is not of that type in this characteristic
                continue
            assert classify_ade(f) == expect, (p, text)
            assert milnor_number(f) == expect.milnor


def test_classifier_invariant_under_linear_coordinate_changes():
    rng = random.Random(31)
    fld = Fq.get(13)
    picks = ["x^2 + y^2 + z^5", "x^2 + y^2*z + z^4", "x^2 + y^3 + z^4",
             "x^2 + y^3 - y*z^2"]
    for text in picks:
        f = over(fld, text)
        expect = classify_ade(f)
        for _ in range(4):
            while True:
                M = [[fld.from_encoding(rng.randrange(13)) for _ in range(3)]
                     for _ in range(3)]
                from brfibre.model import _rank
                if _rank([row[:] for row in M], fld) == 3:
                    break
            subs = []
            for i in range(3):
                subs.append(MultiPoly(VARS3, {
                    (1, 0, 0): M[i][0], (0, 1, 0): M[i][1], (0, 0, 1): M[i][2]}))
            g = MultiPoly.zero(VARS3)
            for exps, c in f.terms.items():
                term = MultiPoly.const(VARS3, c)
                for s, e in zip(subs, exps):
                    if e:
                        term = term * s ** e
                g = g + term
            assert classify_ade(g) == expect, text


def test_classifier_error_paths():
    fld = Fq.get(11)
    with pytest.raises(DomainError):
        classify_ade(over(fld, "x^2 + y^2 + z^2 + 1"))     # no zero at origin
    with pytest.raises(DomainError):
        classify_ade(over(fld, "x + y^2 + z^2"))           # not singular
    with pytest.raises(NonIsolated):
        classify_ade(over(fld, "x^2 + y^2"))               # line of sing points
    with pytest.raises(NonIsolated):
        classify_ade(over(fld, "x^2"))
    with pytest.raises(UnsupportedCharacteristic):
        classify_ade(over(Fq.get(5), "x^2 + y^2 + z^2"))
    with pytest.raises(NotADE):
        classify_ade(over(fld, "x^3 + y^3 + z^3"))         # corank 3
    with pytest.raises(NotADE):
        classify_ade(over(fld, "x^2 + y^4 + z^4"))         # cubic part zero


# ---------------------------------------------------------------------------
# aggregation on models
# ---------------------------------------------------------------------------

def dp1_model():
    vars4 = ("x", "y", "z", "w")
    f = MultiPoly.from_text(
        "w^2 - z^3 - 2*x^4*z - 5*x^3*y*z + 2*x^2*y^2*z + 5*x*y^3*z - 2*y^4*z"
        " + 3*x^6 - 4*x^5*y + 4*x^4*y^2 + 4*x^2*y^4 + 4*x*y^5 - 8*y^6",
        vars4, (1, 1, 2, 3))
    return ModelSpec(AmbientSpace(vars4, (1, 1, 2, 3)), [f], 11, "dp1_f11")


def test_dp1_singularity_type_pinned():
    st = singularity_type(dp1_model(), 2)
    assert st.label() == "2A4"
    assert all(d == 1 for _, d in st.entries)


def test_smooth_fibre_empty_type():
    vars4 = ("x", "y", "z", "w")
    m = ModelSpec(AmbientSpace(vars4, (1, 1, 1, 1)),
                  [MultiPoly.from_text("x^2 + y^2 + z^2 + w^2", vars4)], 13)
    st = singularity_type(m, 2)
    assert st.is_smooth()
    assert st.label() == "smooth"


def test_single_node_cubic_surface():
    """A cubic with a nondegenerate quadric cone at (0:0:0:1): one A1 node."""
    vars4 = ("x", "y", "z", "w")
    f = MultiPoly.from_text(
        "w*x^2 + w*y^2 + w*z^2 + x^3 + 2*y^3 + 3*z^3 + x*y*z", vars4)
    m = ModelSpec(AmbientSpace(vars4, (1, 1, 1, 1)), [f], 13)
    st = singularity_type(m, 2)
    assert st.label() == "A1"


def test_3a2_cubic_surface():
    """The cyclic cubic x^3 = y*z*w has three A2 points on coordinate axes."""
    vars4 = ("x", "y", "z", "w")
    f = MultiPoly.from_text("x^3 - y*z*w", vars4)
    m = ModelSpec(AmbientSpace(vars4, (1, 1, 1, 1)), [f], 13)
    st = singularity_type(m, 2)
    assert st.label() == "3A2"
    entry = brauer_table(3, st)
    assert str(entry.br_nr) == "(Z/3)^2"


def test_local_equation_marks_singularity():
    m = dp1_model()
    from brfibre.model import find_singular_points
    pt = find_singular_points(m, 1).orbits[0][0]
    local = local_equation_at(m, pt)
    assert not local.homogeneous_part(0).terms
    assert not local.homogeneous_part(1).terms


# ---------------------------------------------------------------------------
# tables
# ---------------------------------------------------------------------------

def test_group_descriptor():
    g = GroupDescriptor.parse("2,2")
    assert str(g) == "(Z/2)^2"
    assert g.order == 4
    assert str(GroupDescriptor.parse("-")) == "0"
    assert GroupDescriptor.parse("5").order == 5
    with pytest.raises(DomainError):
        GroupDescriptor.of((2, 3))


def test_brauer_table_paper_rows():
    e = brauer_table(4, "2A1+A3")
    assert str(e.br_nr) == "(Z/2)^2"
    assert str(brauer_table(4, "4A1").br_nr) == "(Z/2)^2"
    assert str(brauer_table(3, "3A2").br_nr) == "(Z/3)^2"
    assert str(brauer_table(3, "A1+A5").br_nr) == "(Z/2)^2"
    e1 = brauer_table(1, "2A4")
    assert (str(e1.br_bar), str(e1.h1), str(e1.br_nr)) == ("Z/5", "Z/5", "(Z/5)^2")
    # wildcard defaults
    assert brauer_table(4, "A1").br_nr.is_trivial()
    assert brauer_table(3, "2A2").br_nr.is_trivial()
    with pytest.raises(TableMiss):
        brauer_table(1, "A1")
    with pytest.raises(TableMiss):
        brauer_table(2, "A1")


def test_table_exactness_all_rows():
    from brfibre.sing import _load_table
    for (deg, label), entry in _load_table().items():
        if entry.br_nr is not None:
            assert entry.br_bar.order * entry.h1.order == entry.br_nr.order, \
                (deg, label)


def test_singularity_type_label_formats():
    a1 = AdeType("A", 1)
    a3 = AdeType("A", 3)
    st = SingularityType.of([(a1, 1), (a3, 1), (a1, 1)])
    assert st.label() == "2A1+A3"
    st2 = SingularityType.of([(a1, 1)] * 4)
    assert st2.label() == "4A1"


def test_del_pezzo_degree_detection():
    assert del_pezzo_degree(dp1_model()) == 1
    vars4 = ("x", "y", "z", "w")
    cubic = ModelSpec(AmbientSpace(vars4, (1, 1, 1, 1)),
                      [MultiPoly.from_text("x^3 + y^3 + z^3 + w^3", vars4)], 13)
    assert del_pezzo_degree(cubic) == 3
    quartic = ModelSpec(AmbientSpace(vars4, (1, 1, 1, 1)),
                        [MultiPoly.from_text("x^4 + y^4 + z^4 + w^4", vars4)], 13)
    assert del_pezzo_degree(quartic) is None
