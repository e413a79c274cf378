from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from glueback.coloring import (
    ColoringError,
    DisconnectedBundle,
    GlueSpec,
    NotFree,
    SingularAtVertex,
    complete_to_max,
    cut_facets,
    default_v0,
    glue_back_coloring,
    h_mu_subgroup,
    make_coloring,
    moment_angle_coloring,
    n_star,
    n_star_subgroup,
    parse_characteristic,
    parse_glue_spec,
    partial_quotient_coloring,
    rank_info,
    sigma_image,
    validate_characteristic,
)
from glueback.corpus import KLEIN_SQUARE_MU, RP2_TRIANGLE_MU, TORUS_SQUARE_MU, builtin_corpus
from glueback.gf2 import BitVector, Subspace, WidthMismatchError, span
from glueback.polytope import polygon
from oracles import closure, closure_rank, glue_labels

SQUARE = polygon(4)
TRIANGLE = polygon(3)


def bvs(*strs):
    return tuple(BitVector.from_string(s) for s in strs)


def torus_spec(*lam, m=-1, v0=(3, 4)):
    mu = validate_characteristic(SQUARE, TORUS_SQUARE_MU)
    return GlueSpec(SQUARE, mu, v0, bvs(*lam), m)


def strs(vectors):
    return [str(v) for v in vectors]


def test_validate_characteristic_examples():
    validate_characteristic(TRIANGLE, RP2_TRIANGLE_MU)
    validate_characteristic(SQUARE, TORUS_SQUARE_MU)
    with pytest.raises(SingularAtVertex) as info:
        validate_characteristic(SQUARE, ["10", "10", "01", "01"])
    assert info.value.sigma == (1, 2)


def test_validate_characteristic_shape_errors():
    with pytest.raises(ColoringError):
        validate_characteristic(SQUARE, ["10", "01", "10"])
    with pytest.raises(ColoringError):
        validate_characteristic(SQUARE, ["100", "010", "100", "010"])


def test_moment_angle_examples():
    assert strs(moment_angle_coloring(TRIANGLE).labels) == ["100", "010", "001"]
    c = moment_angle_coloring(SQUARE)
    assert strs(c.labels) == ["1000", "0100", "0010", "0001"]
    for e in builtin_corpus():
        c = moment_angle_coloring(e.polytope)
        assert span(c.labels).rank == e.polytope.d


def test_glue_back_labels_square_torus():
    c = glue_back_coloring(torus_spec("10", "01"))
    assert strs(c.labels) == ["1010", "0101", "1000", "0100"]
    assert c.r == 4


def test_glue_back_m0_is_mu():
    spec = GlueSpec(SQUARE, validate_characteristic(SQUARE, TORUS_SQUARE_MU), (3, 4), bvs("", ""), 0)
    assert strs(glue_back_coloring(spec).labels) == list(TORUS_SQUARE_MU)


def test_cut_facets_and_default_v0():
    assert cut_facets(SQUARE, (3, 4)) == (1, 2)
    assert default_v0(SQUARE) == (3, 4)
    assert default_v0(TRIANGLE) == (2, 3)


@given(st.integers(0, 3), st.data())
def test_glue_back_labels_match_hand_rule(m, data):
    lam = [data.draw(st.text("01", min_size=m, max_size=m)) for _ in range(2)]
    for mu_labels in (TORUS_SQUARE_MU, KLEIN_SQUARE_MU):
        for v0 in SQUARE.vertices:
            mu = validate_characteristic(SQUARE, mu_labels)
            spec = GlueSpec(SQUARE, mu, v0, bvs(*lam), m)
            assert strs(glue_back_coloring(spec).labels) == glue_labels(list(mu_labels), v0, lam, 4)


def test_glue_spec_errors():
    mu = validate_characteristic(SQUARE, TORUS_SQUARE_MU)
    with pytest.raises(ColoringError):
        GlueSpec(SQUARE, mu, (1, 3), bvs("1", "0"))
    with pytest.raises(ColoringError):
        GlueSpec(SQUARE, mu, (3, 4), bvs("1"))
    with pytest.raises(WidthMismatchError):
        GlueSpec(SQUARE, mu, (3, 4), bvs("1", "01"))
    with pytest.raises(WidthMismatchError):
        GlueSpec(SQUARE, mu, (3, 4), bvs("1", "0"), m=2)


def test_rank_info_examples():
    info = rank_info(torus_spec("10", "01"))
    assert (info.rank, info.maximally_independent) == (2, True)
    info = rank_info(torus_spec("10", "10"))
    assert (info.rank, info.maximally_independent) == (1, False)
    assert rank_info(torus_spec("00", "00")).rank == 0


@given(st.integers(1, 4), st.data())
def test_rank_info_matches_closure(m, data):
    lam = [data.draw(st.integers(0, 2**m - 1)) for _ in range(2)]
    spec = torus_spec(*(str(BitVector(m, x)) for x in lam))
    assert rank_info(spec).rank == closure_rank(lam, m)


def test_complete_to_max_examples():
    assert len(complete_to_max(torus_spec("10", "01"))) == 1
    chain = complete_to_max(torus_spec("10", "10"))
    assert [strs(s.lam) for s in chain] == [["10", "10"], ["10", "01"]]
    chain = complete_to_max(torus_spec("00", "00"))
    assert [strs(s.lam) for s in chain] == [["00", "00"], ["10", "00"], ["10", "01"]]
    with pytest.raises(ColoringError):
        complete_to_max(torus_spec("1", "0"))


@given(st.lists(st.integers(0, 3), min_size=2, max_size=2))
def test_complete_to_max_rank_steps(lam):
    spec = torus_spec(*(str(BitVector(2, x)) for x in lam))
    chain = complete_to_max(spec)
    r0 = rank_info(spec).rank
    assert [rank_info(s).rank for s in chain] == list(range(r0, 3))
    assert rank_info(chain[-1]).maximally_independent


def test_h_mu_examples():
    mu = validate_characteristic(SQUARE, TORUS_SQUARE_MU)
    h = h_mu_subgroup(SQUARE, mu, (3, 4))
    assert h == span(bvs("1010", "0101"))
    tri = validate_characteristic(TRIANGLE, RP2_TRIANGLE_MU)
    assert h_mu_subgroup(TRIANGLE, tri, (2, 3)).rank == 1


@pytest.mark.parametrize("entry", builtin_corpus(), ids=lambda e: e.name)
def test_h_mu_rank_and_freeness_on_corpus(entry):
    p, mu = entry.polytope, entry.mu()
    for v0 in p.vertices[:4] + (entry.base_vertex,):
        h = h_mu_subgroup(p, mu, v0)
        assert h.rank == p.k
        q = partial_quotient_coloring(moment_angle_coloring(p), h)
        assert q.r == p.n


def test_n_star_examples():
    assert n_star_subgroup(torus_spec("10", "01")).rank == 0
    ns = n_star(torus_spec("1", "1"))
    assert strs(ns.omegas) == ["01"]
    assert ns.subgroup == span(bvs("11"))
    with pytest.raises(DisconnectedBundle):
        n_star(torus_spec("10", "10"))


@pytest.mark.parametrize("entry", [e for e in builtin_corpus() if e.polytope.k <= 4], ids=lambda e: e.name)
def test_n_star_rank_on_corpus(entry):
    p, mu = entry.polytope, entry.mu()
    k = p.k
    for m in range(0, k + 1):
        # greedy unit colors: e_1..e_m then repeats, connected by construction
        lam = [BitVector.unit(i % m, m) if m else BitVector.zero(0) for i in range(k)]
        spec = GlueSpec(p, mu, entry.base_vertex, tuple(lam), m)
        assert n_star_subgroup(spec).rank == k - m


def test_sigma_image_examples():
    mu = validate_characteristic(SQUARE, TORUS_SQUARE_MU)
    assert sigma_image(SQUARE, mu, (3, 4), Subspace.zero(2)).rank == 0
    assert sigma_image(SQUARE, mu, (3, 4), span(bvs("10"))) == span(bvs("1010"))
    for gens in (["11"], ["01"], ["10", "01"]):
        n = span(bvs(*gens))
        assert sigma_image(SQUARE, mu, (3, 4), n).rank == n.rank


def test_partial_quotient_examples():
    z = moment_angle_coloring(SQUARE)
    assert partial_quotient_coloring(z, Subspace.zero(4)).labels == z.labels
    mu = validate_characteristic(SQUARE, TORUS_SQUARE_MU)
    q = partial_quotient_coloring(z, h_mu_subgroup(SQUARE, mu, (3, 4)))
    assert strs(q.labels) == ["10", "01", "10", "01"]
    with pytest.raises(NotFree) as info:
        partial_quotient_coloring(z, span(bvs("1100")))
    assert info.value.sigma == (1, 2)


@given(st.lists(st.integers(0, 15), max_size=3))
def test_partial_quotient_freeness_matches_brute_force(gens):
    z = moment_angle_coloring(SQUARE)
    h = closure(gens, 4)
    free = all(
        not (h & closure([1 << (i - 1) for i in v], 4)) - {0} for v in SQUARE.vertices
    )
    try:
        q = partial_quotient_coloring(z, span([BitVector(4, g) for g in gens], 4))
    except NotFree:
        assert not free
    else:
        assert free and q.r == 4 - closure_rank(gens, 4)


def test_validate_iff_m0_glue_back_independent():
    for labels in (["10", "01", "10", "01"], ["10", "10", "01", "01"], ["11", "01", "10", "01"], ["00", "01", "10", "01"]):
        c = make_coloring(SQUARE, labels)
        independent = not c.singular_vertices()
        try:
            validate_characteristic(SQUARE, labels)
            ok = True
        except SingularAtVertex:
            ok = False
        assert ok == independent


def test_json_parsers():
    mu = parse_characteristic(SQUARE, '{"r": 2, "labels": ["10", "01", "10", "01"]}')
    assert strs(mu.labels) == list(TORUS_SQUARE_MU)
    spec = parse_glue_spec(SQUARE, {"mu": {"labels": list(TORUS_SQUARE_MU)}, "v0": [3, 4], "lambda": ["10", "01"]})
    assert spec.m == 2 and spec.v0 == (3, 4)
    spec = parse_glue_spec(SQUARE, ["1", "1"], mu=mu)
    assert spec.v0 == default_v0(SQUARE)
    with pytest.raises(ColoringError):
        parse_glue_spec(SQUARE, {"lambda": ["1", "1"]})
    with pytest.raises(ColoringError):
        parse_characteristic(SQUARE, {"r": 2})
