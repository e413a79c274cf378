"""Acceptance run: one PASS/FAIL line per criterion, all values exact.

Run with ``pytest tests/test_acceptance.py -v`` (lines appear in the terminal
summary) or directly with ``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import json
import sys
import time
from collections import defaultdict
from pathlib import Path

from hypothesis import given, settings
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).resolve().parent))

from acceptance_log import record  # noqa: E402
from glueback.coloring import (  # noqa: E402
    GlueSpec,
    complete_to_max,
    glue_back_coloring,
    make_coloring,
    moment_angle_coloring,
    rank_info,
    validate_characteristic,
)
from glueback.complex import (  # noqa: E402
    betti,
    build_complex,
    commutes_with_boundary,
    components,
    restrict_to_component,
    translate_action,
)
from glueback.corpus import KLEIN_SQUARE_MU, RP2_TRIANGLE_MU, TORUS_SQUARE_MU, builtin_corpus, cube_mu, polygon_mu  # noqa: E402
from glueback.gf2 import BitVector, coset_rep, span_bits  # noqa: E402
from glueback.polytope import cube, dodecahedron, polygon  # noqa: E402
from glueback.verify import (  # noqa: E402
    SuiteConfig,
    check_cao_lu,
    check_component_formula,
    check_dj_betti,
    check_double_cover_bound,
    check_h_mu_free,
    check_halperin_carlsson,
    check_hrk_monotonicity,
    check_partial_quotient,
    enumerate_colorings,
    run_suite,
    suite_document,
)
from oracles import brute_betti, closure, glue_labels, h_vector_from_f  # noqa: E402

SQUARE = polygon(4)
TRIANGLE = polygon(3)

# (name, polytope, mu, v0, m values) for the exhaustive glue-back cases
EXHAUSTIVE = [
    ("square/torus", SQUARE, TORUS_SQUARE_MU, (3, 4), (1, 2, 3)),
    ("triangle/RP2", TRIANGLE, RP2_TRIANGLE_MU, (2, 3), (1, 2, 3, 4)),
    ("square/Klein", SQUARE, KLEIN_SQUARE_MU, (3, 4), (1, 2, 3)),
]


def exhaustive_specs():
    for name, p, mu_labels, v0, ms in EXHAUSTIVE:
        mu = validate_characteristic(p, mu_labels)
        for m in ms:
            for spec in enumerate_colorings(p, mu, v0, m, limit=2 ** (m * p.k), seed=0):
                yield name, spec


def maximal_chain_specs():
    """Every m = k coloring among the exhaustive cases."""
    for name, spec in exhaustive_specs():
        if spec.m == spec.k:
            yield name, spec


def _lam(spec):
    return [str(v) for v in spec.lam]


# 1


def test_small_cover_betti_equals_h_vector():
    cases = [
        ("triangle/RP2", TRIANGLE, RP2_TRIANGLE_MU),
        ("square/torus", SQUARE, TORUS_SQUARE_MU),
        ("square/Klein", SQUARE, KLEIN_SQUARE_MU),
        ("cube3/pairing", cube(3), cube_mu(3)),
    ] + [(f"polygon{m}", polygon(m), polygon_mu(m)) for m in range(3, 9)]
    t0 = time.perf_counter()
    reports = [(name, p, check_dj_betti(p, validate_characteristic(p, mu))) for name, p, mu in cases]
    elapsed = time.perf_counter() - t0
    bad = [name for name, p, r in reports if r.status != "pass" or tuple(r.computed["betti"]) != h_vector_from_f(p.n, p.vertices)]
    polygons_ok = all(r.computed["betti"] == [1, p.d - 2, 1] for name, p, r in reports if name.startswith("polygon"))
    ok = not bad and polygons_ok and elapsed < 1.0
    record(1, ok, f"betti = h-vector on {len(cases)} small covers, polygon(m) -> (1,m-2,1); {elapsed:.2f}s (< 1s)")
    assert ok, bad


# 2


def test_moment_angle_lower_bound():
    t0 = time.perf_counter()
    tri, sq, pent, hexa = (check_cao_lu(polygon(m)) for m in (3, 4, 5, 6))
    elapsed = time.perf_counter() - t0
    ok = (
        tri.computed["hrk"] == 2
        and sq.computed["hrk"] == 4
        and pent.computed["hrk"] == 12
        and pent.computed["euler"] == -8
        and hexa.computed["hrk"] >= 16
        and all(r.status == "pass" for r in (tri, sq, pent, hexa))
        and elapsed < 5.0
    )
    record(
        2,
        ok,
        f"hrk(Z_P): triangle {tri.computed['hrk']}, square {sq.computed['hrk']}, pentagon {pent.computed['hrk']} "
        f"(chi {pent.computed['euler']}), hexagon {hexa.computed['hrk']} >= 16; {elapsed:.2f}s (< 5s)",
    )
    assert ok


# 3


def test_free_torus_actions_hrk_bound_exhaustive():
    t0 = time.perf_counter()
    reports = [(name, spec, check_halperin_carlsson(spec)) for name, spec in exhaustive_specs()]
    elapsed = time.perf_counter() - t0
    counts = defaultdict(int)
    for name, _, _ in reports:
        counts[name] += 1
    failed = [(name, _lam(s)) for name, s, r in reports if r.status != "pass"]
    # independent recount of every case from explicit cosets
    mismatched = []
    for name, spec, r in reports:
        p = spec.polytope
        labels = glue_labels([str(v) for v in spec.mu.labels], spec.v0, _lam(spec), p.d)
        cells, b = brute_betti(p.n, p.vertices, labels, p.n + spec.m)
        if list(cells) != r.computed["cells_per_dim"] or list(b) != r.computed["betti"]:
            mismatched.append((name, _lam(spec)))
    ok = not failed and not mismatched and elapsed < 30.0 and dict(counts) == {
        "square/torus": 4 + 16 + 64,
        "triangle/RP2": 2 + 4 + 8 + 16,
        "square/Klein": 4 + 16 + 64,
    }
    record(
        3,
        ok,
        f"hrk >= 2^m on {len(reports)} colorings {dict(counts)}; brute-force recount agrees; {elapsed:.2f}s (< 30s)",
    )
    assert ok, (failed, mismatched)


# 4


def test_component_count_exhaustive():
    reports = [(name, spec, check_component_formula(spec)) for name, spec in exhaustive_specs()]
    failed = [(name, _lam(s)) for name, s, r in reports if r.status != "pass"]
    oracle_bad = [
        (name, _lam(s))
        for name, s, r in reports
        if r.computed["components"] != 2 ** (s.m - (len(closure([v.bits for v in s.lam], s.m)).bit_length() - 1))
    ]
    ok = not failed and not oracle_bad
    record(4, ok, f"components = 2^(m - rank) with identical components on {len(reports)} colorings")
    assert ok, (failed, oracle_bad)


# 5


def test_square_torus_two_colorings():
    mu = validate_characteristic(SQUARE, TORUS_SQUARE_MU)
    one = build_complex(SQUARE, glue_back_coloring(GlueSpec(SQUARE, mu, (3, 4), (BitVector.from_string("10"), BitVector.from_string("01")))))
    two = build_complex(SQUARE, glue_back_coloring(GlueSpec(SQUARE, mu, (3, 4), (BitVector.from_string("10"), BitVector.from_string("10")))))
    b1 = betti(one)
    lab = components(two)
    parts = [betti(restrict_to_component(two, i, lab)).betti for i in range(lab.count)]
    ok = b1.components == 1 and b1.hrk == 4 and lab.count == 2 and parts == [(1, 2, 1), (1, 2, 1)]
    record(5, ok, f"lambda=(e1,e2): connected, hrk {b1.hrk}; lambda=(e1,e1): {lab.count} components with betti {parts}")
    assert ok


# 6


def _is_closed_surface(cx):
    """Every edge bounds exactly two 2-cells and every vertex link is one circle."""
    edge_use = defaultdict(int)
    for faces in cx.incidence[2]:
        for e in faces:
            edge_use[e] += 1
    if any(edge_use[e] != 2 for e in range(len(cx.cells[1]))):
        return False
    link = defaultdict(lambda: defaultdict(set))  # vertex -> edge -> edges sharing a corner
    for faces in cx.incidence[2]:
        for e1 in faces:
            for e2 in faces:
                if e1 < e2:
                    for v in set(cx.incidence[1][e1]) & set(cx.incidence[1][e2]):
                        link[v][e1].add(e2)
                        link[v][e2].add(e1)
    for v in range(len(cx.cells[0])):
        graph = link[v]
        if not graph or any(len(nbrs) != 2 for nbrs in graph.values()):
            return False
        start = next(iter(graph))
        seen, stack = {start}, [start]
        while stack:
            for nb in graph[stack.pop()]:
                if nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
        if len(seen) != len(graph):
            return False
    return True


def test_klein_bottle_single_bit_colorings():
    mu = validate_characteristic(SQUARE, KLEIN_SQUARE_MU)
    rows = []
    for lam in (("1", "0"), ("0", "1"), ("1", "1")):
        cx = build_complex(SQUARE, glue_back_coloring(GlueSpec(SQUARE, mu, (3, 4), tuple(BitVector.from_string(s) for s in lam))))
        b = betti(cx)
        rows.append((lam, b.components, b.euler, b.hrk, _is_closed_surface(cx)))
    ok = all(c == 1 and chi == 0 and h == 4 and surf for _, c, chi, h, surf in rows)
    record(6, ok, "Klein small cover, m=1: " + "; ".join(f"lambda={''.join(l)} connected={c == 1} chi={chi} hrk={h} surface={s}" for l, c, chi, h, s in rows))
    assert ok


# 7


def test_hrk_non_increasing_along_completion():
    reports = [(name, spec, check_hrk_monotonicity(spec)) for name, spec in maximal_chain_specs()]
    failed = [(name, _lam(s), r.computed.get("hrk_chain")) for name, s, r in reports if r.status != "pass"]
    ends = {r.computed["hrk_chain"][-1] for _, _, r in reports}
    ok = not failed and len(reports) == 16 + 2 + 16
    record(7, ok, f"hrk non-increasing on {len(reports)} completion chains (m = k); final hrk values {sorted(ends)}")
    assert ok, failed


# 8


def test_double_cover_betti_bound():
    checked = 0
    failed = []
    for name, spec in maximal_chain_specs():
        for j in range(1, len(complete_to_max(spec))):
            r = check_double_cover_bound(spec, j)
            checked += 1
            if r.status != "pass":
                failed.append((name, _lam(spec), j, r.computed))
    ok = not failed and checked > 0
    record(8, ok, f"betti_i(cover) <= 2 betti_i(base), free deck involution, quotient matches base on {checked} chain links")
    assert ok, failed


# 9


def test_glue_back_is_partial_quotient():
    t0 = time.perf_counter()
    connected = [(name, s) for name, s in exhaustive_specs() if rank_info(s).rank == s.m]
    reports = [(name, s, check_partial_quotient(s)) for name, s in connected]
    failed = [(name, _lam(s)) for name, s, r in reports if r.status != "pass"]
    hmu = []
    for e in builtin_corpus():
        hmu.append((e.name, check_h_mu_free(e.polytope, e.mu(), e.base_vertex)))
    hmu_failed = [name for name, r in hmu if r.status != "pass"]
    elapsed = time.perf_counter() - t0
    ok = not failed and not hmu_failed and elapsed < 60.0 and len(reports) > 0
    record(
        9,
        ok,
        f"glue-back == Z_P/sigma(N*) on {len(reports)} connected colorings; H_mu free on {len(hmu)} corpus entries; {elapsed:.2f}s (< 60s)",
    )
    assert ok, (failed, hmu_failed)


# 10


def test_dodecahedron_moment_angle_complex():
    p = dodecahedron()
    t0 = time.perf_counter()
    cx = build_complex(p, moment_angle_coloring(p))
    b = betti(cx)
    elapsed = time.perf_counter() - t0
    ok = (
        cx.cell_counts == (10240, 30720, 24576, 4096)
        and sum(cx.cell_counts) == 69632
        and b.euler == 0
        and b.betti[0] == b.betti[3] == 1
        and b.hrk >= 2**9
        and elapsed < 60.0
    )
    record(10, ok, f"dodecahedron Z_P: cells {cx.cell_counts} (total {sum(cx.cell_counts)}), betti {b.betti}, hrk {b.hrk} >= 512, chi {b.euler}; {elapsed:.2f}s (< 60s)")
    assert ok


# 11


CORPUS_SMALL = [e for e in builtin_corpus() if e.polytope.d <= 7]


def test_randomized_properties():
    failures = []

    @settings(max_examples=60, derandomize=True, deadline=None, database=None)
    @given(st.sampled_from(CORPUS_SMALL), st.integers(0, 3), st.data())
    def boundary_and_duality(entry, m, data):
        p = entry.polytope
        lam = tuple(BitVector(m, data.draw(st.integers(0, 2**m - 1))) for _ in range(p.k))
        cx = build_complex(p, glue_back_coloring(GlueSpec(p, entry.mu(), entry.base_vertex, lam, m)))
        assert cx.check_boundary_squared()
        for q in range(2, cx.dim + 1):
            assert (cx.boundary(q - 1) @ cx.boundary(q)).is_zero()
        lab = components(cx)
        b = betti(restrict_to_component(cx, 0, lab)).betti
        assert b == b[::-1]

    @settings(max_examples=300, derandomize=True, database=None)
    @given(st.lists(st.integers(0, 255), max_size=5), st.integers(0, 255), st.integers(0, 255))
    def coset_rep_well_defined(gens, v, w):
        s = span_bits(gens, 8)
        same = coset_rep(BitVector(8, v), s) == coset_rep(BitVector(8, w), s)
        assert same == ((v ^ w) in closure(gens, 8))

    @settings(max_examples=60, derandomize=True, deadline=None, database=None)
    @given(st.sampled_from([polygon(4), polygon(5), cube(3)]), st.integers(1, 3), st.data())
    def translation_commutes(p, r, data):
        labels = [str(BitVector(r, data.draw(st.integers(1, 2**r - 1)))) for _ in range(p.d)]
        import warnings

        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            cx = build_complex(p, make_coloring(p, labels))
        g = BitVector(r, data.draw(st.integers(0, 2**r - 1)))
        assert commutes_with_boundary(cx, translate_action(cx, g))

    for prop in (boundary_and_duality, coset_rep_well_defined, translation_commutes):
        try:
            prop()
        except AssertionError as exc:  # pragma: no cover - reported below
            failures.append(f"{prop.__name__}: {exc}")

    cfg = {t: SuiteConfig(checks=("hc", "components", "pq", "monotone", "doublecover"), m=2, limit=16, chain_limit=4, threads=t) for t in (1, 4, 8)}
    corpus = [e for e in builtin_corpus() if e.name in ("polygon4_klein", "polygon5", "cube3")]
    docs = {t: json.dumps(suite_document(run_suite(corpus, c), c), indent=2) for t, c in cfg.items()}
    if not docs[1] == docs[4] == docs[8]:
        failures.append("reports differ across thread counts")

    ok = not failures
    record(11, ok, "boundary^2 = 0, duality, coset_rep, translation commutes, reports identical for threads 1/4/8" + (f" ({failures})" if failures else ""))
    assert ok, failures


if __name__ == "__main__":
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_")]
    order = [
        test_small_cover_betti_equals_h_vector,
        test_moment_angle_lower_bound,
        test_free_torus_actions_hrk_bound_exhaustive,
        test_component_count_exhaustive,
        test_square_torus_two_colorings,
        test_klein_bottle_single_bit_colorings,
        test_hrk_non_increasing_along_completion,
        test_double_cover_betti_bound,
        test_glue_back_is_partial_quotient,
        test_dodecahedron_moment_angle_complex,
        test_randomized_properties,
    ]
    assert set(order) == set(tests)
    failed = 0
    for t in order:
        try:
            t()
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
