"""Executable checks over small covers and their glue-back constructions.

Every check builds the relevant complexes, computes ranks of their boundary
matrices and stores the numbers in ``computed``.  Whether a check passed is a
pure function of ``computed`` and ``expected`` (see :func:`decide`), so a
report can be re-evaluated without rebuilding anything.
"""

from __future__ import annotations

import hashlib
import json
import os
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Callable, Iterator, Sequence

from .coloring import (
    CharacteristicFunction,
    ColoringError,
    GlueSpec,
    block_map,
    chain_translation,
    complete_to_max,
    glue_back_coloring,
    h_mu_subgroup,
    moment_angle_coloring,
    n_star,
    panel_coordinates,
    partial_quotient_coloring,
    rank_info,
    sigma_image,
    validate_characteristic,
)
from .complex import (
    QuotientCellComplex,
    betti,
    build_complex,
    complexes_identical,
    components,
    facial_subcomplex,
    fixed_cells,
    restrict_to_component,
    translate_action,
)
from .corpus import CorpusEntry
from .gf2 import BitVector, solve_label_isomorphism, span_bits
from .polytope import PolytopeError, SimplePolytope, fh_vector

SCHEMA = 1

CHECKS = ("hc", "components", "dj", "caolu", "maxequiv", "monotone", "doublecover", "pq", "facial", "hmu")
ENTRY_CHECKS = ("dj", "caolu", "hmu")
COLORING_CHECKS = ("hc", "components", "pq", "facial", "maxequiv")
CHAIN_CHECKS = ("monotone", "doublecover")


@dataclass
class VerificationReport:
    check: str
    inputs: dict[str, Any]
    computed: dict[str, Any]
    expected: dict[str, Any]
    status: str  # "pass", "fail", "n/a" or "error"
    message: str = ""
    runtime: float = 0.0

    @property
    def passed(self) -> bool | None:
        return {"pass": True, "fail": False}.get(self.status)

    @property
    def digest(self) -> str:
        blob = json.dumps(self.inputs, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def to_json(self, timings: bool = False) -> dict[str, Any]:
        out = {
            "check": self.check,
            "inputs": self.inputs,
            "digest": self.digest,
            "computed": self.computed,
            "expected": self.expected,
            "pass": self.passed,
            "status": self.status,
            "message": self.message,
        }
        if timings:
            out["runtime"] = round(self.runtime, 6)
        return out


def _pairs_ok(xs: Sequence[int], ys: Sequence[int], rel: Callable[[int, int], bool]) -> bool:
    return len(xs) == len(ys) and all(rel(x, y) for x, y in zip(xs, ys))


def _all_same(items: Sequence[Any]) -> bool:
    return all(x == items[0] for x in items)


DECIDERS: dict[str, Callable[[dict, dict], bool]] = {
    "hc": lambda c, e: c["hrk"] >= e["hrk_min"],
    "components": lambda c, e: (
        c["components"] == e["components"]
        and _all_same(c["component_cells"])
        and _all_same(c["component_betti"])
    ),
    "dj": lambda c, e: c["betti"] == c["h_vector"],
    "caolu": lambda c, e: c["hrk"] >= e["hrk_min"],
    "maxequiv": lambda c, e: c["phi"] is not None and c["identical"],
    "monotone": lambda c, e: all(a >= b for a, b in zip(c["hrk_chain"], c["hrk_chain"][1:])),
    "doublecover": lambda c, e: (
        _pairs_ok(c["betti_cover"], c["betti_base"], lambda x, y: x <= 2 * y)
        and c["components_before"] == 2 * c["components_after"]
        and c["deck_fixed_cells"] == 0
        and c["quotient_component_betti"] == c["betti_base"]
    ),
    "pq": lambda c, e: (
        c["h_in_h_mu"]
        and c["cells_glue_back"] == c["cells_partial_quotient"]
        and c["betti_glue_back"] == c["betti_partial_quotient"]
        and c["phi"] is not None
        and c["identical"]
    ),
    "facial": lambda c, e: all(h >= e["hrk_min"] for h in c["facial_hrk"]),
    "hmu": lambda c, e: c["free"] and c["quotient_isomorphic_to_mu"] and c["identical"],
}


def decide(check: str, computed: dict[str, Any], expected: dict[str, Any]) -> bool | None:
    """Pass/fail from the stored numbers alone; ``None`` when the check did not apply."""
    if not computed.get("applicable", True):
        return None
    return DECIDERS[check](computed, expected)


def _report(check: str, inputs: dict, computed: dict, expected: dict, t0: float, message: str = "") -> VerificationReport:
    verdict = decide(check, computed, expected)
    status = {True: "pass", False: "fail", None: "n/a"}[verdict]
    return VerificationReport(check, inputs, computed, expected, status, message, time.perf_counter() - t0)


def _not_applicable(check: str, inputs: dict, reason: str, t0: float) -> VerificationReport:
    return _report(check, inputs, {"applicable": False, "reason": reason}, {}, t0, reason)


def _strs(vectors: Sequence[BitVector]) -> list[str]:
    return [str(v) for v in vectors]


def spec_inputs(spec: GlueSpec) -> dict[str, Any]:
    return {
        "polytope": spec.polytope.name,
        "mu": _strs(spec.mu.labels),
        "v0": list(spec.v0),
        "m": spec.m,
        "lambda": _strs(spec.lam),
    }


@lru_cache(maxsize=8)
def _glue_back_cached(p: SimplePolytope, mu_labels, v0, lam, m: int) -> QuotientCellComplex:
    spec = GlueSpec(p, validate_characteristic(p, mu_labels), v0, lam, m)
    return build_complex(p, glue_back_coloring(spec))


def _glue_back(spec: GlueSpec) -> QuotientCellComplex:
    # chain checks revisit the same colorings, so complexes are memoised per process
    return _glue_back_cached(spec.polytope, spec.mu.labels, spec.v0, spec.lam, spec.m)


def check_halperin_carlsson(spec: GlueSpec) -> VerificationReport:
    t0 = time.perf_counter()
    info = rank_info(spec)
    b = betti(_glue_back(spec))
    computed = {
        "m": spec.m,
        "k": spec.k,
        "rank_lambda": info.rank,
        "components": b.components,
        "cells_per_dim": list(b.cells_per_dim),
        "betti": list(b.betti),
        "hrk": b.hrk,
    }
    return _report("hc", spec_inputs(spec), computed, {"hrk_min": 2**spec.m}, t0)


def check_component_formula(spec: GlueSpec) -> VerificationReport:
    t0 = time.perf_counter()
    info = rank_info(spec)
    cx = _glue_back(spec)
    labeling = components(cx)
    parts = [restrict_to_component(cx, i, labeling) for i in range(labeling.count)]
    part_betti = [betti(p) for p in parts]
    computed = {
        "m": spec.m,
        "k": spec.k,
        "rank_lambda": info.rank,
        "components": labeling.count,
        "betti": list(betti(cx).betti),
        "component_cells": [list(p.cell_counts) for p in parts],
        "component_betti": [list(b.betti) for b in part_betti],
    }
    expected = {"components": 2 ** (spec.m - info.rank)}
    return _report("components", spec_inputs(spec), computed, expected, t0)


def check_dj_betti(p: SimplePolytope, mu: CharacteristicFunction) -> VerificationReport:
    t0 = time.perf_counter()
    b = betti(build_complex(p, mu))
    fh = fh_vector(p)
    computed = {
        "cells_per_dim": list(b.cells_per_dim),
        "betti": list(b.betti),
        "hrk": b.hrk,
        "f_vector": list(fh.f),
        "h_vector": list(fh.h),
    }
    inputs = {"polytope": p.name, "mu": _strs(mu.labels)}
    return _report("dj", inputs, computed, {"betti": "h_vector"}, t0)


def check_cao_lu(p: SimplePolytope) -> VerificationReport:
    t0 = time.perf_counter()
    b = betti(build_complex(p, moment_angle_coloring(p)))
    computed = {
        "n": p.n,
        "d": p.d,
        "cells_per_dim": list(b.cells_per_dim),
        "betti": list(b.betti),
        "euler": b.euler,
        "hrk": b.hrk,
    }
    return _report("caolu", {"polytope": p.name}, computed, {"hrk_min": 2 ** (p.d - p.n)}, t0)


def check_max_independent_equivalence(spec1: GlueSpec, spec2: GlueSpec) -> VerificationReport:
    t0 = time.perf_counter()
    inputs = {"first": spec_inputs(spec1), "second": spec_inputs(spec2)}
    if (spec1.polytope, spec1.v0, spec1.mu.labels) != (spec2.polytope, spec2.v0, spec2.mu.labels):
        return _not_applicable("maxequiv", inputs, "specs differ in polytope, mu or v0", t0)
    if spec1.m != spec2.m:
        return _not_applicable("maxequiv", inputs, "specs use different m", t0)
    if not (rank_info(spec1).maximally_independent and rank_info(spec2).maximally_independent):
        return _not_applicable("maxequiv", inputs, "both colorings must be maximally independent", t0)
    phi_lam = solve_label_isomorphism(spec1.lam, spec2.lam)
    computed: dict[str, Any] = {"m": spec1.m, "k": spec1.k, "phi": None, "identical": False}
    if phi_lam is not None:
        phi = block_map(spec1.polytope.n, phi_lam)
        computed["phi"] = phi_lam.to_strings()
        computed["identical"] = complexes_identical(_glue_back(spec1), _glue_back(spec2), phi)
    return _report("maxequiv", inputs, computed, {"equivalent": True}, t0)


def _hrk_chain(chain: Sequence[GlueSpec]) -> list[int]:
    return [betti(_glue_back(s)).hrk for s in chain]


def check_hrk_monotonicity(spec: GlueSpec) -> VerificationReport:
    t0 = time.perf_counter()
    inputs = spec_inputs(spec)
    if spec.m != spec.k:
        return _not_applicable("monotone", inputs, f"needs m == k (m={spec.m}, k={spec.k})", t0)
    chain = complete_to_max(spec)
    computed = {
        "m": spec.m,
        "k": spec.k,
        "chain": [_strs(s.lam) for s in chain],
        "rank_chain": [rank_info(s).rank for s in chain],
        "hrk_chain": _hrk_chain(chain),
    }
    return _report("monotone", inputs, computed, {"hrk_chain": "non-increasing"}, t0)


def check_double_cover_bound(spec: GlueSpec, j: int) -> VerificationReport:
    """Compare one component of M(lambda_j) with one of M(lambda_{j-1}).

    Besides the per-degree bound, the deck involution (translation by
    lambda(P_{s+j}) + omega_j) must act freely and its quotient must have the
    Betti numbers of the smaller component.
    """
    t0 = time.perf_counter()
    inputs = {**spec_inputs(spec), "j": j}
    if spec.m != spec.k:
        return _not_applicable("doublecover", inputs, f"needs m == k (m={spec.m}, k={spec.k})", t0)
    chain = complete_to_max(spec)
    if not 1 <= j < len(chain):
        return _not_applicable("doublecover", inputs, f"chain has {len(chain)} colorings, no link {j}", t0)
    before, after = chain[j - 1], chain[j]
    cx_before, cx_after = _glue_back(before), _glue_back(after)
    lab_before, lab_after = components(cx_before), components(cx_after)
    base = betti(restrict_to_component(cx_before, 0, lab_before))
    cover = betti(restrict_to_component(cx_after, 0, lab_after))

    n = spec.polytope.n
    g = chain_translation(chain, j)
    deck = BitVector(n + spec.m, g.bits << n)
    perms = translate_action(cx_after, deck)
    quotient_coloring = partial_quotient_coloring(cx_after.coloring, span_bits([deck.bits], deck.width))
    quotient = build_complex(spec.polytope, quotient_coloring)
    q_lab = components(quotient)
    q_betti = betti(restrict_to_component(quotient, 0, q_lab))
    computed = {
        "m": spec.m,
        "k": spec.k,
        "lambda_before": _strs(before.lam),
        "lambda_after": _strs(after.lam),
        "deck_translation": str(g),
        "deck_fixed_cells": fixed_cells(perms),
        "components_before": lab_before.count,
        "components_after": lab_after.count,
        "betti_base": list(base.betti),
        "betti_cover": list(cover.betti),
        "quotient_components": q_lab.count,
        "quotient_component_betti": list(q_betti.betti),
    }
    return _report("doublecover", inputs, computed, {"betti_cover": "<= 2 * betti_base"}, t0)


def check_partial_quotient(spec: GlueSpec) -> VerificationReport:
    t0 = time.perf_counter()
    inputs = spec_inputs(spec)
    p, mu = spec.polytope, spec.mu
    info = rank_info(spec)
    if info.rank < spec.m:
        reason = f"disconnected: reduce m (rank(lambda)={info.rank} < m={spec.m})"
        return _not_applicable("pq", inputs, reason, t0)
    ns = n_star(spec)
    H = sigma_image(p, mu, spec.v0, panel_coordinates(ns))
    h_mu = h_mu_subgroup(p, mu, spec.v0)
    cx1 = _glue_back(spec)
    quotient = partial_quotient_coloring(moment_angle_coloring(p), H)
    cx2 = build_complex(p, quotient)
    b1, b2 = betti(cx1), betti(cx2)
    phi = solve_label_isomorphism(cx1.coloring.labels, cx2.coloring.labels)
    computed = {
        "m": spec.m,
        "k": spec.k,
        "rank_lambda": info.rank,
        "n_star": [str(v) for v in ns.subgroup.basis_vectors()],
        "omegas": _strs(ns.omegas),
        "H": [str(v) for v in H.basis_vectors()],
        "h_in_h_mu": H.issubspace(h_mu),
        "cells_glue_back": list(b1.cells_per_dim),
        "cells_partial_quotient": list(b2.cells_per_dim),
        "betti_glue_back": list(b1.betti),
        "betti_partial_quotient": list(b2.betti),
        "phi": phi.to_strings() if phi is not None else None,
        "identical": phi is not None and complexes_identical(cx1, cx2, phi),
    }
    return _report("pq", inputs, computed, {"equivalent": True}, t0)


def check_facial_induction(spec: GlueSpec) -> VerificationReport:
    t0 = time.perf_counter()
    inputs = spec_inputs(spec)
    if not rank_info(spec).maximally_independent:
        return _not_applicable("facial", inputs, "lambda is not maximally independent", t0)
    cx = _glue_back(spec)
    cut = spec.cut_facets
    hrks = [betti(facial_subcomplex(cx, f)).hrk for f in cut]
    computed = {"m": spec.m, "k": spec.k, "cut_facets": list(cut), "facial_hrk": hrks}
    return _report("facial", inputs, computed, {"hrk_min": 2**spec.k}, t0)


def check_h_mu_free(p: SimplePolytope, mu: CharacteristicFunction, v0: Sequence[int]) -> VerificationReport:
    t0 = time.perf_counter()
    inputs = {"polytope": p.name, "mu": _strs(mu.labels), "v0": list(v0)}
    H = h_mu_subgroup(p, mu, v0)
    computed: dict[str, Any] = {
        "H_mu": [str(v) for v in H.basis_vectors()],
        "rank": H.rank,
        "free": False,
        "quotient_isomorphic_to_mu": False,
        "identical": False,
    }
    try:
        quotient = partial_quotient_coloring(moment_angle_coloring(p), H)
    except ColoringError as exc:
        computed["not_free_at"] = list(getattr(exc, "sigma", ()))
    else:
        computed["free"] = True
        phi = solve_label_isomorphism(quotient.labels, mu.labels)
        computed["quotient_isomorphic_to_mu"] = phi is not None
        if phi is not None:
            computed["identical"] = complexes_identical(build_complex(p, quotient), build_complex(p, mu), phi)
    return _report("hmu", inputs, computed, {"free": True}, t0)


# coloring streams


def coloring_count(k: int, m: int) -> int:
    return 1 << (m * k)


def enumerate_colorings(
    p: SimplePolytope, mu: CharacteristicFunction, v0: Sequence[int], m: int, limit: int, seed: int
) -> Iterator[GlueSpec]:
    """All (Z_2)^m colorings in lexicographic order, or a seeded sample of ``limit`` of them.

    Coloring ``t`` reads the km-bit binary expansion of ``t`` as the
    concatenated panel color strings.
    """
    k = p.k
    total = coloring_count(k, m)
    if total <= limit:
        indices: Sequence[int] = range(total)
    else:
        # rejection sampling; random.sample cannot index ranges beyond ssize_t
        rng = random.Random(seed)
        chosen: set[int] = set()
        while len(chosen) < limit:
            chosen.add(rng.randrange(total))
        indices = sorted(chosen)
    for t in indices:
        bits = format(t, f"0{m * k}b") if m * k else ""
        lam = tuple(BitVector.from_string(bits[i * m : (i + 1) * m]) for i in range(k))
        yield GlueSpec(p, mu, tuple(v0), lam, m)


def reference_maximal(spec: GlueSpec) -> GlueSpec | None:
    """lambda(P_i) = e_i, the maximally independent coloring other specs are compared with."""
    if spec.m < spec.k:
        return None
    return spec.with_lambda([BitVector.unit(i, spec.m) for i in range(spec.k)])


# suite


@dataclass(frozen=True)
class Task:
    check: str
    entry: CorpusEntry
    v0: tuple[int, ...]
    m: int = 0
    lam: tuple[str, ...] = ()
    j: int = 0


@dataclass
class SuiteConfig:
    checks: tuple[str, ...] = CHECKS
    m: int = 1
    source: str = "enumerate"  # "enumerate", "sample" or "explicit"
    limit: int = 64
    chain_limit: int = 8
    seed: int = 0
    lambdas: tuple[tuple[str, ...], ...] = ()
    threads: int = 1
    chain_m_equals_k: bool = True

    def __post_init__(self) -> None:
        unknown = set(self.checks) - set(CHECKS)
        if unknown:
            raise ValueError(f"unknown checks: {', '.join(sorted(unknown))}")
        if self.source not in ("enumerate", "sample", "explicit"):
            raise ValueError(f"unknown coloring source {self.source!r}")
        if self.source == "explicit" and not self.lambdas:
            raise ValueError("explicit coloring source needs at least one lambda")
        if self.limit < 1 or self.chain_limit < 1:
            raise ValueError("limit must be positive")

    def to_json(self) -> dict[str, Any]:
        return {
            "checks": list(self.checks),
            "m": self.m,
            "source": self.source,
            "limit": self.limit,
            "chain_limit": self.chain_limit,
            "seed": self.seed,
            "lambdas": [list(x) for x in self.lambdas],
        }


def _colorings(
    entry: CorpusEntry, mu: CharacteristicFunction, v0, m: int, limit: int, cfg: SuiteConfig
) -> list[tuple[str, ...]]:
    if cfg.source == "explicit":
        return [tuple(lam) for lam in cfg.lambdas]
    return [tuple(_strs(s.lam)) for s in enumerate_colorings(entry.polytope, mu, v0, m, limit, cfg.seed)]


def plan_tasks(corpus: Sequence[CorpusEntry], cfg: SuiteConfig) -> tuple[list[Task], list[VerificationReport]]:
    """Expand the corpus into tasks in canonical order; invalid entries become error reports."""
    tasks: list[Task] = []
    errors: list[VerificationReport] = []
    for entry in corpus:
        try:
            mu = entry.mu()
            v0 = entry.base_vertex
            if v0 not in entry.polytope.vertices:
                raise ColoringError(f"v0={list(v0)} is not a vertex of {entry.polytope.name}")
        except (ColoringError, PolytopeError, ValueError) as exc:
            inputs = {"polytope": entry.polytope.name, "mu": list(entry.mu_labels), "v0": list(entry.v0)}
            errors.append(VerificationReport("validate", inputs, {}, {}, "error", f"{type(exc).__name__}: {exc}"))
            continue
        for check in cfg.checks:
            if check in ENTRY_CHECKS:
                tasks.append(Task(check, entry, v0))
        coloring_checks = [c for c in cfg.checks if c in COLORING_CHECKS]
        if coloring_checks:
            for lam in _colorings(entry, mu, v0, cfg.m, cfg.limit, cfg):
                for check in coloring_checks:
                    tasks.append(Task(check, entry, v0, _width(lam, cfg.m), lam))
        chain_checks = [c for c in cfg.checks if c in CHAIN_CHECKS]
        if chain_checks:
            m_chain = entry.polytope.k if cfg.chain_m_equals_k and cfg.source != "explicit" else cfg.m
            for lam in _colorings(entry, mu, v0, m_chain, cfg.chain_limit, cfg):
                width = _width(lam, m_chain)
                for check in chain_checks:
                    if check == "monotone":
                        tasks.append(Task(check, entry, v0, width, lam))
                        continue
                    try:
                        spec = _spec_of(Task(check, entry, v0, width, lam))
                        links = len(complete_to_max(spec)) - 1 if spec.m == spec.k else 0
                    except ColoringError:
                        links = 0  # run_task reports the bad coloring
                    # one task per link; a maximal coloring still gets an n/a entry
                    for j in range(1, links + 1) if links else [0]:
                        tasks.append(Task(check, entry, v0, width, lam, j))
    return tasks, errors


def _width(lam: Sequence[str], default: int) -> int:
    return len(lam[0]) if lam else default


def _spec_of(task: Task) -> GlueSpec:
    mu = validate_characteristic(task.entry.polytope, task.entry.mu_labels)
    lam = tuple(BitVector.from_string(s) for s in task.lam)
    return GlueSpec(task.entry.polytope, mu, task.v0, lam, task.m)


def run_task(task: Task) -> VerificationReport:
    p = task.entry.polytope
    try:
        if task.check == "dj":
            return check_dj_betti(p, task.entry.mu())
        if task.check == "caolu":
            return check_cao_lu(p)
        if task.check == "hmu":
            return check_h_mu_free(p, task.entry.mu(), task.v0)
        spec = _spec_of(task)
        if task.check == "hc":
            return check_halperin_carlsson(spec)
        if task.check == "components":
            return check_component_formula(spec)
        if task.check == "pq":
            return check_partial_quotient(spec)
        if task.check == "facial":
            return check_facial_induction(spec)
        if task.check == "maxequiv":
            ref = reference_maximal(spec)
            return check_max_independent_equivalence(spec, ref if ref is not None else spec)
        if task.check == "monotone":
            return check_hrk_monotonicity(spec)
        if task.check == "doublecover":
            return check_double_cover_bound(spec, task.j)
    except (ColoringError, PolytopeError) as exc:
        inputs = {"polytope": p.name, "mu": list(task.entry.mu_labels), "v0": list(task.v0), "lambda": list(task.lam)}
        return VerificationReport(task.check, inputs, {}, {}, "error", f"{type(exc).__name__}: {exc}")
    raise ValueError(f"unknown check {task.check!r}")


def _tagged(task: Task, report: VerificationReport) -> VerificationReport:
    report.inputs = {"entry": task.entry.name, **report.inputs}
    return report


def _run_tagged(task: Task) -> VerificationReport:
    return _tagged(task, run_task(task))


def run_suite(corpus: Sequence[CorpusEntry], cfg: SuiteConfig | None = None) -> list[VerificationReport]:
    """Run every selected check over every corpus entry and coloring, in canonical order."""
    cfg = cfg or SuiteConfig()
    tasks, errors = plan_tasks(corpus, cfg)
    if cfg.threads > 1 and len(tasks) > 1:
        chunk = max(1, len(tasks) // (cfg.threads * 4))
        with ProcessPoolExecutor(max_workers=cfg.threads) as pool:
            reports = list(pool.map(_run_tagged, tasks, chunksize=chunk))
    else:
        reports = [_run_tagged(t) for t in tasks]
    return errors + reports


@dataclass
class Summary:
    total: int = 0
    counts: dict[str, int] = field(default_factory=dict)

    @property
    def exit_code(self) -> int:
        if self.counts.get("error"):
            return 1
        if self.counts.get("fail"):
            return 2
        return 0

    def to_json(self) -> dict[str, Any]:
        return {"total": self.total, **{k: self.counts.get(k, 0) for k in ("pass", "fail", "n/a", "error")}}


def summarize(reports: Sequence[VerificationReport]) -> Summary:
    s = Summary(len(reports))
    for r in reports:
        s.counts[r.status] = s.counts.get(r.status, 0) + 1
    return s


def suite_document(reports: Sequence[VerificationReport], cfg: SuiteConfig, timings: bool = False) -> dict[str, Any]:
    return {
        "schema": SCHEMA,
        "config": cfg.to_json(),
        "summary": summarize(reports).to_json(),
        "reports": [r.to_json(timings) for r in reports],
    }


def default_threads() -> int:
    env = os.environ.get("GLUEBACK_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1
