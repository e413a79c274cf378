"""Label systems on the facets of a simple polytope.

A :class:`Coloring` assigns a vector of (Z_2)^r to each facet.  The special
cases used throughout are characteristic functions (r = n, independent at
every vertex), the moment-angle coloring e_i, glue-back labels
``(mu | lambda)`` and their quotients by free subgroups.

Subgroups of (Z_2)^d are expressed in facet coordinates: coordinate i-1 is
facet i, the same coordinates the moment-angle coloring uses.  The copy of
(Z_2)^n that ``mu`` lives in is identified with the coordinates of the
facets at the base vertex v0 through ``mu`` itself, i.e. ``mu(F)`` is
written in the basis ``{mu(G) : G a facet at v0}``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Any, Sequence

from .gf2 import (
    BitVector,
    GF2Matrix,
    Subspace,
    WidthMismatchError,
    block_diagonal,
    quotient_projection,
    solve_label_isomorphism,
    span,
    span_bits,
)
from .polytope import Simplex, SimplePolytope


class ColoringError(ValueError):
    pass


class SingularAtVertex(ColoringError):
    def __init__(self, sigma: Simplex, detail: str = ""):
        self.sigma = tuple(sigma)
        super().__init__(f"labels are linearly dependent at vertex {list(self.sigma)}{detail}")


class NotFree(ColoringError):
    def __init__(self, sigma: Simplex):
        self.sigma = tuple(sigma)
        super().__init__(f"subgroup meets the isotropy group of vertex {list(self.sigma)}")


class DisconnectedBundle(ColoringError):
    """rank(lambda) < m: the glue-back is disconnected, reduce m first."""


@dataclass(frozen=True, eq=False)
class Coloring:
    polytope: SimplePolytope
    r: int
    labels: tuple[BitVector, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "labels", tuple(self.labels))
        if len(self.labels) != self.polytope.d:
            raise ColoringError(f"{len(self.labels)} labels for {self.polytope.d} facets")
        for i, lab in enumerate(self.labels, 1):
            if lab.width != self.r:
                raise WidthMismatchError(f"label of facet {i} has width {lab.width}, expected {self.r}")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Coloring):
            return NotImplemented
        return self.polytope == other.polytope and self.r == other.r and self.labels == other.labels

    def __hash__(self) -> int:
        return hash((self.polytope, self.r, self.labels))

    def label(self, i: int) -> BitVector:
        """Label of facet ``i`` (1-based)."""
        return self.labels[i - 1]

    @cached_property
    def label_bits(self) -> tuple[int, ...]:
        return tuple(v.bits for v in self.labels)

    def isotropy(self, sigma: Sequence[int]) -> Subspace:
        """G_sigma, the span of the labels of the facets in ``sigma``."""
        return span_bits((self.label_bits[i - 1] for i in sigma), self.r)

    def singular_vertices(self) -> list[Simplex]:
        return [v for v in self.polytope.vertices if self.isotropy(v).rank != len(v)]

    def to_json(self) -> dict[str, Any]:
        return {"r": self.r, "labels": [str(v) for v in self.labels]}

    def __repr__(self) -> str:
        return f"Coloring({self.polytope.name}, r={self.r}, [{' '.join(map(str, self.labels))}])"


class CharacteristicFunction(Coloring):
    """A coloring with r = n that is independent at every vertex."""


def _as_vectors(labels: Sequence[BitVector | str], width: int | None = None) -> tuple[BitVector, ...]:
    out = tuple(BitVector.from_string(v) if isinstance(v, str) else v for v in labels)
    if width is not None:
        for v in out:
            if v.width != width:
                raise WidthMismatchError(f"label {v} has width {v.width}, expected {width}")
    return out


def make_coloring(p: SimplePolytope, labels: Sequence[BitVector | str], r: int | None = None) -> Coloring:
    vecs = _as_vectors(labels, r)
    if r is None:
        if not vecs:
            raise ColoringError("cannot infer label width from an empty label list")
        r = vecs[0].width
    return Coloring(p, r, vecs)


def validate_characteristic(p: SimplePolytope, labels: Sequence[BitVector | str]) -> CharacteristicFunction:
    vecs = _as_vectors(labels)
    if len(vecs) != p.d:
        raise ColoringError(f"{len(vecs)} labels for {p.d} facets")
    for v in vecs:
        if v.width != p.n:
            raise ColoringError(f"characteristic labels must have width n={p.n}, got {v.width}")
    mu = CharacteristicFunction(p, p.n, vecs)
    # faces at a vertex are subsets of it, so vertices suffice
    for v in p.vertices:
        if mu.isotropy(v).rank != p.n:
            raise SingularAtVertex(v, f" (labels {', '.join(str(mu.label(i)) for i in v)})")
    return mu


def moment_angle_coloring(p: SimplePolytope) -> Coloring:
    return Coloring(p, p.d, tuple(BitVector.unit(i, p.d) for i in range(p.d)))


@dataclass(frozen=True, eq=False)
class GlueSpec:
    """A small cover (p, mu), a base vertex v0 and colors on the k panels.

    Panel i corresponds to the i-th facet not incident to v0, in ascending
    facet order.
    """

    polytope: SimplePolytope
    mu: CharacteristicFunction
    v0: Simplex
    lam: tuple[BitVector, ...]
    m: int = field(default=-1)

    def __post_init__(self) -> None:
        p = self.polytope
        object.__setattr__(self, "v0", tuple(sorted(self.v0)))
        object.__setattr__(self, "lam", tuple(self.lam))
        if self.mu.polytope != p:
            raise ColoringError("mu belongs to a different polytope")
        if self.v0 not in p.vertices:
            raise ColoringError(f"v0={list(self.v0)} is not a vertex of {p.name}")
        if len(self.lam) != p.k:
            raise ColoringError(f"lambda has {len(self.lam)} panel colors, expected k={p.k}")
        widths = {v.width for v in self.lam}
        if self.m < 0:
            if len(widths) != 1:
                raise WidthMismatchError(f"panel colors have widths {sorted(widths)}")
            object.__setattr__(self, "m", widths.pop())
        elif widths - {self.m}:
            raise WidthMismatchError(f"panel colors must have width m={self.m}")

    @property
    def k(self) -> int:
        return self.polytope.k

    @property
    def cut_facets(self) -> tuple[int, ...]:
        return cut_facets(self.polytope, self.v0)

    def with_lambda(self, lam: Sequence[BitVector]) -> GlueSpec:
        return GlueSpec(self.polytope, self.mu, self.v0, tuple(lam), self.m)

    def to_json(self) -> dict[str, Any]:
        return {"mu": self.mu.to_json(), "v0": list(self.v0), "lambda": [str(v) for v in self.lam]}

    def __repr__(self) -> str:
        lam = ",".join(map(str, self.lam))
        return f"GlueSpec({self.polytope.name}, v0={list(self.v0)}, m={self.m}, lambda=({lam}))"


def cut_facets(p: SimplePolytope, v0: Sequence[int]) -> tuple[int, ...]:
    at_v0 = set(v0)
    return tuple(i for i in range(1, p.d + 1) if i not in at_v0)


def default_v0(p: SimplePolytope) -> Simplex:
    """Last vertex in sorted order, so the cut facets come first when possible."""
    return p.vertices[-1]


def glue_back_coloring(spec: GlueSpec) -> Coloring:
    """Labels ``(mu(F) | lambda(P))`` on cut facets and ``(mu(F) | 0)`` elsewhere."""
    p, m = spec.polytope, spec.m
    panel_of = {f: i for i, f in enumerate(spec.cut_facets)}
    labels = []
    for f in range(1, p.d + 1):
        tail = spec.lam[panel_of[f]] if f in panel_of else BitVector.zero(m)
        labels.append(spec.mu.label(f).concat(tail))
    c = Coloring(p, p.n + m, tuple(labels))
    assert not c.singular_vertices(), "mu block is independent at every vertex"
    return c


@dataclass(frozen=True)
class RankInfo:
    L_lambda: Subspace
    rank: int
    maximally_independent: bool


def rank_info(spec: GlueSpec) -> RankInfo:
    L = span(spec.lam, spec.m)
    return RankInfo(L, L.rank, L.rank == spec.k)


def independent_panels(lam: Sequence[BitVector], width: int) -> tuple[list[int], list[int]]:
    """Greedy split of panel indices (0-based) into a basis of L_lambda and the rest."""
    basis: list[int] = []
    rest: list[int] = []
    current = Subspace.zero(width)
    for i, v in enumerate(lam):
        if v.bits in current:
            rest.append(i)
        else:
            basis.append(i)
            current = current + span_bits([v.bits], width)
    return basis, rest


def extend_basis(sub: Subspace, count: int | None = None) -> list[BitVector]:
    """Unit vectors, lowest index first, completing ``sub`` to the whole space."""
    out = []
    cur = sub
    for i in range(sub.ambient_width):
        if count is not None and len(out) == count:
            break
        if (1 << i) not in cur:
            out.append(BitVector.unit(i, sub.ambient_width))
            cur = cur + span_bits([1 << i], sub.ambient_width)
    return out


def complete_to_max(spec: GlueSpec) -> list[GlueSpec]:
    """The chain lambda_0 = lambda, ..., lambda_{k-s} ending maximally independent.

    Non-basis panels (in ascending order) receive the completing vectors
    omega_1, omega_2, ... one at a time.
    """
    if spec.m != spec.k:
        raise ColoringError(f"complete_to_max needs m == k, got m={spec.m} k={spec.k}")
    _, rest = independent_panels(spec.lam, spec.m)
    omegas = extend_basis(span(spec.lam, spec.m))
    assert len(omegas) == len(rest)
    chain = [spec]
    lam = list(spec.lam)
    for panel, omega in zip(rest, omegas):
        lam[panel] = omega
        chain.append(spec.with_lambda(lam))
    return chain


def chain_translation(chain: Sequence[GlueSpec], j: int) -> BitVector:
    """lambda(P_{s+j}) + omega_j: the deck involution between links j-1 and j."""
    before, after = chain[j - 1].lam, chain[j].lam
    changed = [i for i in range(len(before)) if before[i] != after[i]]
    if len(changed) != 1:
        raise ColoringError(f"links {j - 1} and {j} differ on {len(changed)} panels")
    i = changed[0]
    return before[i] + after[i]


def _v0_embedding(p: SimplePolytope, mu: Coloring, v0: Sequence[int]) -> GF2Matrix:
    """iota: (Z_2)^n -> (Z_2)^d sending mu(G) to e_G for each facet G at v0."""
    at_v0 = [mu.label(f) for f in v0]
    units = [BitVector.unit(f - 1, p.d) for f in v0]
    phi = solve_label_isomorphism(at_v0, units)
    if phi is None:
        raise SingularAtVertex(tuple(v0))
    return phi


def sigma_matrix(p: SimplePolytope, mu: Coloring, v0: Sequence[int]) -> GF2Matrix:
    """sigma: (Z_2)^k -> (Z_2)^d, e_i -> e_{F_i} + iota(mu(F_i)) for the i-th cut facet F_i."""
    iota = _v0_embedding(p, mu, v0)
    cols = []
    for f in cut_facets(p, v0):
        cols.append((1 << (f - 1)) ^ iota.apply(mu.label(f)))
    return GF2Matrix.from_columns(p.d, cols)


def sigma_image(p: SimplePolytope, mu: Coloring, v0: Sequence[int], N: Subspace) -> Subspace:
    if N.ambient_width != p.k:
        raise WidthMismatchError(f"N lives in (Z2)^{N.ambient_width}, expected k={p.k}")
    sig = sigma_matrix(p, mu, v0)
    return span_bits((sig.apply(b) for b in N.basis), p.d)


def h_mu_subgroup(p: SimplePolytope, mu: Coloring, v0: Sequence[int]) -> Subspace:
    h = sigma_image(p, mu, v0, Subspace.full(p.k))
    assert h.rank == p.k
    return h


@dataclass(frozen=True)
class NStar:
    """Data of the N*_lambda construction for a connected glue-back."""

    basis_panels: tuple[int, ...]  # 0-based panel indices forming a basis of L_lambda
    other_panels: tuple[int, ...]
    omegas: tuple[BitVector, ...]  # in (Z_2)^k
    subgroup: Subspace  # N*_lambda in (Z_2)^k, lambda embedded in the first m coordinates
    lambda0: tuple[BitVector, ...]  # the maximally independent coloring lambda_0 in (Z_2)^k


def _embed(v: BitVector, width: int) -> BitVector:
    return BitVector(width, v.bits)


def n_star(spec: GlueSpec) -> NStar:
    k, m = spec.k, spec.m
    info = rank_info(spec)
    if info.rank < m:
        raise DisconnectedBundle(
            f"rank(lambda)={info.rank} < m={m}: the glue-back is disconnected; reduce m first"
        )
    basis, rest = independent_panels(spec.lam, m)
    lam_k = [_embed(v, k) for v in spec.lam]
    omegas = extend_basis(span([lam_k[i] for i in basis], k))
    gens = [lam_k[i] + w for i, w in zip(rest, omegas)]
    lam0 = list(lam_k)
    for i, w in zip(rest, omegas):
        lam0[i] = w
    return NStar(tuple(basis), tuple(rest), tuple(omegas), span(gens, k), tuple(lam0))


def n_star_subgroup(spec: GlueSpec) -> Subspace:
    sub = n_star(spec).subgroup
    assert sub.rank == spec.k - spec.m
    return sub


def panel_coordinates(ns: NStar) -> Subspace:
    """Rewrite N* in the basis lambda_0(P_1), ..., lambda_0(P_k), where sigma is defined."""
    k = len(ns.lambda0)
    units = [BitVector.unit(i, k) for i in range(k)]
    to_panels = solve_label_isomorphism(list(ns.lambda0), units)
    assert to_panels is not None
    return span_bits((to_panels.apply(b) for b in ns.subgroup.basis), k)


def partial_quotient_coloring(c: Coloring, H: Subspace) -> Coloring:
    """Labels of Z/H: project every label through (Z_2)^r -> (Z_2)^r / H."""
    if H.ambient_width != c.r:
        raise WidthMismatchError(f"H lives in (Z2)^{H.ambient_width}, labels in (Z2)^{c.r}")
    for v in c.polytope.vertices:
        g = c.isotropy(v)
        if (g + H).rank != g.rank + H.rank:
            raise NotFree(v)
    q = quotient_projection(H)
    width = c.r - H.rank
    return Coloring(c.polytope, width, tuple(BitVector(width, q.apply(lab)) for lab in c.labels))


def block_map(n: int, phi: GF2Matrix) -> GF2Matrix:
    """Identity on the mu block, ``phi`` on the lambda block."""
    return block_diagonal(GF2Matrix.identity(n), phi)


# JSON forms: coloring {"r": int, "labels": ["0101", ...]} and
# glue spec {"mu": coloring, "v0": [int, ...], "lambda": ["01", ...]}


def parse_coloring(p: SimplePolytope, document: dict[str, Any] | str) -> Coloring:
    if isinstance(document, str):
        document = json.loads(document)
    if not isinstance(document, dict) or "labels" not in document:
        raise ColoringError("coloring document must be an object with 'labels'")
    labels = document["labels"]
    if not isinstance(labels, list) or not all(isinstance(s, str) for s in labels):
        raise ColoringError("'labels' must be a list of bit strings")
    r = document.get("r")
    return make_coloring(p, labels, r)


def parse_characteristic(p: SimplePolytope, document: dict[str, Any] | str) -> CharacteristicFunction:
    c = parse_coloring(p, document)
    return validate_characteristic(p, c.labels)


def parse_glue_spec(
    p: SimplePolytope,
    document: dict[str, Any] | str,
    mu: CharacteristicFunction | None = None,
    v0: Sequence[int] | None = None,
) -> GlueSpec:
    if isinstance(document, str):
        document = json.loads(document)
    if isinstance(document, list):
        document = {"lambda": document}
    if not isinstance(document, dict) or "lambda" not in document:
        raise ColoringError("glue spec must be an object with 'lambda'")
    if mu is None:
        if "mu" not in document:
            raise ColoringError("glue spec has no 'mu' and none was supplied")
        mu = parse_characteristic(p, document["mu"])
    if v0 is None:
        v0 = document.get("v0") or default_v0(p)
    lam = _as_vectors(document["lambda"])
    m = document.get("m", -1)
    if not lam and m < 0:
        m = 0
    return GlueSpec(p, mu, tuple(v0), lam, m)


def load_json(path: str | Path) -> Any:
    return json.loads(Path(path).read_text())
