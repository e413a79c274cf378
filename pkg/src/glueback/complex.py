"""Quotient cell complexes P x (Z_2)^r / ~ for a facet coloring.

A point (p, w) is identified with (p, w') when w - w' lies in G_sigma, the span
of the labels of the facets containing p.  Each face sigma of P contributes
one cell per coset of G_sigma, of dimension n - |sigma|.  The identifications
act only on the group coordinate, so every cell is a copy of its face and
meets each of its codimension-one faces exactly once: all incidence
coefficients are 1 mod 2.

Cells are ordered by dimension, then face (codimension then lexicographic),
then coset index, so boundary matrices are reproducible bit for bit.
"""

from __future__ import annotations

import csv
import io
import json
import warnings
from dataclasses import dataclass
from typing import Any, Iterable, Sequence

from .coloring import Coloring
from .gf2 import (
    BitVector,
    GF2Matrix,
    Subspace,
    WidthMismatchError,
    bits_to_str,
    coset_count,
    rank_of_rows,
    rep_of_index_bits,
)
from .polytope import Simplex, SimplePolytope, faces


class NonManifoldWarning(UserWarning):
    pass


class ComplexError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class Cell:
    sigma: Simplex
    rep: int


class QuotientCellComplex:
    """Graded cells with their mod-2 incidences.

    ``cells[q]`` lists the q-cells; ``incidence[q][i]`` holds the indices of
    the (q-1)-cells on the boundary of q-cell ``i``.  Subcomplexes (components,
    facial pieces) reuse the same class with a filtered cell list.
    """

    def __init__(
        self,
        polytope: SimplePolytope,
        coloring: Coloring,
        dim: int,
        cells: Sequence[Sequence[Cell]],
        incidence: Sequence[Sequence[tuple[int, ...]]] | None = None,
    ):
        if coloring.polytope != polytope:
            raise ComplexError("coloring belongs to a different polytope")
        if len(cells) != dim + 1:
            raise ComplexError(f"expected {dim + 1} cell groups, got {len(cells)}")
        self.polytope = polytope
        self.coloring = coloring
        self.dim = dim
        self.cells: tuple[tuple[Cell, ...], ...] = tuple(tuple(c) for c in cells)
        self._isotropy: dict[Simplex, Subspace] = {}
        self.index: tuple[dict[Cell, int], ...] = tuple({c: i for i, c in enumerate(group)} for group in self.cells)
        for q, group in enumerate(self.cells):
            for c in group:
                if polytope.n - len(c.sigma) != q:
                    raise ComplexError(f"cell {c} does not have dimension {q}")
        if incidence is None:
            incidence = [()] + [tuple(self._faces_of(c, q) for c in self.cells[q]) for q in range(1, dim + 1)]
        # trusted callers (restrictions of an existing complex) pass incidence directly
        self.incidence: tuple[tuple[tuple[int, ...], ...], ...] = tuple(tuple(x) for x in incidence)

    def isotropy(self, sigma: Simplex) -> Subspace:
        g = self._isotropy.get(sigma)
        if g is None:
            g = self._isotropy[sigma] = self.coloring.isotropy(sigma)
        return g

    def _faces_of(self, cell: Cell, q: int) -> tuple[int, ...]:
        lower = self.index[q - 1]
        out = []
        for tau in self.polytope.cofaces.get(cell.sigma, ()):
            face = Cell(tau, self.isotropy(tau).reduce(cell.rep))
            try:
                out.append(lower[face])
            except KeyError:
                raise ComplexError(f"cell set is not closed: {face} missing below {cell}") from None
        return tuple(out)

    @property
    def cell_counts(self) -> tuple[int, ...]:
        return tuple(len(g) for g in self.cells)

    @property
    def total_cells(self) -> int:
        return sum(self.cell_counts)

    def boundary_columns(self, q: int) -> list[int]:
        """Column j of the q-th boundary matrix packed as an int over (q-1)-cells."""
        if not 1 <= q <= self.dim:
            return []
        cols = []
        for faces_ in self.incidence[q]:
            col = 0
            for f in faces_:
                col ^= 1 << f
            cols.append(col)
        return cols

    def boundary(self, q: int) -> GF2Matrix:
        """The q-th boundary operator as a (#(q-1)-cells x #q-cells) matrix."""
        if not 1 <= q <= self.dim:
            raise IndexError(f"no boundary operator of degree {q} in dimension {self.dim}")
        return GF2Matrix.from_columns(len(self.cells[q - 1]), self.boundary_columns(q))

    def check_boundary_squared(self) -> bool:
        for q in range(2, self.dim + 1):
            below = self.incidence[q - 1]
            for faces_ in self.incidence[q]:
                acc = 0
                for f in faces_:
                    for g in below[f]:
                        acc ^= 1 << g
                if acc:
                    return False
        return True

    def __repr__(self) -> str:
        return f"QuotientCellComplex({self.polytope.name}, r={self.coloring.r}, cells={self.cell_counts})"


def build_complex(p: SimplePolytope, c: Coloring) -> QuotientCellComplex:
    if c.polytope != p:
        raise WidthMismatchError("coloring belongs to a different polytope")
    singular = c.singular_vertices()
    if singular:
        warnings.warn(
            f"labels are dependent at vertex {list(singular[0])}; the quotient is not a closed manifold",
            NonManifoldWarning,
            stacklevel=2,
        )
    cells: list[list[Cell]] = [[] for _ in range(p.n + 1)]
    for face in faces(p):
        g = c.isotropy(face.sigma)
        cells[face.dim].extend(Cell(face.sigma, rep_of_index_bits(i, g)) for i in range(coset_count(g)))
    cx = QuotientCellComplex(p, c, p.n, cells)
    assert cx.check_boundary_squared(), "boundary of a boundary must vanish"
    return cx


@dataclass(frozen=True)
class BettiReport:
    betti: tuple[int, ...]
    hrk: int
    euler: int
    components: int
    cells_per_dim: tuple[int, ...]

    def to_json(self) -> dict[str, Any]:
        return {
            "betti": list(self.betti),
            "hrk": self.hrk,
            "euler": self.euler,
            "components": self.components,
            "cells_per_dim": list(self.cells_per_dim),
        }


def boundary_ranks(cx: QuotientCellComplex) -> list[int]:
    """ranks[q] = rank of the q-th boundary (0 for q = 0 and q = dim + 1)."""
    ranks = [0] * (cx.dim + 2)
    for q in range(1, cx.dim + 1):
        ranks[q] = rank_of_rows(cx.boundary_columns(q))
    return ranks


def betti(cx: QuotientCellComplex) -> BettiReport:
    ranks = boundary_ranks(cx)
    counts = cx.cell_counts
    b = tuple(counts[q] - ranks[q] - ranks[q + 1] for q in range(cx.dim + 1))
    euler = sum((-1) ** q * n for q, n in enumerate(counts))
    assert euler == sum((-1) ** q * x for q, x in enumerate(b))
    return BettiReport(b, sum(b), euler, b[0] if b else 0, counts)


class UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, a: int) -> int:
        root = a
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[a] != root:
            self.parent[a], a = root, self.parent[a]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        return True


@dataclass(frozen=True)
class ComponentLabeling:
    count: int
    labels: tuple[tuple[int, ...], ...]  # labels[q][i] = component id of q-cell i

    def cells_in(self, cid: int) -> list[list[int]]:
        return [[i for i, lab in enumerate(group) if lab == cid] for group in self.labels]


def components(cx: QuotientCellComplex) -> ComponentLabeling:
    """Connected components of the 1-skeleton.

    Component ids are numbered in order of their lowest-index vertex.
    """
    nv = len(cx.cells[0])
    uf = UnionFind(nv)
    if cx.dim >= 1:
        for ends in cx.incidence[1]:
            for other in ends[1:]:
                uf.union(ends[0], other)
    ids: dict[int, int] = {}
    vertex_labels = []
    for v in range(nv):
        root = uf.find(v)
        if root not in ids:
            ids[root] = len(ids)
        vertex_labels.append(ids[root])
    labels = [tuple(vertex_labels)]
    for q in range(1, cx.dim + 1):
        below = labels[q - 1]
        labels.append(tuple(below[faces_[0]] for faces_ in cx.incidence[q]))
    return ComponentLabeling(len(ids), tuple(labels))


def restrict_to_component(
    cx: QuotientCellComplex, cid: int, labeling: ComponentLabeling | None = None
) -> QuotientCellComplex:
    lab = labeling or components(cx)
    if not 0 <= cid < lab.count:
        raise ComplexError(f"unknown component id {cid} (complex has {lab.count})")
    keep = lab.cells_in(cid)
    cells = [[cx.cells[q][i] for i in idx] for q, idx in enumerate(keep)]
    renumber = [{old: new for new, old in enumerate(idx)} for idx in keep]
    incidence = [()] + [
        tuple(tuple(renumber[q - 1][f] for f in cx.incidence[q][i]) for i in keep[q]) for q in range(1, cx.dim + 1)
    ]
    return QuotientCellComplex(cx.polytope, cx.coloring, cx.dim, cells, incidence)


def translate_action(cx: QuotientCellComplex, g: BitVector | int) -> tuple[tuple[int, ...], ...]:
    """Cell permutations induced by (sigma, C) -> (sigma, C + g)."""
    if isinstance(g, BitVector):
        if g.width != cx.coloring.r:
            raise WidthMismatchError(f"translation width {g.width} != label width {cx.coloring.r}")
        g = g.bits
    perms = []
    for q, group in enumerate(cx.cells):
        index = cx.index[q]
        perm = []
        for c in group:
            image = Cell(c.sigma, cx.isotropy(c.sigma).reduce(c.rep ^ g))
            try:
                perm.append(index[image])
            except KeyError:
                raise ComplexError(f"translation leaves the complex at {c}") from None
        perms.append(tuple(perm))
    return tuple(perms)


def commutes_with_boundary(cx: QuotientCellComplex, perms: Sequence[Sequence[int]]) -> bool:
    """True when the permutation satisfies d . P = P . d in every degree."""
    for q in range(1, cx.dim + 1):
        lower = perms[q - 1]
        for i, faces_ in enumerate(cx.incidence[q]):
            moved = sorted(lower[f] for f in faces_)
            if moved != sorted(cx.incidence[q][perms[q][i]]):
                return False
    return True


def fixed_cells(perms: Sequence[Sequence[int]]) -> int:
    return sum(1 for perm in perms for i, j in enumerate(perm) if i == j)


def facial_subcomplex(cx: QuotientCellComplex, j: int) -> QuotientCellComplex:
    """Cells lying over facet ``j``: the preimage of the facial submanifold."""
    if not 1 <= j <= cx.polytope.d:
        raise ComplexError(f"facet index {j} outside 1..{cx.polytope.d}")
    cells = [[c for c in group if j in c.sigma] for group in cx.cells[: cx.dim]]
    return QuotientCellComplex(cx.polytope, cx.coloring, cx.dim - 1, cells)


def cell_map(cx1: QuotientCellComplex, cx2: QuotientCellComplex, phi: GF2Matrix) -> list[list[int]] | None:
    """Cell bijection (sigma, C) -> (sigma, phi C), or None if it is not well defined."""
    if phi.ncols != cx1.coloring.r or phi.nrows != cx2.coloring.r:
        raise WidthMismatchError(f"phi is {phi.shape}, expected ({cx2.coloring.r}, {cx1.coloring.r})")
    for sigma in {c.sigma for group in cx1.cells for c in group}:
        target = cx2.isotropy(sigma)
        if any(phi.apply(b) not in target for b in cx1.isotropy(sigma).basis):
            return None
    maps = []
    for q, group in enumerate(cx1.cells):
        index = cx2.index[q]
        images = []
        for c in group:
            image = Cell(c.sigma, cx2.isotropy(c.sigma).reduce(phi.apply(c.rep)))
            if image not in index:
                return None
            images.append(index[image])
        if len(set(images)) != len(images) or len(images) != len(cx2.cells[q]):
            return None
        maps.append(images)
    return maps


def complexes_identical(cx1: QuotientCellComplex, cx2: QuotientCellComplex, phi: GF2Matrix) -> bool:
    """True iff ``phi`` induces a cell bijection intertwining all boundary matrices."""
    if cx1.dim != cx2.dim or cx1.polytope.n != cx2.polytope.n:
        raise ComplexError(f"dimension mismatch: {cx1.dim} vs {cx2.dim}")
    if cx1.cell_counts != cx2.cell_counts:
        return False
    maps = cell_map(cx1, cx2, phi)
    if maps is None:
        return False
    for q in range(1, cx1.dim + 1):
        for i, faces_ in enumerate(cx1.incidence[q]):
            moved = sorted(maps[q - 1][f] for f in faces_)
            if moved != sorted(cx2.incidence[q][maps[q][i]]):
                return False
    return True


def export_json(cx: QuotientCellComplex) -> dict[str, Any]:
    """Cells as (dim, sigma, rep bits) and boundary triples (q, row, col).

    Row indexes (q-1)-cells and col indexes q-cells, both in the stable cell order.
    """
    r = cx.coloring.r
    return {
        "schema": 1,
        "polytope": cx.polytope.name,
        "r": r,
        "dim": cx.dim,
        "cells": [
            {"dim": q, "sigma": list(c.sigma), "rep": bits_to_str(c.rep, r)}
            for q, group in enumerate(cx.cells)
            for c in group
        ],
        "boundary": [
            [q, row, col]
            for q in range(1, cx.dim + 1)
            for col, faces_ in enumerate(cx.incidence[q])
            for row in sorted(faces_)
        ],
    }


def export_csv(cx: QuotientCellComplex) -> tuple[str, str]:
    """Two CSV tables: cells (dim, index, sigma, rep) and boundary (q, row, col)."""
    r = cx.coloring.r
    cells_io, bd_io = io.StringIO(), io.StringIO()
    w = csv.writer(cells_io, lineterminator="\n")
    w.writerow(["dim", "index", "sigma", "rep"])
    for q, group in enumerate(cx.cells):
        for i, c in enumerate(group):
            w.writerow([q, i, " ".join(map(str, c.sigma)), bits_to_str(c.rep, r)])
    w = csv.writer(bd_io, lineterminator="\n")
    w.writerow(["q", "row", "col"])
    for q in range(1, cx.dim + 1):
        for col, faces_ in enumerate(cx.incidence[q]):
            for row in sorted(faces_):
                w.writerow([q, row, col])
    return cells_io.getvalue(), bd_io.getvalue()


def write_export(cx: QuotientCellComplex, path: str, fmt: str = "json") -> list[str]:
    if fmt == "json":
        with open(path, "w") as fh:
            json.dump(export_json(cx), fh)
        return [path]
    cells_csv, bd_csv = export_csv(cx)
    base = path[:-4] if path.endswith(".csv") else path
    out = [f"{base}.cells.csv", f"{base}.boundary.csv"]
    for name, text in zip(out, (cells_csv, bd_csv)):
        with open(name, "w") as fh:
            fh.write(text)
    return out


def permutation_orbits(perm: Iterable[int]) -> list[int]:
    """Cycle lengths of a permutation given as an image list."""
    perm = list(perm)
    seen = [False] * len(perm)
    out = []
    for i in range(len(perm)):
        if seen[i]:
            continue
        length = 0
        j = i
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        out.append(length)
    return out
