"""Simple polytopes encoded by their dual simplicial complexes.

A polytope vertex is the set of facets meeting there, so the dual complex
K_P has the facets as vertices and the polytope's vertices as maximal
simplices.  Facet indices are 1-based throughout.  Anything passing the
ridge and connectivity checks is accepted; polytopality itself is not
tested.
"""

from __future__ import annotations

import itertools
import json
import warnings
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from math import comb
from pathlib import Path
from typing import Any, Iterable

Simplex = tuple[int, ...]

POLYTOPE_FIELDS = {"name", "n", "d", "facet_names", "vertices"}


class PolytopeError(ValueError):
    """Base class for invalid polytope input."""


class SchemaError(PolytopeError):
    pass


class VertexCardinalityError(PolytopeError):
    pass


class RidgeConditionError(PolytopeError):
    pass


class DisconnectedError(PolytopeError):
    pass


class UnusedFacetError(PolytopeError):
    pass


class UnknownFieldWarning(UserWarning):
    pass


@dataclass(frozen=True)
class Face:
    sigma: Simplex
    dim: int


@dataclass(frozen=True)
class FHVector:
    f: tuple[int, ...]  # f[i] = number of i-dimensional faces of P
    h: tuple[int, ...]


@dataclass(frozen=True, eq=False)
class SimplePolytope:
    name: str
    n: int
    d: int
    vertices: tuple[Simplex, ...]
    facet_names: tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        verts = tuple(sorted(tuple(sorted(v)) for v in self.vertices))
        object.__setattr__(self, "vertices", verts)
        if not self.facet_names:
            object.__setattr__(self, "facet_names", tuple(f"F{i}" for i in range(1, self.d + 1)))
        _validate(self)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SimplePolytope):
            return NotImplemented
        return (self.name, self.n, self.d, self.vertices) == (other.name, other.n, other.d, other.vertices)

    def __hash__(self) -> int:
        return hash((self.name, self.n, self.d, self.vertices))

    def __getstate__(self):
        return {k: getattr(self, k) for k in ("name", "n", "d", "vertices", "facet_names")}

    def __setstate__(self, state):
        for k, v in state.items():
            object.__setattr__(self, k, v)

    @property
    def k(self) -> int:
        return self.d - self.n

    @cached_property
    def face_set(self) -> frozenset[Simplex]:
        out = set()
        for v in self.vertices:
            for size in range(len(v) + 1):
                out.update(itertools.combinations(v, size))
        return frozenset(out)

    @cached_property
    def cofaces(self) -> dict[Simplex, tuple[Simplex, ...]]:
        """sigma -> the faces sigma + {j} of K_P, ordered by j."""
        up: dict[Simplex, list[Simplex]] = defaultdict(list)
        for tau in self.face_set:
            for x in range(len(tau)):
                up[tau[:x] + tau[x + 1 :]].append(tau)
        return {s: tuple(sorted(ts)) for s, ts in up.items()}

    def is_face(self, sigma: Iterable[int]) -> bool:
        return tuple(sorted(sigma)) in self.face_set

    def to_json(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "n": self.n,
            "d": self.d,
            "facet_names": list(self.facet_names),
            "vertices": [list(v) for v in self.vertices],
        }

    def __repr__(self) -> str:
        return f"SimplePolytope({self.name!r}, n={self.n}, d={self.d}, vertices={len(self.vertices)})"


def _validate(p: SimplePolytope) -> None:
    if p.n < 1:
        raise SchemaError(f"{p.name}: dimension n={p.n} must be >= 1")
    if p.d < p.n + 1:
        raise SchemaError(f"{p.name}: need d >= n+1, got n={p.n} d={p.d}")
    if len(p.facet_names) != p.d:
        raise SchemaError(f"{p.name}: {len(p.facet_names)} facet names for d={p.d}")
    if not p.vertices:
        raise SchemaError(f"{p.name}: no vertices")
    for v in p.vertices:
        if len(v) != p.n or len(set(v)) != p.n:
            raise VertexCardinalityError(f"{p.name}: vertex {list(v)} does not have exactly {p.n} distinct facets")
        if not all(1 <= i <= p.d for i in v):
            raise SchemaError(f"{p.name}: vertex {list(v)} has a facet index outside 1..{p.d}")
    if len(set(p.vertices)) != len(p.vertices):
        raise SchemaError(f"{p.name}: duplicate vertex")

    used = {i for v in p.vertices for i in v}
    missing = sorted(set(range(1, p.d + 1)) - used)
    if missing:
        raise UnusedFacetError(f"{p.name}: facet {missing[0]} is not incident to any vertex")

    ridges: dict[Simplex, list[int]] = defaultdict(list)
    for idx, v in enumerate(p.vertices):
        for r in itertools.combinations(v, p.n - 1):
            ridges[r].append(idx)
    for r, owners in sorted(ridges.items()):
        if len(owners) != 2:
            where = ", ".join(str(list(p.vertices[o])) for o in owners)
            raise RidgeConditionError(
                f"{p.name}: ridge {list(r)} lies in {len(owners)} vertices ({where}); expected exactly 2"
            )

    seen = {0}
    stack = [0]
    adj: dict[int, list[int]] = defaultdict(list)
    for a, b in ridges.values():
        adj[a].append(b)
        adj[b].append(a)
    while stack:
        for nb in adj[stack.pop()]:
            if nb not in seen:
                seen.add(nb)
                stack.append(nb)
    if len(seen) != len(p.vertices):
        stray = next(v for i, v in enumerate(p.vertices) if i not in seen)
        raise DisconnectedError(f"{p.name}: vertex {list(stray)} is not connected to vertex {list(p.vertices[0])}")


def parse_polytope(document: dict[str, Any] | str, strict: bool = False) -> SimplePolytope:
    """Build a validated polytope from its JSON document (dict or JSON text)."""
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"malformed JSON: {exc}") from exc
    if not isinstance(document, dict):
        raise SchemaError("polytope document must be a JSON object")
    extra = sorted(set(document) - POLYTOPE_FIELDS)
    if extra:
        msg = f"unknown polytope field(s): {', '.join(extra)}"
        if strict:
            raise SchemaError(msg)
        warnings.warn(msg, UnknownFieldWarning, stacklevel=2)
    for key, typ in (("n", int), ("d", int), ("vertices", list)):
        if key not in document:
            raise SchemaError(f"missing field {key!r}")
        if not isinstance(document[key], typ) or isinstance(document[key], bool):
            raise SchemaError(f"field {key!r} must be {typ.__name__}")
    verts = []
    for i, v in enumerate(document["vertices"]):
        if not isinstance(v, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in v):
            raise SchemaError(f"vertices[{i}] must be a list of integers")
        verts.append(tuple(v))
    names = document.get("facet_names") or ()
    if not isinstance(names, (list, tuple)) or not all(isinstance(s, str) for s in names):
        raise SchemaError("facet_names must be a list of strings")
    return SimplePolytope(
        name=str(document.get("name", "polytope")),
        n=document["n"],
        d=document["d"],
        vertices=tuple(verts),
        facet_names=tuple(names),
    )


def load_polytope(path: str | Path, strict: bool = False) -> SimplePolytope:
    return parse_polytope(Path(path).read_text(), strict=strict)


def faces(p: SimplePolytope) -> list[Face]:
    """All faces, ordered by codimension |sigma| and then lexicographically."""
    return [Face(s, p.n - len(s)) for s in sorted(p.face_set, key=lambda s: (len(s), s))]


def fh_vector(p: SimplePolytope) -> FHVector:
    # by_codim[j] = faces of codimension j = (j-1)-simplices of K_P
    by_codim = [0] * (p.n + 1)
    for s in p.face_set:
        by_codim[len(s)] += 1
    f = tuple(by_codim[p.n - i] for i in range(p.n))
    # sum_i h_i t^i = sum_j by_codim[j] (t-1)^(n-j)
    h = [0] * (p.n + 1)
    for j, count in enumerate(by_codim):
        e = p.n - j
        for i in range(e + 1):
            h[i] += count * comb(e, i) * (-1) ** (e - i)
    return FHVector(f, tuple(h))


def simplex(n: int) -> SimplePolytope:
    if n < 1:
        raise ValueError(f"simplex dimension must be >= 1, got {n}")
    facets = range(1, n + 2)
    return SimplePolytope(f"simplex{n}", n, n + 1, tuple(itertools.combinations(facets, n)))


def cube(n: int) -> SimplePolytope:
    """n-cube; facet i is opposite facet i+n."""
    if n < 1:
        raise ValueError(f"cube dimension must be >= 1, got {n}")
    verts = tuple(tuple(i + n * c for i, c in zip(range(1, n + 1), choice)) for choice in itertools.product((0, 1), repeat=n))
    return SimplePolytope(f"cube{n}", n, 2 * n, verts)


def polygon(m: int) -> SimplePolytope:
    if m < 3:
        raise ValueError(f"polygon needs at least 3 sides, got {m}")
    return SimplePolytope(f"polygon{m}", 2, m, tuple((i, i % m + 1) for i in range(1, m + 1)))


def product(p: SimplePolytope, q: SimplePolytope, name: str | None = None) -> SimplePolytope:
    """Product polytope; facets of ``q`` are shifted by ``p.d``."""
    verts = tuple(a + tuple(j + p.d for j in b) for a in p.vertices for b in q.vertices)
    names = p.facet_names + q.facet_names
    if len(set(names)) != len(names):
        names = ()
    return SimplePolytope(name or f"{p.name}x{q.name}", p.n + q.n, p.d + q.d, verts, names)


def pentagonal_prism() -> SimplePolytope:
    return product(polygon(5), simplex(1), name="pentagonal_prism")


# Dual of the dodecahedron: the icosahedron's 20 triangles on 12 vertices.
ICOSAHEDRON_TRIANGLES: tuple[Simplex, ...] = (
    (1, 2, 3), (1, 3, 4), (1, 4, 5), (1, 5, 6), (1, 2, 6),
    (2, 3, 7), (3, 7, 8), (3, 4, 8), (4, 8, 9), (4, 5, 9),
    (5, 9, 10), (5, 6, 10), (6, 10, 11), (2, 6, 11), (2, 7, 11),
    (7, 8, 12), (8, 9, 12), (9, 10, 12), (10, 11, 12), (7, 11, 12),
)


def dodecahedron() -> SimplePolytope:
    return SimplePolytope("dodecahedron", 3, 12, ICOSAHEDRON_TRIANGLES)
