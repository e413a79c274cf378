"""Built-in polytopes with characteristic functions.

Entry names are stable; acceptance runs and ``glueback corpus`` rely on them.
"""

from __future__ import annotations

from dataclasses import dataclass

from .coloring import CharacteristicFunction, default_v0, validate_characteristic
from .gf2 import BitVector
from .polytope import Simplex, SimplePolytope, cube, dodecahedron, pentagonal_prism, polygon, simplex


@dataclass(frozen=True)
class CorpusEntry:
    """A polytope with characteristic labels.

    Labels are kept as raw bit strings so a broken entry surfaces as a
    validation report instead of failing at import.
    """

    name: str
    polytope: SimplePolytope
    mu_labels: tuple[str, ...]
    v0: Simplex = ()

    @property
    def base_vertex(self) -> Simplex:
        return tuple(self.v0) or default_v0(self.polytope)

    def mu(self) -> CharacteristicFunction:
        return validate_characteristic(self.polytope, self.mu_labels)


def _unit(i: int, n: int) -> str:
    return str(BitVector.unit(i, n))


def simplex_mu(n: int) -> tuple[str, ...]:
    """e_1, ..., e_n and e_1 + ... + e_n (real projective space)."""
    return tuple(_unit(i, n) for i in range(n)) + ("1" * n,)


def cube_mu(n: int) -> tuple[str, ...]:
    """Opposite facets i and i+n share e_i (the real torus)."""
    return tuple(_unit(i % n, n) for i in range(2 * n))


def polygon_mu(m: int) -> tuple[str, ...]:
    """Alternate e1, e2; an odd polygon closes with e1+e2."""
    labels = ["10" if i % 2 == 0 else "01" for i in range(m)]
    if m % 2:
        labels[-1] = "11"
    return tuple(labels)


KLEIN_SQUARE_MU = ("10", "01", "11", "01")
TORUS_SQUARE_MU = ("10", "01", "10", "01")
RP2_TRIANGLE_MU = ("10", "01", "11")

# proper 4-coloring of the icosahedron's vertices; any three of these are independent
_DODECA_COLORS = (0, 1, 2, 1, 2, 3, 3, 0, 3, 0, 2, 1)
_DODECA_LABELS = ("100", "010", "001", "111")


def dodecahedron_mu() -> tuple[str, ...]:
    return tuple(_DODECA_LABELS[c] for c in _DODECA_COLORS)


def prism_mu() -> tuple[str, ...]:
    # polygon(5) labels in the first two coordinates, segment facets get e3
    return tuple(s + "0" for s in polygon_mu(5)) + ("001", "001")


def builtin_corpus() -> list[CorpusEntry]:
    entries = [CorpusEntry(f"simplex{n}", simplex(n), simplex_mu(n)) for n in (2, 3, 4)]
    entries += [CorpusEntry(f"cube{n}", cube(n), cube_mu(n)) for n in (2, 3, 4)]
    entries += [CorpusEntry(f"polygon{m}", polygon(m), polygon_mu(m)) for m in range(3, 9)]
    entries.append(CorpusEntry("polygon4_klein", polygon(4), KLEIN_SQUARE_MU))
    entries.append(CorpusEntry("pentagonal_prism", pentagonal_prism(), prism_mu()))
    entries.append(CorpusEntry("dodecahedron", dodecahedron(), dodecahedron_mu()))
    return entries


def corpus_entry(name: str) -> CorpusEntry:
    for e in builtin_corpus():
        if e.name == name:
            return e
    raise KeyError(f"no built-in corpus entry named {name!r}")
