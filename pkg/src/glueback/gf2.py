"""Bit-packed linear algebra over GF(2).

Vectors are Python ints: coordinate ``i`` (0-based) lives in bit ``i``.  When
written as a bit string the leftmost character is coordinate 0, so ``"110"``
is ``0b011``.  Reduced row-echelon form uses the *lowest* set bit of each row
as its pivot, which makes pivots the leftmost ones of the string form.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

MAX_WIDTH = 64
ENUMERATE_RANK_LIMIT = 20


class WidthMismatchError(ValueError):
    pass


def _check_width(width: int) -> None:
    if not 0 <= width <= MAX_WIDTH:
        raise ValueError(f"width {width} outside [0, {MAX_WIDTH}]")


def parity(x: int) -> int:
    return bin(x).count("1") & 1


def bits_to_str(bits: int, width: int) -> str:
    return "".join("1" if bits >> i & 1 else "0" for i in range(width))


def str_to_bits(s: str) -> int:
    out = 0
    for i, ch in enumerate(s):
        if ch == "1":
            out |= 1 << i
        elif ch != "0":
            raise ValueError(f"not a bit string: {s!r}")
    return out


@dataclass(frozen=True, order=True)
class BitVector:
    """An element of (Z_2)^width packed into one int."""

    width: int
    bits: int = 0

    def __post_init__(self) -> None:
        _check_width(self.width)
        if self.bits < 0 or self.bits >> self.width:
            raise ValueError(f"bits {self.bits:#x} exceed width {self.width}")

    @classmethod
    def from_string(cls, s: str) -> BitVector:
        return cls(len(s), str_to_bits(s))

    @classmethod
    def unit(cls, i: int, width: int) -> BitVector:
        if not 0 <= i < width:
            raise IndexError(f"unit index {i} outside width {width}")
        return cls(width, 1 << i)

    @classmethod
    def zero(cls, width: int) -> BitVector:
        return cls(width, 0)

    def __add__(self, other: BitVector) -> BitVector:
        if self.width != other.width:
            raise WidthMismatchError(f"{self.width} != {other.width}")
        return BitVector(self.width, self.bits ^ other.bits)

    __xor__ = __add__

    def __bool__(self) -> bool:
        return self.bits != 0

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.width:
            raise IndexError(i)
        return self.bits >> i & 1

    def __str__(self) -> str:
        return bits_to_str(self.bits, self.width)

    def concat(self, other: BitVector) -> BitVector:
        """Block vector ``(self | other)``."""
        return BitVector(self.width + other.width, self.bits | other.bits << self.width)


def _common_width(vectors: Sequence[BitVector], width: int | None) -> int:
    widths = {v.width for v in vectors}
    if width is not None:
        widths.add(width)
    if len(widths) > 1:
        raise WidthMismatchError(f"mixed widths {sorted(widths)}")
    if not widths:
        raise ValueError("width required for an empty vector list")
    return widths.pop()


class GF2Matrix:
    """Dense GF(2) matrix; each row is an int whose bit ``j`` is column ``j``.

    Column counts are unbounded (boundary matrices have tens of thousands of
    columns); only :class:`BitVector` is held to :data:`MAX_WIDTH`.
    """

    __slots__ = ("rows", "ncols")

    def __init__(self, rows: Iterable[int], ncols: int):
        self.rows = tuple(rows)
        self.ncols = ncols
        limit = 1 << ncols
        for r in self.rows:
            if r < 0 or r >= limit:
                raise WidthMismatchError(f"row {r:#x} wider than {ncols} columns")

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.rows), self.ncols)

    @classmethod
    def from_vectors(cls, rows: Sequence[BitVector], ncols: int | None = None) -> GF2Matrix:
        width = _common_width(rows, ncols)
        return cls((v.bits for v in rows), width)

    @classmethod
    def from_entries(cls, nrows: int, ncols: int, entries: Iterable[tuple[int, int]]) -> GF2Matrix:
        rows = [0] * nrows
        for i, j in entries:
            rows[i] ^= 1 << j
        return cls(rows, ncols)

    @classmethod
    def from_columns(cls, nrows: int, columns: Sequence[int]) -> GF2Matrix:
        rows = [0] * nrows
        for j, col in enumerate(columns):
            while col:
                low = col & -col
                rows[low.bit_length() - 1] |= 1 << j
                col ^= low
        return cls(rows, len(columns))

    @classmethod
    def identity(cls, n: int) -> GF2Matrix:
        return cls((1 << i for i in range(n)), n)

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> GF2Matrix:
        return cls([0] * nrows, ncols)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GF2Matrix):
            return NotImplemented
        return self.ncols == other.ncols and self.rows == other.rows

    def __hash__(self) -> int:
        return hash((self.rows, self.ncols))

    def __repr__(self) -> str:
        return f"GF2Matrix({self.nrows}x{self.ncols})"

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.rows[i] >> j & 1

    def columns(self) -> list[int]:
        cols = [0] * self.ncols
        for i, row in enumerate(self.rows):
            while row:
                low = row & -row
                cols[low.bit_length() - 1] |= 1 << i
                row ^= low
        return cols

    def transpose(self) -> GF2Matrix:
        return GF2Matrix(self.columns(), self.nrows)

    def apply(self, v: int | BitVector) -> int:
        """Matrix-vector product; returns the packed result."""
        if isinstance(v, BitVector):
            if v.width != self.ncols:
                raise WidthMismatchError(f"vector width {v.width} != {self.ncols} columns")
            v = v.bits
        out = 0
        for i, row in enumerate(self.rows):
            if parity(row & v):
                out |= 1 << i
        return out

    def apply_vector(self, v: BitVector) -> BitVector:
        return BitVector(self.nrows, self.apply(v))

    def __matmul__(self, other: GF2Matrix) -> GF2Matrix:
        if self.ncols != other.nrows:
            raise WidthMismatchError(f"cannot multiply {self.shape} by {other.shape}")
        out = []
        for row in self.rows:
            acc = 0
            while row:
                low = row & -row
                acc ^= other.rows[low.bit_length() - 1]
                row ^= low
            out.append(acc)
        return GF2Matrix(out, other.ncols)

    def is_zero(self) -> bool:
        return not any(self.rows)

    def to_strings(self) -> list[str]:
        return [bits_to_str(r, self.ncols) for r in self.rows]


def rank_of_rows(rows: Iterable[int]) -> int:
    """GF(2) rank of packed rows.

    Elimination keyed on the highest set bit with a pivot dictionary, so only
    rows that actually collide are touched.  Boundary matrices stay sparse
    under this scheme, which is what keeps large complexes cheap.
    """
    pivots: dict[int, int] = {}
    for row in rows:
        while row:
            top = row.bit_length() - 1
            p = pivots.get(top)
            if p is None:
                pivots[top] = row
                break
            row ^= p
    return len(pivots)


def rank(m: GF2Matrix) -> int:
    return rank_of_rows(m.rows)


@dataclass(frozen=True)
class Subspace:
    """A subspace of (Z_2)^ambient_width held as an RREF basis."""

    ambient_width: int
    basis: tuple[int, ...] = ()
    pivots: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        _check_width(self.ambient_width)
        if len(self.basis) != len(self.pivots):
            raise ValueError("basis and pivots differ in length")
        if any(b >= p for b, p in zip(self.pivots, self.pivots[1:])):
            raise ValueError("pivots must be strictly increasing")
        pivot_mask = sum(1 << p for p in self.pivots)
        for row, p in zip(self.basis, self.pivots):
            if (row & -row) != 1 << p or row & pivot_mask != 1 << p or row >> self.ambient_width:
                raise ValueError("basis is not in reduced row-echelon form")

    @classmethod
    def zero(cls, width: int) -> Subspace:
        return cls(width)

    @classmethod
    def full(cls, width: int) -> Subspace:
        return cls(width, tuple(1 << i for i in range(width)), tuple(range(width)))

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def free_positions(self) -> tuple[int, ...]:
        taken = set(self.pivots)
        return tuple(i for i in range(self.ambient_width) if i not in taken)

    def basis_vectors(self) -> list[BitVector]:
        return [BitVector(self.ambient_width, b) for b in self.basis]

    def reduce(self, v: int) -> int:
        """Clear every pivot bit of ``v``; the canonical coset representative."""
        for row, p in zip(self.basis, self.pivots):
            if v >> p & 1:
                v ^= row
        return v

    def __contains__(self, v: int | BitVector) -> bool:
        if isinstance(v, BitVector):
            if v.width != self.ambient_width:
                raise WidthMismatchError(f"{v.width} != {self.ambient_width}")
            v = v.bits
        return self.reduce(v) == 0

    def issubspace(self, other: Subspace) -> bool:
        if self.ambient_width != other.ambient_width:
            raise WidthMismatchError(f"{self.ambient_width} != {other.ambient_width}")
        return all(b in other for b in self.basis)

    def __add__(self, other: Subspace) -> Subspace:
        if self.ambient_width != other.ambient_width:
            raise WidthMismatchError(f"{self.ambient_width} != {other.ambient_width}")
        return span_bits(self.basis + other.basis, self.ambient_width)

    def __str__(self) -> str:
        inner = ", ".join(bits_to_str(b, self.ambient_width) for b in self.basis)
        return f"<{inner}> in (Z2)^{self.ambient_width}"


def span_bits(vectors: Iterable[int], width: int) -> Subspace:
    """RREF span of packed vectors of a known width."""
    _check_width(width)
    rows: dict[int, int] = {}  # pivot -> row
    for v in vectors:
        if v >> width:
            raise WidthMismatchError(f"vector {v:#x} wider than {width}")
        for p in sorted(rows):
            if v >> p & 1:
                v ^= rows[p]
        if not v:
            continue
        p = (v & -v).bit_length() - 1
        for q in rows:
            if rows[q] >> p & 1:
                rows[q] ^= v
        rows[p] = v
    order = sorted(rows)
    return Subspace(width, tuple(rows[p] for p in order), tuple(order))


def span(vectors: Sequence[BitVector], width: int | None = None) -> Subspace:
    """All GF(2) combinations of ``vectors``.

    ``width`` is only needed when ``vectors`` is empty.
    """
    w = _common_width(vectors, width)
    return span_bits((v.bits for v in vectors), w)


def _subspace_arg(v: BitVector, s: Subspace) -> None:
    if v.width != s.ambient_width:
        raise WidthMismatchError(f"vector width {v.width} != subspace width {s.ambient_width}")


def coset_rep(v: BitVector, s: Subspace) -> BitVector:
    _subspace_arg(v, s)
    return BitVector(v.width, s.reduce(v.bits))


def coset_count(s: Subspace) -> int:
    return 1 << (s.ambient_width - s.rank)


def coset_index_bits(v: int, s: Subspace) -> int:
    rep = s.reduce(v)
    idx = 0
    for t, pos in enumerate(s.free_positions):
        idx |= (rep >> pos & 1) << t
    return idx


def coset_index(v: BitVector, s: Subspace) -> int:
    """Dense index of the coset of ``v``: its free bits, lowest coordinate first."""
    _subspace_arg(v, s)
    return coset_index_bits(v.bits, s)


def rep_of_index_bits(i: int, s: Subspace) -> int:
    if not 0 <= i < coset_count(s):
        raise IndexError(f"coset index {i} outside [0, {coset_count(s)})")
    rep = 0
    for t, pos in enumerate(s.free_positions):
        rep |= (i >> t & 1) << pos
    return rep


def rep_of_index(i: int, s: Subspace) -> BitVector:
    return BitVector(s.ambient_width, rep_of_index_bits(i, s))


def enumerate_subspace_bits(s: Subspace) -> Iterator[int]:
    if s.rank > ENUMERATE_RANK_LIMIT:
        raise ValueError(f"refusing to enumerate 2^{s.rank} elements (limit 2^{ENUMERATE_RANK_LIMIT})")
    for mask in range(1 << s.rank):
        v = 0
        for t, row in enumerate(s.basis):
            if mask >> t & 1:
                v ^= row
        yield v


def enumerate_subspace(s: Subspace) -> list[BitVector]:
    """Every element of ``s``; element ``t`` is the sum of basis rows picked by the bits of ``t``."""
    return [BitVector(s.ambient_width, v) for v in enumerate_subspace_bits(s)]


def quotient_projection(h: Subspace) -> GF2Matrix:
    """Surjection (Z_2)^r -> (Z_2)^(r - rank h) with kernel ``h``.

    ``Q @ v`` is the free-coordinate part of ``coset_rep(v, h)``.
    """
    free = h.free_positions
    rows = []
    for pos in free:
        row = 1 << pos
        for b, p in zip(h.basis, h.pivots):
            if b >> pos & 1:
                row |= 1 << p
        rows.append(row)
    return GF2Matrix(rows, h.ambient_width)


def _echelon_with_history(vectors: Sequence[int]):
    """Yield ``(i, relation)`` for each vector; relation is a mask over indices when dependent."""
    pivots: dict[int, tuple[int, int]] = {}  # top bit -> (row, history mask)
    for i, v in enumerate(vectors):
        hist = 1 << i
        while v:
            top = v.bit_length() - 1
            hit = pivots.get(top)
            if hit is None:
                pivots[top] = (v, hist)
                break
            v ^= hit[0]
            hist ^= hit[1]
        yield i, (None if v else hist), pivots


def solve_label_isomorphism(
    a: Sequence[BitVector],
    b: Sequence[BitVector],
    width_a: int | None = None,
    width_b: int | None = None,
) -> GF2Matrix | None:
    """Find a linear map ``phi`` with ``phi(a[i]) == b[i]`` that is injective on span(a).

    Returns a ``width_b x width_a`` matrix or ``None`` if the linear relations
    among ``a`` and ``b`` differ.  Off span(a) the map is extended by sending
    unused unit vectors to unit vectors outside span(b), so it is an
    automorphism whenever the widths match and is otherwise as injective as the
    widths allow.
    """
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} labels vs {len(b)}")
    wa = _common_width(a, width_a)
    wb = _common_width(b, width_b)
    av = [v.bits for v in a]
    bv = [v.bits for v in b]

    independent: list[int] = []
    for i, relation, _ in _echelon_with_history(av):
        if relation is None:
            independent.append(i)
            continue
        img = 0
        for j in range(len(bv)):
            if relation >> j & 1:
                img ^= bv[j]
        if img:
            return None
    images = [bv[i] for i in independent]
    if rank_of_rows(images) != len(images):
        return None

    # extend both bases with unit vectors, lowest coordinate first
    dom = [av[i] for i in independent]
    img_span = span_bits(images, wb)
    for c in range(wa):
        if rank_of_rows(dom + [1 << c]) > len(dom):
            dom.append(1 << c)
            image = 0
            for e in range(wb):
                if (1 << e) not in img_span:
                    image = 1 << e
                    img_span = img_span + span_bits([image], wb)
                    break
            images.append(image)

    # phi(e_c) = sum of images over the expansion of e_c in the domain basis
    cols = []
    for c in range(wa):
        seq = dom + [1 << c]
        *_, (_, relation, _) = _echelon_with_history(seq)
        col = 0
        for j in range(len(dom)):
            if relation >> j & 1:
                col ^= images[j]
        cols.append(col)
    phi = GF2Matrix.from_columns(wb, cols)
    assert all(phi.apply(x) == y for x, y in zip(av, bv))
    return phi


def block_diagonal(*blocks: GF2Matrix) -> GF2Matrix:
    rows: list[int] = []
    col_off = 0
    for blk in blocks:
        rows.extend(r << col_off for r in blk.rows)
        col_off += blk.ncols
    return GF2Matrix(rows, col_off)
