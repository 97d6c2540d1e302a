"""Operator pools: the full Pauli pool and pools tiled from a harvested tile set."""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .pauli import PauliString, embed, permute_support

FULL_POOL_MAX_QUBITS = 8


class Provenance(str, enum.Enum):
    FULL_PAULI = "full_pauli"
    TILED = "tiled"
    EXPLICIT = "explicit"


def _dedupe(ops: Iterable[PauliString]) -> list[PauliString]:
    return list(dict.fromkeys(ops))


@dataclass(frozen=True)
class OperatorPool:
    n_qubits: int
    operators: tuple[PauliString, ...]
    provenance: Provenance = Provenance.EXPLICIT
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        ops = tuple(self.operators)
        object.__setattr__(self, "operators", ops)
        object.__setattr__(self, "provenance", Provenance(self.provenance))
        if len(set(ops)) != len(ops):
            raise ValueError("pool contains duplicate operators")
        for p in ops:
            if p.n_qubits != self.n_qubits:
                raise ValueError(f"pool operator {p} is not on {self.n_qubits} qubits")
            if p.phase_exp != 0:
                raise ValueError(f"pool operator {p} carries a phase")
            if p.is_identity():
                raise ValueError("pool contains the identity")

    @classmethod
    def explicit(cls, operators: Iterable[PauliString | str]) -> "OperatorPool":
        ops = [PauliString.from_label(p) if isinstance(p, str) else p for p in operators]
        if not ops:
            raise ValueError("empty pool")
        return cls(ops[0].n_qubits, tuple(_dedupe(ops)), Provenance.EXPLICIT)

    def __len__(self) -> int:
        return len(self.operators)

    def __iter__(self):
        return iter(self.operators)

    @property
    def labels(self) -> list[str]:
        return [p.label for p in self.operators]

    def to_text(self) -> str:
        return "".join(p.label + "\n" for p in self.operators)


def _format_shape(shape: Sequence[int]) -> str:
    return "x".join(str(s) for s in shape)


@dataclass(frozen=True)
class TileSet:
    """Operators harvested on a small tile.

    ``tile_shape`` is ``(k,)`` for a k-site chain or ``(rx, ry)`` for a block.
    """

    tile_shape: tuple[int, ...]
    operators: tuple[PauliString, ...]

    def __post_init__(self):
        ops = tuple(self.operators)
        object.__setattr__(self, "operators", ops)
        object.__setattr__(self, "tile_shape", tuple(int(s) for s in self.tile_shape))
        if not ops:
            raise ValueError("tile set is empty")
        if len(set(ops)) != len(ops):
            raise ValueError("tile set contains duplicates")
        n = self.tile_n_qubits
        if any(p.n_qubits != n or p.phase_exp != 0 for p in ops):
            raise ValueError(f"tile operators must be bare strings on {n} qubits")

    @property
    def tile_n_qubits(self) -> int:
        out = 1
        for s in self.tile_shape:
            out *= s
        return out

    @classmethod
    def from_labels(cls, labels: Iterable[str], shape: Sequence[int] | None = None) -> "TileSet":
        ops = [PauliString.from_label(s) for s in labels]
        if not ops:
            raise ValueError("tile set is empty")
        if shape is None:
            shape = (ops[0].n_qubits,)
        return cls(tuple(shape), tuple(ops))

    @property
    def labels(self) -> list[str]:
        return [p.label for p in self.operators]

    def to_text(self) -> str:
        head = f"# shape: {_format_shape(self.tile_shape)}\n"
        return head + "".join(p.label + "\n" for p in self.operators)

    @classmethod
    def from_text(cls, text: str) -> "TileSet":
        shape = None
        labels = []
        for line in text.splitlines():
            line = line.strip()
            if line.startswith("#"):
                key, _, value = line[1:].partition(":")
                if key.strip() == "shape":
                    shape = tuple(int(v) for v in value.strip().split("x"))
                continue
            if line:
                labels.append(line)
        return cls.from_labels(labels, shape)


def full_pauli_pool(n: int) -> OperatorPool:
    """All ``4**n - 1`` non-identity strings, in lexicographic label order."""
    if not 1 <= n <= FULL_POOL_MAX_QUBITS:
        raise ValueError(f"full Pauli pool supports 1..{FULL_POOL_MAX_QUBITS} qubits, got {n}")
    ops = [PauliString.from_label("".join(t)) for t in itertools.product("IXYZ", repeat=n)]
    return OperatorPool(n, tuple(ops[1:]), Provenance.FULL_PAULI)


def tile_pool_1d(tiles: TileSet, n_sites: int) -> OperatorPool:
    """Slide every tile operator across an ``n_sites`` chain (operator-major order)."""
    if len(tiles.tile_shape) != 1:
        raise ValueError("1D tiling needs a chain tile")
    k = tiles.tile_n_qubits
    if n_sites < k:
        raise ValueError(f"target chain of {n_sites} sites is shorter than the tile ({k})")
    ops = [embed(p, n_sites, off) for p in tiles.operators for off in range(n_sites - k + 1)]
    return OperatorPool(
        n_sites, tuple(_dedupe(ops)), Provenance.TILED,
        {"tile_shape": list(tiles.tile_shape), "tile_size": len(tiles.operators), "target": [n_sites]},
    )


def block_site_map(anchor_row: int, anchor_col: int, lx: int, order: str = "row") -> list[int]:
    """Lattice qubits covered by the 2x2 block anchored at ``(row, col)``.

    ``order="row"`` lists (r,c), (r,c+1), (r+1,c), (r+1,c+1); ``"column"``
    swaps the middle two.
    """
    r, c = anchor_row, anchor_col
    cells = [(r, c), (r, c + 1), (r + 1, c), (r + 1, c + 1)]
    if order == "column":
        cells = [cells[0], cells[2], cells[1], cells[3]]
    elif order != "row":
        raise ValueError(f"unknown block order {order!r}")
    return [rr * lx + cc for rr, cc in cells]


def tile_pool_2d(tiles: TileSet, lx: int, ly: int, block_order: str = "row") -> OperatorPool:
    """Place every 2x2 tile operator on each of the ``(lx-1)(ly-1)`` overlapping blocks."""
    if tiles.tile_shape != (2, 2):
        raise ValueError("2D tiling needs a 2x2 tile")
    if lx < 2 or ly < 2:
        raise ValueError("2D tiling needs a grid of at least 2x2")
    n = lx * ly
    anchors = [(r, c) for r in range(ly - 1) for c in range(lx - 1)]
    ops = [
        permute_support(p, block_site_map(r, c, lx, block_order), n)
        for p in tiles.operators
        for r, c in anchors
    ]
    return OperatorPool(
        n, tuple(_dedupe(ops)), Provenance.TILED,
        {"tile_shape": [2, 2], "tile_size": len(tiles.operators), "target": [lx, ly],
         "block_order": block_order},
    )


def harvest_tiles(records: Sequence) -> TileSet:
    """Union of the generators chosen across ADAPT runs, in first-seen order."""
    if not records:
        raise ValueError("no records to harvest")
    shapes = {tuple(r.geometry) for r in records}
    sizes = {r.n_qubits for r in records}
    if len(shapes) != 1 or len(sizes) != 1:
        raise ValueError(f"records disagree on geometry: {sorted(shapes)}")
    ops = _dedupe(p for r in records for p in r.selected_operators)
    return TileSet(shapes.pop(), tuple(ops))
