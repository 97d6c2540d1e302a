"""Lie closure of Pauli-string sets and pool-completeness certification.

Commutators of Pauli strings are (up to a scalar) single Pauli strings, so
the real Lie algebra generated by a set of strings has the closed set of
bare strings as a basis.  Completeness of a pool in a symmetry sector is
therefore a set comparison against an enumeration of that sector.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .pauli import PauliString, SymmetrySector, YParity
from .pools import TileSet, tile_pool_1d, tile_pool_2d

SECTOR_MAX_QUBITS = 12
CERTIFY_MAX_QUBITS = 10


class ResourceCapError(RuntimeError):
    pass


_LETTER_CODE = np.array([0, 1, 3, 2])  # indexed by x + 2z: I, X, Z, Y -> I<X<Y<Z


def _lex_key(x: np.ndarray, z: np.ndarray, n: int) -> np.ndarray:
    key = np.zeros(x.shape, dtype=np.int64)
    for q in range(n):
        key = key * 4 + _LETTER_CODE[((x >> q) & 1) + 2 * ((z >> q) & 1)]
    return key


def sector_basis(n: int, s: SymmetrySector) -> list[PauliString]:
    """Every non-identity string on ``n`` qubits in sector ``s``, in lexicographic order."""
    if not 1 <= n <= SECTOR_MAX_QUBITS:
        raise ValueError(f"sector enumeration supports 1..{SECTOR_MAX_QUBITS} qubits")
    if s.n_qubits != n:
        raise ValueError(f"sector is defined on {s.n_qubits} qubits, not {n}")
    sx, sz = s.stabilizer.x_mask, s.stabilizer.z_mask
    z = np.arange(1 << n, dtype=np.int64)
    xs_out, zs_out = [], []
    for x in range(1 << n):
        anti = np.bitwise_count((x & sz) ^ (z & sx)) & 1
        keep = anti == (0 if s.require_commute else 1)
        if s.y_parity is not YParity.ANY:
            odd = np.bitwise_count(x & z) & 1
            keep &= odd == (1 if s.y_parity is YParity.ODD else 0)
        if x == 0:
            keep[0] = False
        sel = z[keep]
        xs_out.append(np.full(sel.shape, x, dtype=np.int64))
        zs_out.append(sel)
    xs = np.concatenate(xs_out)
    zs = np.concatenate(zs_out)
    order = np.argsort(_lex_key(xs, zs, n), kind="stable")
    return [PauliString(n, int(xs[i]), int(zs[i])) for i in order]


def lie_closure(generators: Iterable[PauliString], limit: int | None = None) -> set[PauliString]:
    """Smallest commutator-closed set of bare strings containing ``generators``."""
    gens = [g.bare for g in generators]
    if not gens:
        return set()
    n = gens[0].n_qubits
    if any(g.n_qubits != n for g in gens):
        raise ValueError("generators act on different register sizes")
    if n > SECTOR_MAX_QUBITS:
        raise ResourceCapError(f"closure is limited to {SECTOR_MAX_QUBITS} qubits")
    limit = limit if limit is not None else 4 ** n
    xs = np.array([g.x_mask for g in gens], dtype=np.uint64)
    zs = np.array([g.z_mask for g in gens], dtype=np.uint64)
    mx, mz = _kernels.closure(xs, zs, n, limit)
    return {PauliString(n, int(x), int(z)) for x, z in zip(mx.tolist(), mz.tolist())}


@dataclass
class CompletenessReport:
    tile_size: int
    L2: int | list[int]
    pool_size: int
    closure_size: int
    sector_size: int
    complete: bool
    missing: list[str] = field(default_factory=list)
    extra: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def certify_tiled_completeness(tiles: TileSet, target: int | Sequence[int],
                               sector: SymmetrySector) -> CompletenessReport:
    """Tile ``tiles`` onto ``target`` and compare the pool's Lie closure with the sector.

    ``target`` is a chain length for chain tiles or ``(lx, ly)`` for 2x2
    tiles.  ``sector`` is the tile's sector; its all-Z stabilizer is
    extended to the target register.
    """
    if isinstance(target, int):
        pool = tile_pool_1d(tiles, target)
        label: int | list[int] = target
    else:
        lx, ly = target
        pool = tile_pool_2d(tiles, lx, ly)
        label = [lx, ly]
    n = pool.n_qubits
    if n > CERTIFY_MAX_QUBITS:
        raise ResourceCapError(f"direct closure certification is capped at {CERTIFY_MAX_QUBITS} qubits")
    big = sector.extended(n)
    basis = sector_basis(n, big)
    closed = lie_closure(pool.operators, limit=4 ** n)
    target_set = set(basis)
    missing = [p.label for p in basis if p not in closed]
    extra = sorted(p.label for p in closed - target_set)
    return CompletenessReport(
        tile_size=len(tiles.operators),
        L2=label,
        pool_size=len(pool),
        closure_size=len(closed),
        sector_size=len(basis),
        complete=not missing and not extra,
        missing=missing,
        extra=extra,
    )
