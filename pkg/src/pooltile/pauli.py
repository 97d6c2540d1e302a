"""Symplectic Pauli-string algebra.

A Pauli string on ``n`` qubits is stored as two bit masks: bit ``i`` of
``x_mask`` is set when qubit ``i`` carries X or Y, bit ``i`` of ``z_mask``
when it carries Z or Y.  A global factor ``i**phase_exp`` is tracked
separately, so ``Y`` on one qubit is ``(x=1, z=1, phase_exp=0)`` and the
product ``X*Y`` comes out as ``(x=0, z=1, phase_exp=1)``, i.e. ``iZ``.

Textual form puts qubit 0 leftmost: ``"IXY"`` has X on qubit 1 and Y on
qubit 2.  An optional prefix ``+i``, ``-i`` or ``-1`` encodes the phase.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

MAX_QUBITS = 64

_LETTERS = "IXZY"  # indexed by x_bit + 2*z_bit
_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_PREFIX_TO_PHASE = {"": 0, "+": 0, "+1": 0, "+i": 1, "i": 1, "-1": 2, "-": 2, "-i": 3}
_PHASE_TO_PREFIX = {0: "", 1: "+i", 2: "-1", 3: "-i"}


def _popcount(v: int) -> int:
    return bin(v).count("1")


@dataclass(frozen=True, order=True)
class PauliString:
    """Immutable n-qubit Pauli operator ``i**phase_exp * P``."""

    n_qubits: int
    x_mask: int
    z_mask: int
    phase_exp: int = 0

    def __post_init__(self):
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise ValueError(f"n_qubits must be in [1, {MAX_QUBITS}], got {self.n_qubits}")
        limit = 1 << self.n_qubits
        if not (0 <= self.x_mask < limit and 0 <= self.z_mask < limit):
            raise ValueError("masks use bits beyond n_qubits")
        if not 0 <= self.phase_exp < 4:
            object.__setattr__(self, "phase_exp", self.phase_exp % 4)

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        """Parse ``"ZXY"``, ``"-iXX"``, ``"+iZ"`` ... (qubit 0 is leftmost)."""
        text = label.strip()
        split = len(text)
        for k, ch in enumerate(text):
            if ch in "IXYZ":
                split = k
                break
        prefix, letters = text[:split], text[split:]
        if prefix not in _PREFIX_TO_PHASE:
            raise ValueError(f"bad phase prefix {prefix!r} in {label!r}")
        if not letters or any(ch not in _BITS for ch in letters):
            raise ValueError(f"bad Pauli label {label!r}")
        x = z = 0
        for i, ch in enumerate(letters):
            xb, zb = _BITS[ch]
            x |= xb << i
            z |= zb << i
        return cls(len(letters), x, z, _PREFIX_TO_PHASE[prefix])

    @classmethod
    def identity(cls, n_qubits: int) -> "PauliString":
        return cls(n_qubits, 0, 0, 0)

    @property
    def letters(self) -> str:
        return "".join(
            _LETTERS[((self.x_mask >> i) & 1) + 2 * ((self.z_mask >> i) & 1)]
            for i in range(self.n_qubits)
        )

    @property
    def label(self) -> str:
        return _PHASE_TO_PREFIX[self.phase_exp] + self.letters

    def __str__(self) -> str:
        return self.label

    def __repr__(self) -> str:
        return f"PauliString({self.label!r})"

    @property
    def bare(self) -> "PauliString":
        """The same string with the phase dropped."""
        if self.phase_exp == 0:
            return self
        return PauliString(self.n_qubits, self.x_mask, self.z_mask, 0)

    @property
    def support(self) -> int:
        return self.x_mask | self.z_mask

    @property
    def weight(self) -> int:
        return _popcount(self.support)

    @property
    def y_count(self) -> int:
        return _popcount(self.x_mask & self.z_mask)

    def is_identity(self) -> bool:
        return self.support == 0

    def __mul__(self, other: "PauliString") -> "PauliString":
        return multiply(self, other)

    def to_matrix(self):
        """Dense ``2**n x 2**n`` matrix with qubit ``i`` on bit ``i`` of the basis index."""
        import numpy as np

        dim = 1 << self.n_qubits
        idx = np.arange(dim, dtype=np.int64)
        signs = 1.0 - 2.0 * (np.bitwise_count(idx & self.z_mask) & 1)
        phase = 1j ** ((self.phase_exp + self.y_count) % 4)
        mat = np.zeros((dim, dim), dtype=complex)
        mat[idx ^ self.x_mask, idx] = phase * signs
        return mat


def _check_sizes(a: PauliString, b: PauliString) -> None:
    if a.n_qubits != b.n_qubits:
        raise ValueError(f"size mismatch: {a.n_qubits} vs {b.n_qubits} qubits")


def multiply(a: PauliString, b: PauliString) -> PauliString:
    """Operator product ``a @ b`` with the phase folded into ``phase_exp``."""
    _check_sizes(a, b)
    x = a.x_mask ^ b.x_mask
    z = a.z_mask ^ b.z_mask
    # P = i^(phase + y) X^x Z^z ; Z^z1 X^x2 = (-1)^{|z1 & x2|} X^x2 Z^z1
    exp = (
        a.phase_exp + b.phase_exp
        + _popcount(a.x_mask & a.z_mask) + _popcount(b.x_mask & b.z_mask)
        - _popcount(x & z)
        + 2 * _popcount(a.z_mask & b.x_mask)
    )
    return PauliString(a.n_qubits, x, z, exp % 4)


def commutes(a: PauliString, b: PauliString) -> bool:
    _check_sizes(a, b)
    return _popcount((a.x_mask & b.z_mask) ^ (a.z_mask & b.x_mask)) % 2 == 0


def commutator(a: PauliString, b: PauliString) -> PauliString | None:
    """Bare string proportional to ``[a, b]``, or ``None`` when they commute.

    The scalar ``2 i**k`` is dropped; only the string matters for closure.
    """
    if commutes(a, b):
        return None
    return multiply(a, b).bare


class YParity(str, enum.Enum):
    ODD = "odd"
    EVEN = "even"
    ANY = "any"


@dataclass(frozen=True)
class SymmetrySector:
    """Pauli strings with a fixed commutation relation to ``stabilizer`` and fixed Y parity."""

    stabilizer: PauliString
    require_commute: bool = True
    y_parity: YParity = YParity.ODD

    def __post_init__(self):
        if self.stabilizer.phase_exp != 0:
            raise ValueError("sector stabilizer must be a bare string")
        object.__setattr__(self, "y_parity", YParity(self.y_parity))

    @property
    def n_qubits(self) -> int:
        return self.stabilizer.n_qubits

    def extended(self, n_total: int) -> "SymmetrySector":
        """Same sector with an all-Z stabilizer on ``n_total`` qubits.

        Only meaningful for all-Z stabilizers, which is the XXZ case.
        """
        if self.stabilizer.x_mask or self.stabilizer.z_mask != (1 << self.n_qubits) - 1:
            raise ValueError("only all-Z stabilizers can be extended")
        return SymmetrySector(all_z(n_total), self.require_commute, self.y_parity)


def all_z(n: int) -> PauliString:
    return PauliString(n, 0, (1 << n) - 1)


def in_sector(p: PauliString, s: SymmetrySector) -> bool:
    if commutes(p, s.stabilizer) != s.require_commute:
        return False
    if s.y_parity is YParity.ANY:
        return True
    odd = p.y_count % 2 == 1
    return odd if s.y_parity is YParity.ODD else not odd


def embed(p: PauliString, n_total: int, offset: int) -> PauliString:
    """Pad ``p`` with identities so its qubit 0 lands on ``offset``."""
    if offset < 0 or offset + p.n_qubits > n_total:
        raise ValueError(f"cannot embed {p.n_qubits} qubits at offset {offset} into {n_total}")
    return PauliString(n_total, p.x_mask << offset, p.z_mask << offset, p.phase_exp)


def permute_support(p: PauliString, site_map: Sequence[int], n_total: int | None = None) -> PauliString:
    """Place letter ``k`` of ``p`` on qubit ``site_map[k]`` of an ``n_total`` register.

    ``n_total`` defaults to ``p.n_qubits``.
    """
    n_total = p.n_qubits if n_total is None else n_total
    if len(site_map) != p.n_qubits:
        raise ValueError("site_map must have one entry per qubit of p")
    if len(set(site_map)) != len(site_map):
        raise ValueError(f"duplicate targets in site_map {list(site_map)}")
    x = z = 0
    for k, target in enumerate(site_map):
        if not 0 <= target < n_total:
            raise ValueError(f"target {target} outside register of {n_total} qubits")
        x |= ((p.x_mask >> k) & 1) << target
        z |= ((p.z_mask >> k) & 1) << target
    return PauliString(n_total, x, z, p.phase_exp)


def parse_many(labels: Iterable[str]) -> list[PauliString]:
    return [PauliString.from_label(s) for s in labels]
