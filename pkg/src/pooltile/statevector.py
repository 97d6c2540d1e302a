"""Dense statevector simulation for Pauli-rotation circuits.

Amplitude ``b`` belongs to the basis state where qubit ``i`` is excited
iff bit ``i`` of ``b`` is set.  Spin up is the excited level |1>, so the
chain Neel state |up down up ...> has bits 0, 2, 4, ... set.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels
from .pauli import PauliString


class StateVector:
    """Normalized ``2**n`` complex amplitude vector."""

    __slots__ = ("n_qubits", "amplitudes")

    def __init__(self, amplitudes, n_qubits: int | None = None):
        amps = np.ascontiguousarray(amplitudes, dtype=np.complex128).reshape(-1)
        dim = amps.shape[0]
        n = dim.bit_length() - 1
        if dim != 1 << n or n < 1:
            raise ValueError(f"amplitude count {dim} is not a power of two >= 2")
        if n_qubits is not None and n_qubits != n:
            raise ValueError(f"{dim} amplitudes do not describe {n_qubits} qubits")
        self.n_qubits = n
        self.amplitudes = amps

    @classmethod
    def basis(cls, n_qubits: int, index: int) -> "StateVector":
        amps = np.zeros(1 << n_qubits, dtype=np.complex128)
        amps[index] = 1.0
        return cls(amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def copy(self) -> "StateVector":
        return StateVector(self.amplitudes.copy())

    def __repr__(self) -> str:
        return f"StateVector(n_qubits={self.n_qubits})"


class NeelConvention(str, enum.Enum):
    # "index": spin up on even qubit index, whatever the geometry
    INDEX = "index"
    # "checkerboard": spin up where row + column is even
    CHECKERBOARD = "checkerboard"


@dataclass(frozen=True)
class NeelSpec:
    """Geometry of an antiferromagnetic product reference state.

    ``shape`` is ``(L,)`` for a chain or ``(Lx, Ly)`` for a grid whose site
    ``(r, c)`` is qubit ``r * Lx + c``.  ``first_up`` picks which
    sublattice carries spin up.
    """

    shape: tuple[int, ...]
    convention: NeelConvention = NeelConvention.INDEX
    first_up: bool = True

    def __post_init__(self):
        object.__setattr__(self, "shape", tuple(int(s) for s in self.shape))
        object.__setattr__(self, "convention", NeelConvention(self.convention))

    @property
    def n_qubits(self) -> int:
        return int(np.prod(self.shape))

    def up_sites(self) -> list[int]:
        if len(self.shape) == 1 or self.convention is NeelConvention.INDEX:
            parity = [q % 2 for q in range(self.n_qubits)]
        else:
            lx, ly = self.shape
            parity = [(r + c) % 2 for r in range(ly) for c in range(lx)]
        want = 0 if self.first_up else 1
        return [q for q, p in enumerate(parity) if p == want]


def prepare_neel(spec: NeelSpec) -> StateVector:
    index = sum(1 << q for q in spec.up_sites())
    return StateVector.basis(spec.n_qubits, index)


def _check(state: StateVector, n: int) -> None:
    if state.n_qubits != n:
        raise ValueError(f"size mismatch: state has {state.n_qubits} qubits, operator {n}")


def apply_pauli(state: StateVector, p: PauliString) -> StateVector:
    _check(state, p.n_qubits)
    return StateVector(_kernels.apply_pauli(state.amplitudes, p.x_mask, p.z_mask, p.phase_exp))


def apply_rotation(state: StateVector, p: PauliString, theta: float) -> StateVector:
    """``exp(-i theta P)|psi> = cos(theta)|psi> - i sin(theta) P|psi>``."""
    _check(state, p.n_qubits)
    if p.phase_exp != 0:
        raise ValueError("rotation generator must be a bare Pauli string")
    return StateVector(_kernels.apply_rotation(state.amplitudes, p.x_mask, p.z_mask, float(theta)))


def expectation(state: StateVector, h) -> float:
    """``<psi|H|psi>`` for a :class:`~pooltile.lattice.PauliSum`."""
    _check(state, h.n_qubits)
    value = _kernels.expectation(state.amplitudes, h.x_masks, h.z_masks, h.coefficients)
    if abs(value.imag) > 1e-9:
        raise ArithmeticError(f"expectation has imaginary part {value.imag:.3e}")
    return float(value.real)


def pool_gradients(state: StateVector, h, pool: Sequence[PauliString]) -> np.ndarray:
    """ADAPT screening gradients ``i<psi|[A_k, H]|psi>`` for each pool element.

    One application of H is shared by the whole pool.
    """
    _check(state, h.n_qubits)
    for a in pool:
        _check(state, a.n_qubits)
    hpsi = _kernels.apply_pauli_sum(state.amplitudes, h.x_masks, h.z_masks, h.coefficients)
    xs = [a.x_mask for a in pool]
    zs = [a.z_mask for a in pool]
    return _kernels.pool_gradients(state.amplitudes, hpsi, xs, zs)
