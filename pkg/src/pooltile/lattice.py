"""XXZ Hamiltonians on open chains and grids, plus an exact ground-energy solver."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh

from . import _kernels
from .pauli import PauliString, SymmetrySector, YParity, all_z


class PauliSum:
    """Real-coefficient sum of bare Pauli strings, with duplicates merged."""

    def __init__(self, n_qubits: int, terms: Iterable[tuple[float, PauliString]] = ()):
        self.n_qubits = n_qubits
        merged: dict[PauliString, float] = {}
        for coeff, p in terms:
            if p.n_qubits != n_qubits:
                raise ValueError(f"term {p} does not act on {n_qubits} qubits")
            if p.phase_exp != 0:
                raise ValueError(f"term {p} must be a bare string")
            coeff = float(coeff)
            if not math.isfinite(coeff):
                raise ValueError(f"non-finite coefficient for {p}")
            merged[p] = merged.get(p, 0.0) + coeff
        self.terms: list[tuple[float, PauliString]] = [(c, p) for p, c in merged.items()]
        self.x_masks = np.array([p.x_mask for _, p in self.terms], dtype=np.uint64)
        self.z_masks = np.array([p.z_mask for _, p in self.terms], dtype=np.uint64)
        self.coefficients = np.array([c for c, _ in self.terms], dtype=np.float64)

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def as_dict(self) -> dict[str, float]:
        return {p.label: c for c, p in self.terms}

    def matvec(self, amplitudes: np.ndarray) -> np.ndarray:
        return _kernels.apply_pauli_sum(amplitudes, self.x_masks, self.z_masks, self.coefficients)

    def to_matrix(self) -> np.ndarray:
        dim = 1 << self.n_qubits
        mat = np.zeros((dim, dim), dtype=complex)
        for c, p in self.terms:
            mat += c * p.to_matrix()
        return mat

    def to_text(self) -> str:
        return "".join(f"{c!r} {p.label}\n" for c, p in self.terms)

    @classmethod
    def from_text(cls, text: str) -> "PauliSum":
        terms = []
        for line in text.splitlines():
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            coeff, label = line.split()
            terms.append((float(coeff), PauliString.from_label(label)))
        if not terms:
            raise ValueError("empty Pauli sum")
        return cls(terms[0][1].n_qubits, terms)

    def __repr__(self) -> str:
        return f"PauliSum(n_qubits={self.n_qubits}, terms={len(self.terms)})"


class LatticeKind(str, enum.Enum):
    CHAIN = "chain"
    GRID = "grid"


@dataclass(frozen=True)
class LatticeSpec:
    """Open-boundary XXZ lattice.  Grid site ``(r, c)`` is qubit ``r * lx + c``."""

    kind: LatticeKind
    lx: int
    ly: int = 1
    j_xy: float = 1.0
    j_z: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", LatticeKind(self.kind))
        if self.kind is LatticeKind.CHAIN:
            if self.ly != 1 or self.lx < 2:
                raise ValueError("a chain needs L >= 2")
        elif self.lx < 1 or self.ly < 1 or self.lx * self.ly < 2:
            raise ValueError("a grid needs Lx, Ly >= 1 and at least two sites")

    @classmethod
    def chain(cls, length: int, j_z: float = 1.0, j_xy: float = 1.0) -> "LatticeSpec":
        return cls(LatticeKind.CHAIN, length, 1, j_xy, j_z)

    @classmethod
    def grid(cls, lx: int, ly: int, j_z: float = 1.0, j_xy: float = 1.0) -> "LatticeSpec":
        return cls(LatticeKind.GRID, lx, ly, j_xy, j_z)

    @property
    def n_sites(self) -> int:
        return self.lx * self.ly

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.lx,) if self.kind is LatticeKind.CHAIN else (self.lx, self.ly)

    def bonds(self) -> list[tuple[int, int]]:
        """Nearest-neighbour pairs: horizontal bonds row by row, then vertical."""
        out = [(r * self.lx + c, r * self.lx + c + 1)
               for r in range(self.ly) for c in range(self.lx - 1)]
        out += [(r * self.lx + c, (r + 1) * self.lx + c)
                for r in range(self.ly - 1) for c in range(self.lx)]
        return out


def build_xxz(spec: LatticeSpec) -> PauliSum:
    n = spec.n_sites
    terms = []
    for i, j in spec.bonds():
        pair = (1 << i) | (1 << j)
        terms.append((spec.j_xy, PauliString(n, pair, 0)))
        terms.append((spec.j_xy, PauliString(n, pair, pair)))
        terms.append((spec.j_z, PauliString(n, 0, pair)))
    return PauliSum(n, terms)


def symmetry_of(spec: LatticeSpec) -> SymmetrySector:
    """Sector of odd-Y strings commuting with Z on every site."""
    return SymmetrySector(all_z(spec.n_sites), True, YParity.ODD)


class EigensolverError(RuntimeError):
    def __init__(self, message: str, estimate: float, residual: float):
        super().__init__(f"{message} (estimate={estimate!r}, residual={residual:.3e})")
        self.estimate = estimate
        self.residual = residual


DENSE_LIMIT = 10


def exact_ground_energy(
    h: PauliSum,
    tolerance: float = 1e-10,
    method: str = "auto",
    max_iterations: int | None = None,
) -> float:
    """Lowest eigenvalue of ``h``.

    ``method="auto"`` diagonalizes densely up to ``DENSE_LIMIT`` qubits and
    otherwise runs implicitly restarted Lanczos on the matrix-free
    Pauli-sum product; ``"dense"`` and ``"lanczos"`` force one route.
    """
    n = h.n_qubits
    if n > 16:
        raise ValueError("exact ground energy is limited to 16 qubits")
    if method not in ("auto", "dense", "lanczos"):
        raise ValueError(f"unknown method {method!r}")
    if method == "dense" or (method == "auto" and n <= DENSE_LIMIT):
        return float(np.linalg.eigvalsh(h.to_matrix())[0])
    dim = 1 << n
    op = LinearOperator((dim, dim), matvec=lambda v: h.matvec(v.reshape(-1)), dtype=np.complex128)
    # a generic start vector overlaps every symmetry sector
    v0 = np.random.default_rng(1234).standard_normal(dim).astype(np.complex128)
    maxiter = max_iterations or 50 * dim
    try:
        vals, vecs = eigsh(op, k=1, which="SA", v0=v0, tol=tolerance * 1e-2, maxiter=maxiter, ncv=min(dim, 40))
    except ArpackNoConvergence as err:
        if len(err.eigenvalues):
            est = float(err.eigenvalues[0].real)
            vec = err.eigenvectors[:, 0]
            residual = float(np.linalg.norm(h.matvec(vec) - est * vec))
        else:
            est, residual = float("nan"), float("inf")
        raise EigensolverError("Lanczos did not converge", est, residual) from err
    energy = float(vals[0].real)
    vec = vecs[:, 0]
    residual = float(np.linalg.norm(h.matvec(vec) - energy * vec))
    # the eigenvalue error is bounded by the residual for a Hermitian operator
    if residual > max(math.sqrt(tolerance), 1e-6):
        raise EigensolverError("Lanczos residual too large", energy, residual)
    return energy
