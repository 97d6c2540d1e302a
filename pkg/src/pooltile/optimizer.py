"""Parameter optimization for Pauli-rotation ansatze.

The ansatz ``[(A_1, t_1), ..., (A_m, t_m)]`` prepares
``exp(-i t_m A_m) ... exp(-i t_1 A_1) |ref>``; entry 1 acts first.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import minimize as _scipy_minimize

from . import _kernels
from .lattice import PauliSum
from .pauli import PauliString
from .statevector import StateVector


@dataclass(frozen=True)
class AnsatzEntry:
    generator: PauliString
    theta: float = 0.0

    def __post_init__(self):
        if self.generator.phase_exp != 0:
            raise ValueError("ansatz generators must be bare Pauli strings")


@dataclass
class OptimizerSettings:
    gtol: float = 1e-8
    max_iterations: int = 500
    memory: int = 10

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class OptimizationResult:
    thetas: list[float]
    energy: float
    gradient_norm: float
    iterations: int
    converged: bool
    message: str = ""
    energies: list[float] = field(default_factory=list, repr=False)


def _generators(ansatz: Sequence) -> list[PauliString]:
    return [e.generator if isinstance(e, AnsatzEntry) else e for e in ansatz]


def _masks(gens: Sequence[PauliString]) -> tuple[np.ndarray, np.ndarray]:
    return (np.array([g.x_mask for g in gens], dtype=np.uint64),
            np.array([g.z_mask for g in gens], dtype=np.uint64))


def _check(reference: StateVector, gens: Sequence[PauliString], h: PauliSum | None = None) -> None:
    n = reference.n_qubits
    if h is not None and h.n_qubits != n:
        raise ValueError(f"size mismatch: Hamiltonian on {h.n_qubits} qubits, state on {n}")
    for g in gens:
        if g.n_qubits != n:
            raise ValueError(f"size mismatch: generator {g} vs state on {n} qubits")


def ansatz_state(reference: StateVector, ansatz: Sequence[AnsatzEntry]) -> StateVector:
    gens = _generators(ansatz)
    _check(reference, gens)
    xs, zs = _masks(gens)
    thetas = [e.theta for e in ansatz]
    return StateVector(_kernels.ansatz_state(reference.amplitudes, xs, zs, thetas))


def energy_and_gradient(reference: StateVector, ansatz: Sequence[AnsatzEntry], h: PauliSum,
                        thetas: Sequence[float] | None = None) -> tuple[float, np.ndarray]:
    """Exact energy and all partial derivatives in O(m 2**n).

    The state is propagated forward once; the backward sweep then unwinds
    both the state and ``H|psi>`` one rotation at a time, reading off
    ``dE/dt_k = 2 Im <lambda_k| A_k |psi_k>``.  ``thetas`` overrides the
    angles stored in ``ansatz``.
    """
    gens = _generators(ansatz)
    _check(reference, gens, h)
    xs, zs = _masks(gens)
    if thetas is None:
        thetas = [e.theta for e in ansatz]
    return _kernels.energy_and_gradient(
        reference.amplitudes, xs, zs, np.asarray(thetas, dtype=np.float64),
        h.x_masks, h.z_masks, h.coefficients,
    )


def minimize(reference: StateVector, ansatz: Sequence, h: PauliSum,
             init: Sequence[float] | None = None,
             settings: OptimizerSettings | None = None) -> OptimizationResult:
    """Limited-memory BFGS with a strong-Wolfe line search.

    A line-search breakdown is not an error: the best point is returned
    with ``converged=False``.
    """
    settings = settings or OptimizerSettings()
    gens = _generators(ansatz)
    _check(reference, gens, h)
    if init is None:
        init = [e.theta for e in ansatz]
    x0 = np.asarray(init, dtype=np.float64)
    if x0.shape != (len(gens),):
        raise ValueError(f"init has {x0.size} angles for {len(gens)} generators")

    if not gens:
        energy = _kernels.expectation(reference.amplitudes, h.x_masks, h.z_masks, h.coefficients).real
        return OptimizationResult([], float(energy), 0.0, 0, True, "empty ansatz", [float(energy)])

    xs, zs = _masks(gens)
    ref = reference.amplitudes
    best = {"f": math.inf, "x": x0.copy(), "g": None}

    def fun(t):
        f, g = _kernels.energy_and_gradient(ref, xs, zs, t, h.x_masks, h.z_masks, h.coefficients)
        if f < best["f"]:
            best.update(f=f, x=t.copy(), g=g.copy())
        return f, g

    f0, g0 = fun(x0)
    energies = [f0]
    if np.linalg.norm(g0) <= settings.gtol:
        return OptimizationResult(x0.tolist(), f0, float(np.linalg.norm(g0)), 0, True,
                                  "initial point is stationary", energies)

    res = _scipy_minimize(
        fun, x0, jac=True, method="L-BFGS-B",
        callback=lambda intermediate_result: energies.append(float(intermediate_result.fun)),
        options={
            "maxcor": settings.memory,
            "gtol": settings.gtol / math.sqrt(len(gens)),
            "ftol": 0.0,
            "maxiter": settings.max_iterations,
            "maxfun": 20 * settings.max_iterations,
        },
    )
    x = best["x"]
    gnorm = float(np.linalg.norm(best["g"]))
    return OptimizationResult(
        thetas=x.tolist(),
        energy=float(best["f"]),
        gradient_norm=gnorm,
        iterations=int(res.nit),
        converged=gnorm <= settings.gtol,
        message=str(res.message),
        energies=energies,
    )
