"""ADAPT-VQE outer loop with randomized tie-breaking between degenerate gradients."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import time
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .lattice import PauliSum
from .optimizer import OptimizerSettings, minimize
from .pauli import PauliString
from .pools import OperatorPool
from .statevector import StateVector, pool_gradients, expectation
from . import _kernels

log = logging.getLogger(__name__)

TRACE_HEADER = ("step", "energy", "max_abs_gradient", "selected_operator")
TIMING_FIELDS = ("wall_time",)


@dataclass
class AdaptConfig:
    epsilon: float = 0.01
    max_steps: int = 400
    tie_tolerance: float = 1e-8
    seed: int = 0
    # "max_abs": stop on max |g| < epsilon; "norm": on the 2-norm of all pool gradients
    criterion: str = "max_abs"
    optimizer: OptimizerSettings = field(default_factory=OptimizerSettings)

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.tie_tolerance < 0:
            raise ValueError("tie_tolerance must be non-negative")
        if self.criterion not in ("max_abs", "norm"):
            raise ValueError(f"unknown convergence criterion {self.criterion!r}")
        if isinstance(self.optimizer, dict):
            self.optimizer = OptimizerSettings(**self.optimizer)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "AdaptConfig":
        return cls(**data)


@dataclass
class StepRecord:
    step: int
    selected: str
    pool_index: int
    max_abs_gradient: float
    n_candidates: int
    energy: float
    thetas: list[float]
    optimizer_converged: bool
    optimizer_iterations: int


@dataclass
class RunRecord:
    config: dict
    pool: dict
    n_qubits: int
    geometry: list[int]
    seed: int
    reference_energy: float
    steps: list[StepRecord] = field(default_factory=list)
    final_energy: float = math.nan
    final_max_gradient: float = math.nan
    converged: bool = False
    exact_energy: float | None = None
    relative_error: float | None = None
    error: str | None = None
    wall_time: float = 0.0

    @property
    def n_steps(self) -> int:
        return len(self.steps)

    @property
    def selected_operators(self) -> list[PauliString]:
        return [PauliString.from_label(s.selected) for s in self.steps]

    @property
    def thetas(self) -> list[float]:
        return list(self.steps[-1].thetas) if self.steps else []

    def set_exact(self, exact_energy: float) -> None:
        self.exact_energy = float(exact_energy)
        self.relative_error = abs(self.final_energy - exact_energy) / abs(exact_energy)

    def to_dict(self, timing: bool = True) -> dict:
        out = asdict(self)
        if not timing:
            for k in TIMING_FIELDS:
                out.pop(k, None)
        return out

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(self.to_dict(timing), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "RunRecord":
        data = dict(data)
        data["steps"] = [StepRecord(**s) for s in data.get("steps", [])]
        return cls(**data)

    @classmethod
    def from_json(cls, text: str) -> "RunRecord":
        return cls.from_dict(json.loads(text))


def _screen(state: np.ndarray, h: PauliSum, xs, zs) -> np.ndarray:
    hpsi = _kernels.apply_pauli_sum(state, h.x_masks, h.z_masks, h.coefficients)
    return _kernels.pool_gradients(state, hpsi, xs, zs)


def adapt_run(h: PauliSum, pool: OperatorPool, reference: StateVector, cfg: AdaptConfig | None = None,
              geometry: Sequence[int] | None = None, exact_energy: float | None = None) -> RunRecord:
    """Grow an ansatz one pool operator at a time until the screening gradient falls below epsilon.

    Among operators within ``tie_tolerance`` (relative) of the largest
    |gradient|, one is drawn uniformly with a generator seeded by
    ``cfg.seed``.  The new angle starts at zero and the previous angles
    are warm-started from the last optimum.
    """
    cfg = cfg or AdaptConfig()
    if len(pool) == 0:
        raise ValueError("empty operator pool")
    if pool.n_qubits != h.n_qubits or reference.n_qubits != h.n_qubits:
        raise ValueError("Hamiltonian, pool and reference must share a register size")

    t0 = time.perf_counter()
    rng = np.random.default_rng(cfg.seed)
    ops = pool.operators
    xs = np.array([p.x_mask for p in ops], dtype=np.uint64)
    zs = np.array([p.z_mask for p in ops], dtype=np.uint64)

    record = RunRecord(
        config=cfg.to_dict(),
        pool={"provenance": pool.provenance.value, "size": len(pool), **pool.metadata},
        n_qubits=h.n_qubits,
        geometry=list(geometry) if geometry is not None else [h.n_qubits],
        seed=int(cfg.seed),
        reference_energy=expectation(reference, h),
    )
    generators: list[PauliString] = []
    thetas: list[float] = []
    state = reference.amplitudes
    energy = record.reference_energy

    while True:
        grads = _screen(state, h, xs, zs)
        mags = np.abs(grads)
        gmax = float(mags.max())
        measure = gmax if cfg.criterion == "max_abs" else float(np.linalg.norm(grads))
        if measure < cfg.epsilon:
            record.converged = True
            record.final_max_gradient = gmax
            break
        if len(generators) >= cfg.max_steps:
            record.final_max_gradient = gmax
            break

        candidates = np.flatnonzero(mags >= (1.0 - cfg.tie_tolerance) * gmax)
        pick = int(candidates[rng.integers(len(candidates))]) if len(candidates) > 1 else int(candidates[0])
        generators.append(ops[pick])
        try:
            res = minimize(reference, generators, h, thetas + [0.0], cfg.optimizer)
        except Exception as err:  # keep the partial trace
            log.exception("optimizer failed at step %d", len(generators))
            record.error = f"step {len(generators)}: {err}"
            generators.pop()
            break
        if not math.isfinite(res.energy):
            record.error = f"step {len(generators)}: non-finite energy"
            generators.pop()
            break
        if not res.converged:
            log.debug("step %d: optimizer stopped with |g|=%.2e (%s)",
                      len(generators), res.gradient_norm, res.message)
        thetas = list(res.thetas)
        energy = res.energy
        state = _kernels.ansatz_state(reference.amplitudes,
                                      [g.x_mask for g in generators],
                                      [g.z_mask for g in generators], thetas)
        record.steps.append(StepRecord(
            step=len(generators),
            selected=ops[pick].label,
            pool_index=pick,
            max_abs_gradient=gmax,
            n_candidates=int(len(candidates)),
            energy=float(energy),
            thetas=[float(t) for t in thetas],
            optimizer_converged=bool(res.converged),
            optimizer_iterations=res.iterations,
        ))
        log.debug("step %d: %s |g|=%.6f E=%.10f", len(generators), ops[pick].label, gmax, energy)

    record.final_energy = float(energy)
    if exact_energy is not None:
        record.set_exact(exact_energy)
    record.wall_time = time.perf_counter() - t0
    return record


def trial_seed(seed: int, index: int) -> int:
    """Deterministic per-trial seed derived from a base seed and trial index."""
    return int(np.random.SeedSequence([int(seed), int(index)]).generate_state(1, dtype=np.uint64)[0])


def adapt_trials(h: PauliSum, pool: OperatorPool, reference: StateVector, cfg: AdaptConfig,
                 n_trials: int, geometry: Sequence[int] | None = None,
                 exact_energy: float | None = None) -> list[RunRecord]:
    if n_trials < 1:
        raise ValueError("n_trials must be at least 1")
    records = []
    for k in range(n_trials):
        trial_cfg = AdaptConfig.from_dict({**cfg.to_dict(), "seed": trial_seed(cfg.seed, k)})
        records.append(adapt_run(h, pool, reference, trial_cfg, geometry, exact_energy))
    return records


def convergence_trace(record: RunRecord) -> list[dict]:
    return [
        {"step": s.step, "energy": s.energy, "max_abs_gradient": s.max_abs_gradient,
         "selected_operator": s.selected}
        for s in record.steps
    ]


def trace_to_csv(record: RunRecord) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=TRACE_HEADER, lineterminator="\n")
    writer.writeheader()
    for row in convergence_trace(record):
        writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})
    return buf.getvalue()
