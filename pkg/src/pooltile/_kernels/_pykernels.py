"""Pure-numpy statevector and closure kernels.

Every function here has a twin in ``_ckernels.pyx`` with an identical
signature; ``pooltile._kernels`` picks one at import.  Masks are plain
ints (statevector) or uint64 arrays (closure); states are contiguous
complex128 vectors indexed little-endian (qubit i <-> bit i).
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

_CACHE_MAX_DIM = 1 << 14
_IPOW = (1.0 + 0j, 1j, -1.0 + 0j, -1j)


def _action(dim: int, x: int, z: int, phase_exp: int):
    x, z, phase_exp = int(x), int(z), int(phase_exp) % 4
    if dim <= _CACHE_MAX_DIM:
        return _cached_action(dim, x, z, phase_exp)
    return _build_action(dim, x, z, phase_exp)


def _build_action(dim, x, z, phase_exp):
    # (P v)[c] = i^(phase + y) (-1)^{|src & z|} v[src],  src = c ^ x
    src = np.arange(dim, dtype=np.int64) ^ x
    y = bin(x & z).count("1")
    factor = _IPOW[(phase_exp + y) % 4] * (1.0 - 2.0 * (np.bitwise_count(src & z) & 1))
    return src, factor.astype(np.complex128)


_cached_action = lru_cache(maxsize=1024)(_build_action)


def apply_pauli(psi: np.ndarray, x: int, z: int, phase_exp: int = 0) -> np.ndarray:
    psi = np.ascontiguousarray(psi, dtype=np.complex128)
    src, factor = _action(psi.shape[0], x, z, phase_exp)
    return factor * psi[src]


def apply_rotation(psi: np.ndarray, x: int, z: int, theta: float) -> np.ndarray:
    """``exp(-i theta P) psi`` for a bare Pauli string P."""
    return np.cos(theta) * psi - 1j * np.sin(theta) * apply_pauli(psi, x, z)


def apply_pauli_sum(psi: np.ndarray, xs, zs, coeffs) -> np.ndarray:
    out = np.zeros_like(psi)
    for x, z, c in zip(xs, zs, coeffs):
        out += c * apply_pauli(psi, int(x), int(z))
    return out


def expectation(psi: np.ndarray, xs, zs, coeffs) -> complex:
    return np.vdot(psi, apply_pauli_sum(psi, xs, zs, coeffs))


def pool_gradients(psi: np.ndarray, hpsi: np.ndarray, xs, zs) -> np.ndarray:
    """``2 Im <H psi | A_k psi>`` for each bare pool string A_k."""
    out = np.empty(len(xs))
    for k, (x, z) in enumerate(zip(xs, zs)):
        out[k] = 2.0 * np.vdot(hpsi, apply_pauli(psi, int(x), int(z))).imag
    return out


def ansatz_state(ref: np.ndarray, xs, zs, thetas) -> np.ndarray:
    psi = np.array(ref, dtype=np.complex128, copy=True)
    for x, z, t in zip(xs, zs, thetas):
        psi = apply_rotation(psi, int(x), int(z), float(t))
    return psi


def energy_and_gradient(ref, gxs, gzs, thetas, hxs, hzs, hcoeffs):
    """Energy and full parameter gradient via one forward and one backward sweep."""
    psi = ansatz_state(ref, gxs, gzs, thetas)
    lam = apply_pauli_sum(psi, hxs, hzs, hcoeffs)
    energy = np.vdot(psi, lam).real
    grad = np.empty(len(thetas))
    for k in range(len(thetas) - 1, -1, -1):
        x, z, t = int(gxs[k]), int(gzs[k]), float(thetas[k])
        a_psi = apply_pauli(psi, x, z)
        grad[k] = 2.0 * np.vdot(lam, a_psi).imag
        c, s = np.cos(t), np.sin(t)
        psi = c * psi + 1j * s * a_psi
        lam = c * lam + 1j * s * apply_pauli(lam, x, z)
    return float(energy), grad


def closure(xs: np.ndarray, zs: np.ndarray, n_qubits: int, limit: int):
    """Worklist commutator closure over bare strings.

    Each member is commuted only against members that precede it, so
    every pair is visited exactly once.  Returns the member masks in
    discovery order, or raises ``OverflowError`` past ``limit`` members.
    """
    cap = max(64, 2 * len(xs))
    mx = np.empty(cap, dtype=np.uint64)
    mz = np.empty(cap, dtype=np.uint64)
    seen = set()
    count = 0
    for x, z in zip(xs, zs):
        key = (int(x), int(z))
        if key in seen or key == (0, 0):
            continue
        seen.add(key)
        mx[count], mz[count] = key
        count += 1
    i = 0
    while i < count:
        ax, az = mx[i], mz[i]
        bx, bz = mx[:i], mz[:i]
        anti = (np.bitwise_count((ax & bz) ^ (az & bx)) & 1).astype(bool)
        px = bx[anti] ^ ax
        pz = bz[anti] ^ az
        for x, z in zip(px.tolist(), pz.tolist()):
            if (x, z) in seen:
                continue
            seen.add((x, z))
            if count == cap:
                cap *= 2
                mx = np.resize(mx, cap)
                mz = np.resize(mz, cap)
            mx[count], mz[count] = x, z
            count += 1
            if count > limit:
                raise OverflowError(f"closure exceeded {limit} elements")
        i += 1
    return mx[:count].copy(), mz[:count].copy()
