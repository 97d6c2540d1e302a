"""Independent dense-matrix oracles built from 2x2 Kronecker products.

Qubit 0 is the least significant bit of a basis index, so the leftmost
Kronecker factor belongs to the highest qubit.
"""

from functools import reduce

import numpy as np
import scipy.linalg

SINGLE = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def dense(letters: str) -> np.ndarray:
    """Matrix of a letter string whose first letter acts on qubit 0."""
    return reduce(np.kron, [SINGLE[c] for c in reversed(letters)])


def xxz_dense(n_sites: int, bonds, j_z: float, j_xy: float = 1.0) -> np.ndarray:
    h = np.zeros((1 << n_sites, 1 << n_sites), dtype=complex)
    for i, j in bonds:
        for letter, coupling in (("X", j_xy), ("Y", j_xy), ("Z", j_z)):
            s = ["I"] * n_sites
            s[i] = s[j] = letter
            h += coupling * dense("".join(s))
    return h


def rotate_dense(psi: np.ndarray, letters: str, theta: float) -> np.ndarray:
    return scipy.linalg.expm(-1j * theta * dense(letters)) @ psi


def random_state(rng, n: int, real: bool = False) -> np.ndarray:
    v = rng.standard_normal(1 << n)
    if not real:
        v = v + 1j * rng.standard_normal(1 << n)
    return (v / np.linalg.norm(v)).astype(complex)


def random_letters(rng, n: int, allow_identity: bool = False) -> str:
    while True:
        s = "".join(rng.choice(list("IXYZ"), size=n))
        if allow_identity or set(s) != {"I"}:
            return s
