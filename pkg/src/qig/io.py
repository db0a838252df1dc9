"""JSON encodings for matrices and states.

A matrix is ``{"dim": n, "data": [[re, im], ...]}`` with ``n*n`` row-major
entries. Config files may use a few shorthands instead:

* ``{"bloch": [x, y, z]}``            qubit state ``(I + x.sigma)/2``
* ``{"pauli": [a, b, c]}``            ``a sigma_x + b sigma_y + c sigma_z``
* ``{"diag": [...]}``                 real diagonal matrix
* ``{"random_density": {"seed", "n", "floor"}}``
* ``{"random_tangent": {"seed", "n"}}``
* ``{"random_hamiltonian": {"seed", "n", "spread"}}``
* ``"maximally_mixed:<n>"``
"""

from __future__ import annotations

import numpy as np

from .linalg import PAULI, QigError, random_density, random_tangent


def encode_matrix(M) -> dict:
    M = np.asarray(M, dtype=complex)
    return {"dim": int(M.shape[0]), "data": [[float(z.real), float(z.imag)] for z in M.reshape(-1)]}


def decode_matrix(obj) -> np.ndarray:
    if isinstance(obj, str):
        if obj.startswith("maximally_mixed:"):
            n = int(obj.split(":", 1)[1])
            return np.eye(n, dtype=complex) / n
        raise QigError(f"unknown matrix shorthand {obj!r}")
    if not isinstance(obj, dict):
        raise QigError(f"matrix must be a JSON object, got {type(obj).__name__}")
    if "data" in obj:
        n = int(obj["dim"])
        data = np.asarray(obj["data"], dtype=float)
        if data.shape != (n * n, 2):
            raise QigError(f"matrix data must be {n * n} [re, im] pairs, got shape {data.shape}")
        return (data[:, 0] + 1j * data[:, 1]).reshape(n, n)
    if "bloch" in obj:
        x = np.asarray(obj["bloch"], dtype=float)
        return (np.eye(2) + sum(x[k] * PAULI[k] for k in range(3))) / 2
    if "pauli" in obj:
        a = np.asarray(obj["pauli"], dtype=float)
        return sum(a[k] * PAULI[k] for k in range(3))
    if "diag" in obj:
        return np.diag(np.asarray(obj["diag"], dtype=float)).astype(complex)
    if "random_density" in obj:
        p = obj["random_density"]
        return random_density(p.get("seed", 0), p.get("n", 2), p.get("floor", 0.01)).data
    if "random_tangent" in obj:
        p = obj["random_tangent"]
        return random_tangent(p.get("seed", 0), p.get("n", 2)).data
    if "random_hamiltonian" in obj:
        from .geometry import seeded_hamiltonian

        p = obj["random_hamiltonian"]
        return seeded_hamiltonian(p.get("seed", 0), p.get("n", 2), p.get("spread", 1.0))
    raise QigError(f"cannot decode matrix from keys {sorted(obj)}")
