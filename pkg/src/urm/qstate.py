"""Dense state-vector algebra for one qudit (dim d) and two qudits (dim d**2).

States and operators are plain complex numpy arrays.  Two-particle vectors
use the flattening ``k = n1 * d + n2``.
"""
from __future__ import annotations

import math
from functools import lru_cache
from typing import Sequence

import numpy as np

# normalization check for constructed states
NORM_TOL = 1e-12
# default tolerance for numerical assertions
ASSERT_TOL = 1e-9
# orthonormality check on measurement bases
BASIS_TOL = 1e-10


@lru_cache(maxsize=None)
def roots_of_unity(d: int) -> np.ndarray:
    """``omega**k`` for k = 0..d-1 with omega = exp(2 pi i / d)."""
    roots = np.exp(2j * np.pi * np.arange(d) / d)
    roots.setflags(write=False)
    return roots


def omega_power(d: int, k) -> np.ndarray | complex:
    """omega**k, with k reduced mod d before any trigonometry."""
    return roots_of_unity(d)[np.asarray(k, dtype=np.int64) % d]


def basis_vector(dim: int, k: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[k] = 1.0
    return v


def norm(s: np.ndarray) -> float:
    return float(np.linalg.norm(s))


def is_normalized(s: np.ndarray, tol: float = NORM_TOL) -> bool:
    return abs(np.vdot(s, s).real - 1.0) < tol


def normalize(s: np.ndarray) -> np.ndarray:
    n = norm(s)
    if n < NORM_TOL:
        raise ValueError("cannot normalize a null vector")
    return s / n


def _check_dims(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")


def inner(a: np.ndarray, b: np.ndarray) -> complex:
    """<a|b>, conjugate-linear in ``a``."""
    _check_dims(a, b)
    return complex(np.vdot(a, b))


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.kron(a, b)


def as_basis_matrix(basis: Sequence[np.ndarray] | np.ndarray) -> np.ndarray:
    """Stack basis vectors as rows."""
    return np.asarray(np.stack(list(basis)) if not isinstance(basis, np.ndarray) else basis)


def orthonormality_residual(basis: Sequence[np.ndarray] | np.ndarray) -> float:
    """max |G - I| over the Gram matrix of ``basis``."""
    B = as_basis_matrix(basis)
    gram = B.conj() @ B.T
    return float(np.abs(gram - np.eye(len(B))).max())


def check_orthonormal_basis(basis, dim: int, tol: float = BASIS_TOL) -> np.ndarray:
    B = as_basis_matrix(basis)
    if B.shape != (dim, dim):
        raise ValueError(f"basis of shape {B.shape} does not span a {dim}-dim space")
    if orthonormality_residual(B) > tol:
        raise ValueError("basis is not orthonormal")
    return B


def born_probabilities(s: np.ndarray, basis, check: bool = True) -> np.ndarray:
    """p_k = |<basis_k|s>|**2 for a complete orthonormal basis."""
    B = check_orthonormal_basis(basis, len(s)) if check else as_basis_matrix(basis)
    return np.abs(B.conj() @ s) ** 2


def make_rng(seed: int | np.random.Generator | None) -> np.random.Generator:
    """PCG64 generator; a given integer seed reproduces bit-exactly across platforms."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(seed))


def sample_index(probs: np.ndarray, rng: np.random.Generator) -> int:
    """Inverse-CDF draw from a discrete distribution using one uniform."""
    cdf = np.cumsum(probs)
    u = rng.random() * cdf[-1]
    k = int(np.searchsorted(cdf, u, side="right"))
    # guard the u == cdf[-1] rounding corner and zero-weight tail entries
    k = min(k, len(probs) - 1)
    while probs[k] <= 0.0 and k > 0:
        k -= 1
    return k


def measure(s: np.ndarray, basis, seed: int | np.random.Generator | None,
            check: bool = True) -> tuple[int, np.ndarray]:
    """Projective measurement of ``s`` in ``basis``; returns (index, collapsed state)."""
    B = check_orthonormal_basis(basis, len(s)) if check else as_basis_matrix(basis)
    probs = np.abs(B.conj() @ s) ** 2
    k = sample_index(probs, make_rng(seed))
    return k, B[k].copy()


def _split(s: np.ndarray) -> tuple[int, np.ndarray]:
    d = math.isqrt(len(s))
    if d * d != len(s):
        raise ValueError(f"length {len(s)} is not a two-qudit dimension")
    return d, s.reshape(d, d)


def project_particle1(s: np.ndarray, v: np.ndarray) -> tuple[float, np.ndarray]:
    """Apply |v><v| (x) I; returns (probability, unnormalized projected state)."""
    d, psi = _split(s)
    if len(v) != d:
        raise ValueError(f"particle-1 vector has dim {len(v)}, expected {d}")
    # psi[n1, n2]; contract particle 1 with <v|
    amp2 = v.conj() @ psi
    out = np.outer(v, amp2).reshape(-1)
    return float(np.vdot(out, out).real), out


def partial_trace(s: np.ndarray, side: int) -> np.ndarray:
    """Reduced density matrix of particle ``side`` (1 or 2), normalized to trace one."""
    _, psi = _split(s)
    psi = psi / norm(s)
    if side == 1:
        return psi @ psi.conj().T
    if side == 2:
        return psi.T @ psi.conj()
    raise ValueError("side must be 1 or 2")


def density_matrix_residuals(rho: np.ndarray) -> dict[str, float]:
    """Hermiticity, trace and positivity defects of ``rho``."""
    herm = float(np.abs(rho - rho.conj().T).max())
    tr = abs(complex(np.trace(rho)) - 1.0)
    min_eig = float(np.linalg.eigvalsh((rho + rho.conj().T) / 2).min())
    return {"hermiticity": herm, "trace": tr, "negativity": max(0.0, -min_eig)}


def equal_up_to_global_phase(a: np.ndarray, b: np.ndarray, tol: float = ASSERT_TOL) -> bool:
    return abs(inner(a, b)) > 1.0 - tol


def matrix_power_mod(op: np.ndarray, k: int, order: int) -> np.ndarray:
    """op**k for an operator with op**order = I, exponent reduced mod ``order``."""
    return np.linalg.matrix_power(op, int(k) % order)


def is_unitary(op: np.ndarray, tol: float = ASSERT_TOL) -> bool:
    return bool(np.abs(op.conj().T @ op - np.eye(len(op))).max() < tol)
