"""Small dense linear-algebra helpers shared across modules.

Everything here is desk scale (matrices up to a few hundred rows), so plain
LAPACK-backed numpy calls are used throughout; no structure exploitation.
"""

from __future__ import annotations

import numpy as np

from .errors import AmbiguousInertia, NonHermitianInput

EPS_INERTIA = 1e-10
EPS_RANK = 1e-12


def as_complex_matrix(m, shape=None) -> np.ndarray:
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2:
        raise ValueError(f"expected a matrix, got ndim={a.ndim}")
    if shape is not None and a.shape != shape:
        raise ValueError(f"expected shape {shape}, got {a.shape}")
    return a


def hermitian_part(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.conj().T)


def imag_part(m: np.ndarray) -> np.ndarray:
    """Matrix imaginary part (m - m^*)/(2i); Hermitian for any m."""
    return (m - m.conj().T) / 2j


def is_hermitian(m: np.ndarray, tol: float = 1e-12) -> bool:
    scale = max(1.0, float(np.linalg.norm(m, 2)))
    return float(np.linalg.norm(m - m.conj().T, 2)) <= tol * scale


def require_hermitian(m: np.ndarray, name: str, tol: float = 1e-12) -> np.ndarray:
    if not is_hermitian(m, tol):
        raise NonHermitianInput(f"{name} must be Hermitian within tolerance {tol}")
    return m


def spectral_norm(m: np.ndarray) -> float:
    return float(np.linalg.norm(m, 2))


def inverse_with_refinement(s: np.ndarray) -> np.ndarray:
    """Dense inverse plus one step of iterative refinement."""
    n = s.shape[0]
    eye = np.eye(n, dtype=np.complex128)
    x = np.linalg.solve(s, eye)
    x += np.linalg.solve(s, eye - s @ x)
    return x


def negative_index(h: np.ndarray, eps: float = EPS_INERTIA) -> int:
    """Number of eigenvalues of the Hermitian matrix ``h`` below -eps*norm.

    Raises :class:`AmbiguousInertia` when some eigenvalue falls inside the
    dead band [-eps*norm, eps*norm]; near-singular input must be perturbed or
    rejected by the caller, never silently classified.
    """
    h = as_complex_matrix(h)
    require_hermitian(h, "inertia input", tol=1e-10)
    eigs = np.linalg.eigvalsh(hermitian_part(h))
    scale = max(float(np.max(np.abs(eigs))), np.finfo(float).tiny)
    band = eps * scale
    if np.any(np.abs(eigs) <= band):
        worst = float(np.min(np.abs(eigs)))
        raise AmbiguousInertia(
            f"eigenvalue of magnitude {worst:.3e} inside dead band {band:.3e}"
        )
    return int(np.count_nonzero(eigs < -band))


def count_negative_eigs(h: np.ndarray, eps: float = 1e-8) -> int:
    """Negative-eigenvalue count without the ambiguity guard.

    Used for Gram/Pick kernel matrices, which are legitimately rank
    deficient; zeros there are expected, not an error.
    """
    h = hermitian_part(as_complex_matrix(h))
    eigs = np.linalg.eigvalsh(h)
    scale = max(float(np.max(np.abs(eigs), initial=0.0)), np.finfo(float).tiny)
    return int(np.count_nonzero(eigs < -eps * scale))


def rank_from_singular_values(m: np.ndarray, eps: float = EPS_RANK) -> int:
    sv = np.linalg.svd(m, compute_uv=False)
    if sv.size == 0 or sv[0] == 0.0:
        return 0
    return int(np.count_nonzero(sv > eps * sv[0]))


def rel_residual(delta: np.ndarray, scale: float) -> float:
    return float(np.linalg.norm(delta, 2)) / max(scale, np.finfo(float).tiny)
