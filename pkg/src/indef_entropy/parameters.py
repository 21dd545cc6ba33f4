"""Parameter functions driving the solution family.

Two parameter kinds are supported: rational matrix Herglotz functions

    psi(z) = B z + C + i D + sum_k M_k (t_k - z)^{-1},

with B, D, M_k PSD Hermitian, C Hermitian and real poles t_k (psi maps the
upper half-plane into matrices with PSD imaginary part), and constant strict
contractions phi0.  The module also holds the Moebius dictionary between the
unit disk and the upper half-plane (base point upsilon = 2i) and the rotation
between property-J pairs and contractions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._linalg import (
    as_complex_matrix,
    count_negative_eigs,
    hermitian_part,
    imag_part,
    require_hermitian,
    spectral_norm,
)
from .errors import BoundaryPole, InvalidSpec, PoleProximity, SingularPhat

EPS_CONTR = 1e-8
EPS_POLE = 1e-9

#: Base point of the disk <-> half-plane correspondence (fixed).
UPSILON = 2j

#: Fixed interior points used to spot-check the Pick kernel of a Herglotz
#: spec at construction time (deterministic on purpose; away from R).
_PICK_POINTS = np.array(
    [0.3 + 0.7j, -1.1 + 0.4j, 2.2 + 1.5j, -0.6 + 2.1j, 1.4 + 0.2j, 0.05 + 1.0j]
)


def rotation_matrix(p: int) -> np.ndarray:
    """2p x 2p rotation W = (1/sqrt 2) [[I, -I], [I, I]]; W^* J W = diag(I, -I)."""
    eye = np.eye(p)
    return np.block([[eye, -eye], [eye, eye]]).astype(np.complex128) / np.sqrt(2.0)


def signature_j(p: int) -> np.ndarray:
    """Block antidiagonal J = [[0, I], [I, 0]]."""
    zero = np.zeros((p, p))
    eye = np.eye(p)
    return np.block([[zero, eye], [eye, zero]]).astype(np.complex128)


@dataclass(frozen=True)
class HerglotzSpec:
    """Rational Herglotz parameter with real poles and a constant iD offset."""

    B: np.ndarray
    C: np.ndarray
    imag_offset: np.ndarray
    poles: tuple[float, ...] = ()
    residues: tuple[np.ndarray, ...] = ()

    def __post_init__(self):
        b = as_complex_matrix(self.B)
        p = b.shape[0]
        c = as_complex_matrix(self.C, (p, p))
        d = as_complex_matrix(self.imag_offset, (p, p))
        require_hermitian(b, "B")
        require_hermitian(c, "C")
        require_hermitian(d, "imag_offset")
        res = tuple(as_complex_matrix(m, (p, p)) for m in self.residues)
        ts = tuple(float(t) for t in self.poles)
        if len(ts) != len(res):
            raise InvalidSpec("poles and residues must have equal length")
        if len(set(ts)) != len(ts):
            raise InvalidSpec("poles must be distinct")
        for m in (b, d, *res):
            require_hermitian(m, "PSD block")
            if count_negative_eigs(m, eps=1e-10) > 0:
                raise InvalidSpec("B, imag_offset and residues must be PSD")
        object.__setattr__(self, "B", b)
        object.__setattr__(self, "C", c)
        object.__setattr__(self, "imag_offset", d)
        object.__setattr__(self, "poles", ts)
        object.__setattr__(self, "residues", res)
        if pick_kernel_negative_squares(self, _PICK_POINTS) > 0:
            raise InvalidSpec("Herglotz spec fails the Pick kernel PSD check")

    @property
    def p(self) -> int:
        return self.B.shape[0]

    @staticmethod
    def constant_i(p: int) -> "HerglotzSpec":
        """The flagship parameter psi(z) = i I_p."""
        zero = np.zeros((p, p))
        return HerglotzSpec(B=zero, C=zero, imag_offset=np.eye(p))

    def to_json(self) -> dict:
        return {
            "B": matrix_to_json(self.B),
            "C": matrix_to_json(self.C),
            "imag_offset": matrix_to_json(self.imag_offset),
            "poles": list(self.poles),
            "residues": [matrix_to_json(m) for m in self.residues],
        }

    @staticmethod
    def from_json(data: dict) -> "HerglotzSpec":
        return HerglotzSpec(
            B=matrix_from_json(data["B"]),
            C=matrix_from_json(data["C"]),
            imag_offset=matrix_from_json(data["imag_offset"]),
            poles=tuple(data.get("poles", ())),
            residues=tuple(matrix_from_json(m) for m in data.get("residues", ())),
        )


@dataclass(frozen=True)
class ContractionSpec:
    """Constant strict contraction phi(z) = phi0, |phi0| <= 1 - EPS_CONTR."""

    phi0: np.ndarray

    def __post_init__(self):
        m = as_complex_matrix(self.phi0)
        if spectral_norm(m) > 1.0 - EPS_CONTR:
            raise InvalidSpec(
                f"phi0 must be a strict contraction (norm <= {1.0 - EPS_CONTR})"
            )
        object.__setattr__(self, "phi0", m)

    @property
    def p(self) -> int:
        return self.phi0.shape[0]

    def to_json(self) -> dict:
        return {"phi0": matrix_to_json(self.phi0)}

    @staticmethod
    def from_json(data: dict) -> "ContractionSpec":
        return ContractionSpec(phi0=matrix_from_json(data["phi0"]))


@dataclass(frozen=True)
class MoebiusMaps:
    """Disk <-> half-plane dictionary at a fixed base point in C_+."""

    upsilon: complex = UPSILON

    def __post_init__(self):
        if complex(self.upsilon).imag <= 0:
            raise InvalidSpec("upsilon must lie in the open upper half-plane")

    def to_halfplane(self, lam: complex) -> complex:
        u = complex(self.upsilon)
        if abs(lam - 1.0) <= EPS_POLE:
            raise BoundaryPole("disk point 1 maps to infinity")
        return (u.conjugate() * lam - u) / (lam - 1.0)

    def to_disk(self, z: complex) -> complex:
        u = complex(self.upsilon)
        if abs(z - u.conjugate()) <= EPS_POLE:
            raise BoundaryPole("half-plane point conj(upsilon) maps to infinity")
        return (z - u) / (z - u.conjugate())

    def boundary(self, theta: float) -> float:
        lam = np.exp(1j * float(theta))
        if abs(lam - 1.0) <= EPS_POLE:
            raise BoundaryPole(f"theta={theta} is the exceptional boundary angle")
        xi = self.to_halfplane(lam)
        if abs(xi.imag) > 1e-12 * max(1.0, abs(xi)):
            raise BoundaryPole(f"boundary image not real: {xi}")
        return float(xi.real)


_MAPS = MoebiusMaps()


def cayley(lam: complex) -> complex:
    """Disk -> upper half-plane, z(lambda) = 2i (lambda + 1) / (1 - lambda)."""
    return _MAPS.to_halfplane(complex(lam))


def cayley_inverse(z: complex) -> complex:
    """Half-plane -> disk, lambda(z) = (z - 2i) / (z + 2i)."""
    return _MAPS.to_disk(complex(z))


def cayley_star(lam: complex) -> complex:
    """The reflected map z(-lambda) = 2i (1 - lambda) / (1 + lambda)."""
    return _MAPS.to_halfplane(-complex(lam))


def boundary_xi(theta: float) -> float:
    """Real boundary trace xi(theta) of the disk boundary under ``cayley``."""
    return _MAPS.boundary(theta)


def eval_herglotz(psi: HerglotzSpec, z: complex) -> np.ndarray:
    """Evaluate psi at z; points in C_- use the reflection psi(conj z)^*."""
    z = complex(z)
    if z.imag < 0.0:
        return eval_herglotz(psi, z.conjugate()).conj().T
    for t in psi.poles:
        if abs(z - t) <= EPS_POLE:
            raise PoleProximity(f"z={z} within {EPS_POLE} of pole t={t}")
    val = psi.B * z + psi.C + 1j * psi.imag_offset
    for t, m in zip(psi.poles, psi.residues):
        val = val + m / (t - z)
    return val


def herglotz_imag_on_real(psi: HerglotzSpec, x: float) -> np.ndarray:
    """A.e. boundary density Im psi on R: only the iD offset survives.

    For real x every term B x + C + sum M_k/(t_k - x) is Hermitian, so the
    nontangential limit of the imaginary part is the constant imag_offset.
    """
    del x
    return psi.imag_offset


def eval_contraction(phi: ContractionSpec, z: complex) -> np.ndarray:
    del z
    return phi.phi0


def pair_to_contraction(p_mat: np.ndarray, q_mat: np.ndarray) -> np.ndarray:
    """Rotate a property-J pair value into its contraction ``Qhat Phat^{-1}``."""
    p_mat = as_complex_matrix(p_mat)
    q_mat = as_complex_matrix(q_mat)
    p = p_mat.shape[0]
    w_inv = rotation_matrix(p).conj().T  # W is unitary
    stacked = w_inv @ np.vstack([p_mat, q_mat])
    p_hat, q_hat = stacked[:p], stacked[p:]
    sv = np.linalg.svd(p_hat, compute_uv=False)
    if sv[-1] <= 1e-12 * max(sv[0], 1.0):
        raise SingularPhat("rotated pair has singular upper component")
    return q_hat @ np.linalg.inv(p_hat)


def contraction_to_pair(phi0: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Inverse of :func:`pair_to_contraction`: the pair W [I; phi0]."""
    phi0 = as_complex_matrix(phi0)
    p = phi0.shape[0]
    stacked = rotation_matrix(p) @ np.vstack([np.eye(p), phi0])
    return stacked[:p], stacked[p:]


def pick_kernel(values: list[np.ndarray], points: np.ndarray) -> np.ndarray:
    """Assemble the Nevanlinna kernel Gram matrix of precomputed values."""
    k = len(values)
    p = values[0].shape[0]
    gram = np.empty((k * p, k * p), dtype=np.complex128)
    for i in range(k):
        for j in range(k):
            block = (values[i] - values[j].conj().T) / (points[i] - points[j].conjugate())
            gram[i * p : (i + 1) * p, j * p : (j + 1) * p] = block
    return hermitian_part(gram)


def pick_kernel_negative_squares(psi: HerglotzSpec, points: np.ndarray) -> int:
    values = [eval_herglotz(psi, z) for z in points]
    return count_negative_eigs(pick_kernel(values, points), eps=1e-8)


def matrix_to_json(m: np.ndarray) -> list:
    m = np.asarray(m, dtype=np.complex128)
    return [[[float(v.real), float(v.imag)] for v in row] for row in m]


def matrix_from_json(data: list) -> np.ndarray:
    return np.array(
        [[complex(cell[0], cell[1]) for cell in row] for row in data],
        dtype=np.complex128,
    )
