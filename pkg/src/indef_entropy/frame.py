"""Frame evaluation and the linear fractional solution family.

The frame is the 2p x 2p matrix function

    U(z) = I_{2p} - i z Pi^* (I - z A^*)^{-1} S^{-1} Pi J,

J-unitary in the sense U(conj z)^* J U(z) = J, with U(0) = I exactly.  Its
blocks a, b, c, d drive the solutions

    phi(z) = i (a psi + i b)(c psi + i d)^{-1)          (pair form)
    phi(z) = i (ahat + bhat phi0)(chat + dhat phi0)^{-1} (contractive form)

and the disk-side function omega_star(lambda) = -i phi(2i(1-lambda)/(1+lambda))
whose Taylor data solves the interpolation problem.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._linalg import rel_residual, spectral_norm
from .errors import (
    DenominatorSingular,
    FramePole,
    InconsistentConditions,
    PoleProximity,
    ResolventPole,
    SolutionPole,
)
from .parameters import (
    ContractionSpec,
    HerglotzSpec,
    cayley_star,
    eval_herglotz,
    rotation_matrix,
)
from .toeplitz import StructuredTriple, degeneracy_conditions

EPS_DENOM = 1e-12

__all__ = [
    "FrameEvaluation",
    "SolutionHandle",
    "eval_frame",
    "eval_solution",
    "eval_omega_star",
    "g_function",
    "a_psi_matrix",
]


@dataclass(frozen=True)
class FrameEvaluation:
    """U(z) and the rotated Uhat(z) = U(z) W split into p x p blocks."""

    z: complex
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray
    a_hat: np.ndarray
    b_hat: np.ndarray
    c_hat: np.ndarray
    d_hat: np.ndarray

    @property
    def matrix(self) -> np.ndarray:
        return np.block([[self.a, self.b], [self.c, self.d]])

    @property
    def matrix_hat(self) -> np.ndarray:
        return np.block([[self.a_hat, self.b_hat], [self.c_hat, self.d_hat]])


def eval_frame(triple: StructuredTriple, z: complex) -> FrameEvaluation:
    """Evaluate U(z); z = 0 returns the identity frame exactly.

    The only pole is z = 2i (where 1/z hits sigma(A^*)); calls there raise
    :class:`FramePole`.
    """
    z = complex(z)
    p, n = triple.p, triple.n
    if z == 0.0:
        u = np.eye(2 * p, dtype=np.complex128)
    else:
        if abs(z - 2j) <= 1e-9:
            raise FramePole(f"frame pole at z = 2i (requested z={z})")
        m = np.eye(n * p, dtype=np.complex128) - z * triple.A.conj().T
        x = np.linalg.solve(m, triple.S_inv @ triple.pi)
        u = np.eye(2 * p, dtype=np.complex128) - 1j * z * (
            triple.pi.conj().T @ x @ triple.J
        )
    u_hat = u @ rotation_matrix(p)
    return FrameEvaluation(
        z=z,
        a=u[:p, :p], b=u[:p, p:], c=u[p:, :p], d=u[p:, p:],
        a_hat=u_hat[:p, :p], b_hat=u_hat[:p, p:],
        c_hat=u_hat[p:, :p], d_hat=u_hat[p:, p:],
    )


@dataclass(frozen=True)
class SolutionHandle:
    """A structured triple bound to an admissible parameter.

    ``mode`` is "pair" for Herglotz parameters (pair {psi, iI}) and
    "contraction" for constant strict contractions.  Construction verifies
    the nondegeneracy conditions of the family.
    """

    triple: StructuredTriple
    param: HerglotzSpec | ContractionSpec
    mode: str

    @staticmethod
    def create(
        triple: StructuredTriple, param: HerglotzSpec | ContractionSpec
    ) -> "SolutionHandle":
        report = degeneracy_conditions(triple, param)
        if isinstance(param, HerglotzSpec):
            if not report.c4_prime:
                raise DenominatorSingular(
                    "pair parameter fails the nondegeneracy determinant"
                )
            mode = "pair"
        else:
            if not report.c4_dprime:
                raise DenominatorSingular(
                    "contraction parameter fails the nondegeneracy determinant"
                )
            mode = "contraction"
        return SolutionHandle(triple=triple, param=param, mode=mode)

    @property
    def p(self) -> int:
        return self.triple.p


def _lft(num: np.ndarray, den: np.ndarray, z: complex) -> np.ndarray:
    scale = spectral_norm(den)
    det = abs(np.linalg.det(den))
    if det <= EPS_DENOM * max(scale**den.shape[0], np.finfo(float).tiny):
        raise DenominatorSingular(f"LFT denominator singular at z={z}")
    return 1j * num @ np.linalg.inv(den)


def eval_solution(handle: SolutionHandle, z: complex) -> np.ndarray:
    """phi(z) of the bound parameter; C_- values via phi(z) = phi(conj z)^*."""
    z = complex(z)
    if z.imag < 0.0:
        return eval_solution(handle, z.conjugate()).conj().T
    if z == 2j:
        # Removable singularity at the frame pole: multiplying numerator and
        # denominator of the LFT by lambda^n and letting lambda -> 0 leaves
        # (s_0/2 - i nu) YJ[P;Q] over YJ[P;Q], nonsingular by the
        # nondegeneracy condition, hence phi(2i) = i(s_0/2 - i nu).
        spec = handle.triple.spec
        return 1j * (spec.s[0] / 2.0 - 1j * spec.nu)
    frame = eval_frame(handle.triple, z)
    if handle.mode == "pair":
        psi = eval_herglotz(handle.param, z)
        num = frame.a @ psi + 1j * frame.b
        den = frame.c @ psi + 1j * frame.d
    else:
        phi0 = handle.param.phi0
        num = frame.a_hat + frame.b_hat @ phi0
        den = frame.c_hat + frame.d_hat @ phi0
    return _lft(num, den, z)


def eval_omega_star(handle: SolutionHandle, lam: complex) -> np.ndarray:
    """omega_star(lambda) = -i phi(2i (1 - lambda)/(1 + lambda))."""
    lam = complex(lam)
    z = cayley_star(lam)
    try:
        return -1j * eval_solution(handle, z)
    except DenominatorSingular as exc:
        raise SolutionPole(f"solution pole at lambda={lam}") from exc


def g_function(triple: StructuredTriple, psi: HerglotzSpec, z: complex) -> np.ndarray:
    """G(z) = I - (i Phi1^* - psi(1/conj z)^* Phi2^*) S^{-1} (A - zI)^{-1} Phi2.

    Satisfies c(w) psi(w) + i d(w) = i G(1/conj w)^*; the matched-point check
    runs whenever the frame side is evaluable and raises on gross violation.
    """
    z = complex(z)
    if z == 0.0:
        raise ResolventPole("z = 0 excluded (psi argument 1/conj z undefined)")
    if abs(z - 0.5j) <= 1e-9:
        raise ResolventPole("z = i/2 lies in sigma(A)")
    p, n = triple.p, triple.n
    psi_val = eval_herglotz(psi, 1.0 / z.conjugate())
    row = 1j * triple.phi1.conj().T - psi_val.conj().T @ triple.phi2.conj().T
    resolvent = np.linalg.solve(triple.A - z * np.eye(n * p), triple.phi2)
    g = np.eye(p, dtype=np.complex128) - row @ triple.S_inv @ resolvent

    w = 1.0 / z.conjugate()
    if abs(w - 2j) > 1e-6:
        try:
            frame = eval_frame(triple, w)
            lhs = frame.c @ eval_herglotz(psi, w) + 1j * frame.d
        except (FramePole, PoleProximity):
            return g
        rhs = 1j * g.conj().T
        res = rel_residual(lhs - rhs, max(spectral_norm(lhs), 1e-300))
        if res > 1e-8:
            raise InconsistentConditions(
                f"frame/G cross-check residual {res:.3e} at z={z}"
            )
    return g


def a_psi_matrix(triple: StructuredTriple, psi_value: np.ndarray) -> np.ndarray:
    """A_psi = A - Phi2 (i Phi1^* - psi_value^* Phi2^*) S^{-1}.

    ``psi_value`` is the parameter evaluated at the reflected point 1/conj z.
    The displacement consequence A_psi S - S A_psi^* =
    Phi2 (psi_value^* - psi_value) Phi2^* is verified before returning.
    """
    psi_value = np.asarray(psi_value, dtype=np.complex128)
    row = 1j * triple.phi1.conj().T - psi_value.conj().T @ triple.phi2.conj().T
    a_psi = triple.A - triple.phi2 @ row @ triple.S_inv
    lhs = a_psi @ triple.S - triple.S @ a_psi.conj().T
    rhs = triple.phi2 @ (psi_value.conj().T - psi_value) @ triple.phi2.conj().T
    scale = max(spectral_norm(triple.S) * spectral_norm(a_psi), 1.0)
    if rel_residual(lhs - rhs, scale) > 1e-11:
        raise InconsistentConditions("A_psi displacement consequence failed")
    return a_psi
