"""Block-Toeplitz structured triples and their displacement machinery.

A spec (p, n, s_0..s_{n-1}, nu) assembles into the Hermitian block Toeplitz
matrix S = {s_{j-i}} (s_{-k} = s_k^*) together with the unique matrices
A, Phi_1, Phi_2 solving the displacement identity

    A S - S A^* = i (Phi_1 Phi_2^* + Phi_2 Phi_1^*),

where A is lower block triangular with (i/2) I_p on the diagonal and i I_p
below, Phi_2 stacks identities, and Phi_1 stacks the cumulative sums
s_0/2, s_0/2 + s_1^*, ...  plus i Phi_2 nu.  The triple is the raw material
for the frame, the interpolation family and the determinant experiments.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._linalg import (
    EPS_RANK,
    as_complex_matrix,
    inverse_with_refinement,
    negative_index,
    rank_from_singular_values,
    rel_residual,
    require_hermitian,
    spectral_norm,
)
from .errors import (
    InconsistentConditions,
    InvalidSpec,
    PoleHit,
    RankDeficientY,
    SingularPhat,
    SingularS,
)
from .parameters import (
    UPSILON,
    ContractionSpec,
    HerglotzSpec,
    eval_herglotz,
    matrix_from_json,
    matrix_to_json,
    pair_to_contraction,
    rotation_matrix,
    signature_j,
)

EPS_DET = 1e-8

__all__ = [
    "ToeplitzSpec",
    "StructuredTriple",
    "YMatrix",
    "DegeneracyReport",
    "build_structured_triple",
    "negative_index",
    "assemble_toeplitz",
    "shift_matrix",
    "last_row_frame",
    "degeneracy_conditions",
    "resolvent_column",
]


@dataclass(frozen=True)
class ToeplitzSpec:
    """Data (p, n, s_0..s_{n-1}, nu) generating S(n) and its triple."""

    p: int
    n: int
    s: tuple[np.ndarray, ...]
    nu: np.ndarray

    def __post_init__(self):
        if self.p < 1 or self.n < 1:
            raise InvalidSpec("p and n must be positive")
        if len(self.s) != self.n:
            raise InvalidSpec(f"expected {self.n} blocks, got {len(self.s)}")
        blocks = tuple(as_complex_matrix(b, (self.p, self.p)) for b in self.s)
        nu = as_complex_matrix(self.nu, (self.p, self.p))
        require_hermitian(blocks[0], "s_0", tol=1e-10)
        require_hermitian(nu, "nu", tol=1e-10)
        object.__setattr__(self, "s", blocks)
        object.__setattr__(self, "nu", nu)

    def block(self, k: int) -> np.ndarray:
        """s_k for |k| < n, with s_{-k} = s_k^*."""
        if k >= 0:
            return self.s[k]
        return self.s[-k].conj().T

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "n": self.n,
            "nu": matrix_to_json(self.nu),
            "blocks": [matrix_to_json(b) for b in self.s],
        }

    @staticmethod
    def from_json(data: dict) -> "ToeplitzSpec":
        return ToeplitzSpec(
            p=int(data["p"]),
            n=int(data["n"]),
            s=tuple(matrix_from_json(b) for b in data["blocks"]),
            nu=matrix_from_json(data["nu"]),
        )


def assemble_toeplitz(blocks: list[np.ndarray], n: int) -> np.ndarray:
    """Hermitian block Toeplitz matrix {s_{j-i}} from blocks s_0..s_{n-1}."""
    if len(blocks) < n:
        raise ValueError(f"need {n} blocks, have {len(blocks)}")
    p = blocks[0].shape[0]
    s = np.empty((n * p, n * p), dtype=np.complex128)
    for i in range(n):
        for j in range(n):
            b = blocks[j - i] if j >= i else blocks[i - j].conj().T
            s[i * p : (i + 1) * p, j * p : (j + 1) * p] = b
    return s


def shift_matrix(p: int, n: int) -> np.ndarray:
    """Lower block triangular A with (i/2) I_p diagonal and i I_p below."""
    a = np.zeros((n * p, n * p), dtype=np.complex128)
    eye = np.eye(p)
    for i in range(n):
        a[i * p : (i + 1) * p, i * p : (i + 1) * p] = 0.5j * eye
        for j in range(i):
            a[i * p : (i + 1) * p, j * p : (j + 1) * p] = 1j * eye
    return a


@dataclass(frozen=True)
class StructuredTriple:
    """Immutable bundle (A, Phi_1, Phi_2, Pi, J, S, S^{-1}, inertia)."""

    spec: ToeplitzSpec
    A: np.ndarray
    phi1: np.ndarray
    phi2: np.ndarray
    pi: np.ndarray
    J: np.ndarray
    S: np.ndarray
    S_inv: np.ndarray
    kappa: int
    theta_count: int

    @property
    def p(self) -> int:
        return self.spec.p

    @property
    def n(self) -> int:
        return self.spec.n

    def displacement_residual(self) -> float:
        """Relative residual of A S - S A^* = i(Phi1 Phi2^* + Phi2 Phi1^*)."""
        lhs = self.A @ self.S - self.S @ self.A.conj().T
        rhs = 1j * (self.phi1 @ self.phi2.conj().T + self.phi2 @ self.phi1.conj().T)
        return rel_residual(lhs - rhs, spectral_norm(self.S))


def build_structured_triple(spec: ToeplitzSpec) -> StructuredTriple:
    """Assemble S, A, Phi_1, Phi_2 from a spec; invert S and fix its inertia.

    Raises :class:`SingularS` when the smallest singular value of S falls
    below EPS_RANK times the largest, and :class:`AmbiguousInertia` when an
    eigenvalue of S sits inside the inertia dead band.
    """
    p, n = spec.p, spec.n
    s = assemble_toeplitz(list(spec.s), n)
    sv = np.linalg.svd(s, compute_uv=False)
    if sv[-1] <= EPS_RANK * sv[0]:
        raise SingularS(f"S has relative smallest singular value {sv[-1] / sv[0]:.3e}")

    a = shift_matrix(p, n)
    phi2 = np.tile(np.eye(p), (n, 1)).astype(np.complex128)
    # cumulative sums s_0/2, s_0/2 + s_{-1}, ..., then the i Phi_2 nu shift
    rows = []
    acc = spec.s[0] / 2.0
    rows.append(acc.copy())
    for k in range(1, n):
        acc = acc + spec.block(-k)
        rows.append(acc.copy())
    phi1 = np.vstack(rows) + 1j * (phi2 @ spec.nu)
    pi = np.hstack([phi1, phi2])

    kappa = negative_index(s)
    return StructuredTriple(
        spec=spec,
        A=a,
        phi1=phi1,
        phi2=phi2,
        pi=pi,
        J=signature_j(p),
        S=s,
        S_inv=inverse_with_refinement(s),
        kappa=kappa,
        theta_count=1,  # sigma(A) = {i/2}: one point in C_+
    )


@dataclass(frozen=True)
class YMatrix:
    """Last block row Y of S^{-1}Pi with its t/q block decompositions."""

    Y: np.ndarray
    t_blocks: tuple[np.ndarray, ...]
    q_blocks: tuple[np.ndarray, ...]

    def tq_residual(self) -> float:
        """Max relative residual of t_{n,k} = q_{n,k} - q_{n,k+1}."""
        scale = max(spectral_norm(np.hstack(self.t_blocks)), np.finfo(float).tiny)
        worst = 0.0
        n = len(self.t_blocks)
        for k in range(n):
            nxt = self.q_blocks[k + 1] if k + 1 < n else np.zeros_like(self.q_blocks[k])
            worst = max(worst, rel_residual(self.t_blocks[k] - (self.q_blocks[k] - nxt), scale))
        return worst


def last_row_frame(triple: StructuredTriple) -> YMatrix:
    """Y = [0 ... 0 I_p] S^{-1} Pi plus the t and q block rows of S^{-1}."""
    p, n = triple.p, triple.n
    bottom = triple.S_inv[(n - 1) * p :, :]
    y = bottom @ triple.pi
    if rank_from_singular_values(y, eps=1e-10) < p:
        raise RankDeficientY("last block row of S^{-1}Pi lost rank")
    t_blocks = tuple(bottom[:, k * p : (k + 1) * p] for k in range(n))
    q_row = y @ triple.J @ triple.pi.conj().T @ triple.S_inv
    q_blocks = tuple(q_row[:, k * p : (k + 1) * p] for k in range(n))
    ym = YMatrix(Y=y, t_blocks=t_blocks, q_blocks=q_blocks)
    res = ym.tq_residual()
    if res > 1e-10:
        raise RankDeficientY(f"t/q block identity residual {res:.3e} exceeds 1e-10")
    return ym


@dataclass(frozen=True)
class DegeneracyReport:
    c4_prime: bool
    c9: bool
    c4_dprime: bool
    det_c4_prime: complex
    det_c9: complex
    det_c4_dprime: complex


def _det_nonzero(value: complex, scale: float) -> bool:
    return abs(value) > EPS_DET * max(scale, np.finfo(float).tiny)


def degeneracy_conditions(
    triple: StructuredTriple,
    param: HerglotzSpec | ContractionSpec,
) -> DegeneracyReport:
    """Evaluate the nondegeneracy determinants of the solution family.

    For a Herglotz parameter both equivalent forms are computed: the pair
    determinant det(Y J [psi(2i); iI]) and the reflected-frame determinant
    det(c(-2i) psi(2i)^* + i d(-2i)).  They vanish together, so a boolean
    disagreement is an internal inconsistency, not a property of the input.
    For a contraction the rotated determinant det(Y J W [I; phi0]) is used.
    """
    from .frame import eval_frame  # deferred: frame depends on this module

    p = triple.p
    y = last_row_frame(triple).Y
    ynorm = spectral_norm(y)

    if isinstance(param, ContractionSpec):
        stack = rotation_matrix(p) @ np.vstack([np.eye(p), param.phi0])
        det = complex(np.linalg.det(y @ triple.J @ stack))
        ok = _det_nonzero(det, (ynorm * spectral_norm(stack)) ** p)
        return DegeneracyReport(
            c4_prime=ok, c9=ok, c4_dprime=ok,
            det_c4_prime=det, det_c9=det, det_c4_dprime=det,
        )

    psi_2i = eval_herglotz(param, UPSILON)
    stack = np.vstack([psi_2i, 1j * np.eye(p)])
    det1 = complex(np.linalg.det(y @ triple.J @ stack))
    ok1 = _det_nonzero(det1, (ynorm * spectral_norm(stack)) ** p)

    frame = eval_frame(triple, -UPSILON)
    cd = np.hstack([frame.c, frame.d])
    stack2 = np.vstack([psi_2i.conj().T, 1j * np.eye(p)])
    det2 = complex(np.linalg.det(frame.c @ psi_2i.conj().T + 1j * frame.d))
    ok2 = _det_nonzero(det2, (spectral_norm(cd) * spectral_norm(stack2)) ** p)

    if ok1 != ok2:
        raise InconsistentConditions(
            f"pair determinant {det1:.3e} and frame determinant {det2:.3e} disagree"
        )

    try:
        phi0 = pair_to_contraction(psi_2i, 1j * np.eye(p))
        stack3 = rotation_matrix(p) @ np.vstack([np.eye(p), phi0])
        det3 = complex(np.linalg.det(y @ triple.J @ stack3))
        ok3 = _det_nonzero(det3, (ynorm * spectral_norm(stack3)) ** p)
    except SingularPhat:
        det3, ok3 = 0.0 + 0.0j, False

    return DegeneracyReport(
        c4_prime=ok1, c9=ok2, c4_dprime=ok3,
        det_c4_prime=det1, det_c9=det2, det_c4_dprime=det3,
    )


def resolvent_closed_form(triple: StructuredTriple, z: complex) -> np.ndarray:
    """Stacked-powers closed form of (A - (1/z) I)^{-1} Phi_2."""
    z = complex(z)
    denom = 1.0 - 0.5j * z
    factor = -z / denom
    ratio = (1.0 + 0.5j * z) / denom
    return np.vstack(
        [factor * (ratio**k) * np.eye(triple.p) for k in range(triple.n)]
    )


def resolvent_column(triple: StructuredTriple, z: complex) -> np.ndarray:
    """(A - (1/z) I)^{-1} Phi_2, checked against its closed form.

    The closed form is the scalar factor -z/(1 - (i/2)z) times the stacked
    powers of r = (1 + (i/2)z)/(1 - (i/2)z); the dense solve must agree to
    1e-11 relative or the call fails.
    """
    z = complex(z)
    if z == 0.0:
        raise PoleHit("z = 0 is excluded (1/z undefined)")
    if abs(z + 2j) <= 1e-9:
        raise PoleHit("1/z = i/2 lies in sigma(A)")
    p, n = triple.p, triple.n
    shifted = triple.A - (1.0 / z) * np.eye(n * p)
    dense = np.linalg.solve(shifted, triple.phi2)
    closed = resolvent_closed_form(triple, z)
    res = rel_residual(dense - closed, max(spectral_norm(closed), 1e-300))
    if res > 1e-11:
        raise PoleHit(f"resolvent closed form residual {res:.3e} at z={z}")
    return dense
