"""Entropy functionals, q-functions, disk zeros and the identity checks.

The entropy of a disk function with boundary density mu'(theta) is the
Poisson-weighted integral

    E(omega, lt) = -(1/4 pi) \\int_0^{2 pi} (1-|lt|^2)|e^{i theta}-lt|^{-2}
                                ln det(mu'(theta)) d theta,

computed here by adaptive composite 16-point Gauss-Legendre panels.  The
representation identities relate E of a solution to E of its parameter plus
log-modulus corrections from

    qt(lambda) = det(lambda^n (c psi + i d)(z(lambda)))

and its Blaschke factor over the zeros of qt in the disk.  Zeros are located
by argument-principle winding counts on subdivided polar cells with a Newton
polish, never by clearing denominators symbolically.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ._linalg import hermitian_part, imag_part, spectral_norm
from .errors import (
    BoundaryPole,
    CountMismatch,
    NoConvergence,
    NonIntegrable,
    ParameterPole,
    PoleProximity,
    ZeroOnContour,
)
from .frame import SolutionHandle, eval_frame, eval_omega_star, eval_solution
from .parameters import (
    ContractionSpec,
    HerglotzSpec,
    boundary_xi,
    cayley,
    cayley_star,
    eval_herglotz,
    pair_to_contraction,
    rotation_matrix,
)
from .toeplitz import last_row_frame

EPS_BDRY = 1e-4
_LOG_FLOOR = 1e-300
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)

__all__ = [
    "EntropyValue",
    "DiskZeros",
    "IdentityCheck",
    "poisson_entropy",
    "poisson_mean",
    "entropy_of_solution",
    "entropy_of_parameter",
    "q_tilde",
    "q_hat",
    "disk_zeros",
    "blaschke_eval",
    "entropy_identity_check",
    "outer_poisson_check",
]


# ---------------------------------------------------------------------------
# Poisson quadrature
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EntropyValue:
    value: float
    lambda_tilde: complex
    nodes_used: int
    error_estimate: float
    integrand_kind: str

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "lambda_tilde": [self.lambda_tilde.real, self.lambda_tilde.imag],
            "nodes_used": self.nodes_used,
            "error_estimate": self.error_estimate,
            "integrand_kind": self.integrand_kind,
        }


def _poisson_kernel(theta: float, lt: complex) -> float:
    return (1.0 - abs(lt) ** 2) / abs(np.exp(1j * theta) - lt) ** 2


def poisson_mean(
    g: Callable[[float], float],
    lambda_tilde: complex,
    *,
    tol: float = 1e-8,
    max_nodes: int = 2**18,
    min_width: float = 1e-8,
) -> tuple[float, int, float]:
    """(1/2 pi) \\int_0^{2 pi} P(theta, lt) g(theta) d theta, adaptively.

    Returns (value, nodes_used, error_estimate).  Worst-first refinement on
    16-point Gauss-Legendre panels: the panel with the largest whole-vs-
    halves difference is bisected until the summed difference falls under
    ``tol``.  Panels at ``min_width`` (integrable log spikes) or at the
    roundoff floor are frozen as they stand.
    """
    import heapq

    lt = complex(lambda_tilde)
    if abs(lt) >= 1.0 - EPS_BDRY:
        raise ValueError("lambda_tilde must satisfy |lt| < 1 - 1e-4")

    def integrand(theta: float) -> float:
        return _poisson_kernel(theta, lt) * g(theta)

    nodes_used = 0

    def gl(a: float, b: float) -> float:
        nonlocal nodes_used
        half = 0.5 * (b - a)
        mid = 0.5 * (a + b)
        nodes_used += _GL_NODES.size
        return half * float(
            np.sum(_GL_WEIGHTS * np.array([integrand(mid + half * x) for x in _GL_NODES]))
        )

    def make_panel(a: float, b: float, coarse: float | None = None):
        if coarse is None:
            coarse = gl(a, b)
        mid = 0.5 * (a + b)
        left, right = gl(a, mid), gl(mid, b)
        # (err, a, b, refined value, left half, right half)
        return (abs(left + right - coarse), a, b, left + right, left, right)

    root = make_panel(0.0, 2.0 * np.pi)
    heap = [(-root[0], root[1], root)]
    frozen: list[tuple] = []
    err_sum = root[0]
    while heap and err_sum > tol:
        neg_err, _, panel = heapq.heappop(heap)
        err, a, b, value, left, right = panel
        width = b - a
        floor = 1e-14 * (1.0 + abs(value))
        if width <= 2.0 * min_width or err <= floor:
            frozen.append(panel)  # cannot usefully improve; keep its error
            continue
        if nodes_used > max_nodes:
            raise NoConvergence(
                f"node budget {max_nodes} exhausted with error sum {err_sum:.3e}"
            )
        mid = 0.5 * (a + b)
        child_l = make_panel(a, mid, coarse=left)
        child_r = make_panel(mid, b, coarse=right)
        err_sum += child_l[0] + child_r[0] - err
        heapq.heappush(heap, (-child_l[0], child_l[1], child_l))
        heapq.heappush(heap, (-child_r[0], child_r[1], child_r))
    panels = frozen + [entry[2] for entry in heap]
    panels.sort(key=lambda panel: panel[1])  # deterministic summation order
    total = sum(panel[3] for panel in panels)
    err_total = sum(panel[0] for panel in panels)
    if err_total > 100.0 * tol:
        raise NoConvergence(
            f"refinement stalled with error sum {err_total:.3e} above {tol:.1e}"
        )
    return total / (2.0 * np.pi), nodes_used, err_total / (2.0 * np.pi)


def poisson_entropy(
    boundary_log_det: Callable[[float], float],
    lambda_tilde: complex,
    *,
    tol: float = 1e-8,
    max_nodes: int = 2**18,
    integrand_kind: str = "solution-omega-star",
) -> EntropyValue:
    """-(1/4 pi) Poisson integral of the boundary log-determinant."""
    mean, nodes, err = poisson_mean(
        boundary_log_det, lambda_tilde, tol=tol, max_nodes=max_nodes
    )
    return EntropyValue(
        value=-0.5 * mean,
        lambda_tilde=complex(lambda_tilde),
        nodes_used=nodes,
        error_estimate=0.5 * err,
        integrand_kind=integrand_kind,
    )


def _logdet_nonneg(mat: np.ndarray, scale_ref: float) -> float:
    """ln det of a nominally PSD Hermitian matrix with roundoff guarding."""
    det = np.linalg.det(hermitian_part(mat))
    d = float(det.real)
    if d < -1e-6 * max(scale_ref, np.finfo(float).tiny):
        raise NonIntegrable(
            f"boundary density determinant {d:.3e} clearly negative"
        )
    return float(np.log(max(abs(d), _LOG_FLOOR)))


def _solution_boundary(handle: SolutionHandle, star: bool) -> Callable[[float], float]:
    """Radial-limit boundary ln det Re omega(_star) with one Richardson step."""
    r0, r1 = 1.0 - 1e-7, 1.0 - 2e-7

    def omega(lam: complex) -> np.ndarray:
        if star:
            return eval_omega_star(handle, lam)
        return -1j * eval_solution(handle, cayley(lam))

    # reference scale for the negativity guard, from a coarse sweep
    thetas = np.linspace(0.0, 2.0 * np.pi, 33)[:-1] + 0.05
    scales = []
    for th in thetas:
        try:
            w = omega(r0 * np.exp(1j * th))
            scales.append(abs(np.linalg.det(hermitian_part(w))))
        except Exception:
            continue
    scale_ref = max(scales) if scales else 1.0

    def boundary(theta: float) -> float:
        lam0 = r0 * np.exp(1j * theta)
        lam1 = r1 * np.exp(1j * theta)
        w = 2.0 * omega(lam0) - omega(lam1)
        return _logdet_nonneg(w, scale_ref)

    return boundary


def entropy_of_solution(
    handle: SolutionHandle,
    lambda_tilde: complex,
    star: bool = True,
    *,
    tol: float = 1e-8,
) -> EntropyValue:
    """Entropy of the interpolant's disk function (starred by default)."""
    return poisson_entropy(
        _solution_boundary(handle, star),
        lambda_tilde,
        tol=tol,
        integrand_kind="solution-omega-star",
    )


def entropy_of_parameter(
    param: HerglotzSpec | ContractionSpec,
    lambda_tilde: complex,
    star: bool = True,
    *,
    tol: float = 1e-8,
) -> EntropyValue:
    """Entropy of the parameter itself.

    For a Herglotz parameter the a.e. boundary density on the real axis is
    the constant imag_offset (all other terms are Hermitian at real points),
    so the boundary integrand is ln det(imag_offset).  For a contraction the
    integrand is ln det(I - phi0^* phi0).
    """
    del star  # both boundary parametrizations see the same constant density
    if isinstance(param, HerglotzSpec):
        d = param.imag_offset
        det = float(np.linalg.det(hermitian_part(d)).real)
        if det <= 0.0:
            raise NonIntegrable("parameter boundary density is singular")
        boundary_value = float(np.log(det))
        kind = "parameter-psi"
    else:
        gram = np.eye(param.p) - param.phi0.conj().T @ param.phi0
        det = float(np.linalg.det(hermitian_part(gram)).real)
        if det <= 0.0:
            raise NonIntegrable("contraction boundary density is singular")
        boundary_value = float(np.log(det))
        kind = "contraction-E-hat"
    return poisson_entropy(
        lambda theta: boundary_value,
        lambda_tilde,
        tol=tol,
        integrand_kind=kind,
    )


def contraction_entropy(
    boundary_gram_logdet: Callable[[float], float],
    lambda_tilde: complex,
    *,
    tol: float = 1e-8,
) -> EntropyValue:
    """Entropy of a disk contraction from its boundary ln det(I - g^* g)."""
    return poisson_entropy(
        boundary_gram_logdet,
        lambda_tilde,
        tol=tol,
        integrand_kind="contraction-E-hat",
    )


# ---------------------------------------------------------------------------
# q-functions
# ---------------------------------------------------------------------------


def _scaled_det(lam: complex, mat: np.ndarray, power: int) -> complex:
    """lambda^power * det(mat) via slogdet, safe for tiny |lambda|."""
    sign, logabs = np.linalg.slogdet(mat)
    if sign == 0.0 or not np.isfinite(logabs):
        return 0.0 + 0.0j
    return complex(sign) * cmath.exp(logabs + power * cmath.log(lam))


def _induced_contraction(psi: HerglotzSpec, z: complex) -> np.ndarray:
    """Pointwise contraction of the pair {psi, iI} at z."""
    p = psi.p
    return pair_to_contraction(eval_herglotz(psi, z), 1j * np.eye(p))


def q_tilde(handle: SolutionHandle, lam: complex) -> complex:
    """det(lambda^n (c psi + i d)(z(lambda))); closed form at lambda = 0.

    At the origin the frame pole cancels against lambda^n and
    qt(0) = (-1)^{pn} det(Y [iI; psi(2i)]).
    """
    if handle.mode != "pair":
        raise ParameterPole("q_tilde needs a pair-mode handle; use q_hat")
    lam = complex(lam)
    p, n = handle.triple.p, handle.triple.n
    psi = handle.param
    if lam == 0.0:
        y = last_row_frame(handle.triple).Y
        stack = np.vstack([1j * np.eye(p), eval_herglotz(psi, 2j)])
        return complex((-1.0) ** (p * n) * np.linalg.det(y @ stack))
    z = cayley(lam)
    frame = eval_frame(handle.triple, z)
    den = frame.c @ eval_herglotz(psi, z) + 1j * frame.d
    return _scaled_det(lam, den, p * n)


def q_hat(handle: SolutionHandle, lam: complex) -> complex:
    """det(lambda^n (chat + dhat phi)(z(lambda))) for the contractive form.

    Pair-mode handles use the contraction induced pointwise from the pair
    {psi, iI}; contraction-mode handles use their constant phi0.
    """
    lam = complex(lam)
    p, n = handle.triple.p, handle.triple.n
    if lam == 0.0:
        y = last_row_frame(handle.triple).Y
        if handle.mode == "pair":
            phi0 = _induced_contraction(handle.param, 2j)
        else:
            phi0 = handle.param.phi0
        stack = handle.triple.J @ rotation_matrix(p) @ np.vstack([np.eye(p), phi0])
        return complex((-1.0) ** (p * n) * np.linalg.det(y @ stack))
    z = cayley(lam)
    frame = eval_frame(handle.triple, z)
    if handle.mode == "pair":
        phi = _induced_contraction(handle.param, z)
    else:
        phi = handle.param.phi0
    den = frame.c_hat + frame.d_hat @ phi
    return _scaled_det(lam, den, p * n)


# ---------------------------------------------------------------------------
# Zeros in the disk
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DiskZeros:
    """Zeros (with multiplicities) of an analytic function inside the disk."""

    zeros: tuple[tuple[complex, int], ...]
    total_count: int
    distinct_count: int

    def moduli(self) -> list[float]:
        out: list[float] = []
        for lam, mult in self.zeros:
            out.extend([abs(lam)] * mult)
        return out

    def to_json(self) -> dict:
        return {
            "zeros": [
                {"re": lam.real, "im": lam.imag, "multiplicity": m}
                for lam, m in self.zeros
            ],
            "total_count": self.total_count,
            "distinct_count": self.distinct_count,
        }


def blaschke_eval(zeros: DiskZeros, lam: complex) -> complex:
    """prod_j ((lambda - lambda_j)/(1 - conj(lambda_j) lambda))^{m_j}."""
    lam = complex(lam)
    out = 1.0 + 0.0j
    for lam_j, mult in zeros.zeros:
        out *= ((lam - lam_j) / (1.0 - lam_j.conjugate() * lam)) ** mult
    return out


_ZERO_TOL = 1e-13  # |f| below this times scale counts as "on the contour"
_MERGE_TOL = 1e-7
_JITTER = ((0.0, 0.0), (0.07, -0.05), (-0.11, 0.08), (0.13, 0.11), (-0.06, -0.13))


def _arc(r: float, a0: float, a1: float) -> Callable[[float], complex]:
    return lambda t: r * np.exp(1j * ((1.0 - t) * a0 + t * a1))


def _radial(r0: float, r1: float, a: float) -> Callable[[float], complex]:
    phase = np.exp(1j * a)
    return lambda t: ((1.0 - t) * r0 + t * r1) * phase


def _cell_pieces(r0, r1, a0, a1) -> list[Callable[[float], complex]]:
    if abs((a1 - a0) - 2.0 * np.pi) < 1e-15:
        pieces = [_arc(r1, a0, a1)]
        if r0 > 0.0:
            pieces.append(_arc(r0, a1, a0))
        return pieces
    pieces = [_radial(r0, r1, a0), _arc(r1, a0, a1), _radial(r1, r0, a1)]
    if r0 > 0.0:
        pieces.append(_arc(r0, a1, a0))
    return pieces


def _piece_arg_change(f, piece, scale: float, budget: list[int], init: int) -> float:
    """Continuous argument change of f along a parametrized path piece.

    A span is accepted only when both the principal phase step and the
    log-modulus step are small; a pair of zeros close to the contour whips
    the phase by ~2 pi between calm endpoints, and the modulus dip is what
    betrays it.
    """
    ts = list(np.linspace(0.0, 1.0, init))
    vals = []
    for t in ts:
        v = complex(f(piece(t)))
        if abs(v) <= _ZERO_TOL * scale:
            raise ZeroOnContour(f"|f|={abs(v):.3e} on the contour")
        vals.append(v)
        budget[0] -= 1
    total = 0.0
    stack = [(ts[i], ts[i + 1], vals[i], vals[i + 1]) for i in range(len(ts) - 1)]
    stack.reverse()
    while stack:
        t0, t1, f0, f1 = stack.pop()
        d = cmath.phase(f1 / f0)
        if abs(d) <= 0.4 * np.pi and abs(np.log(abs(f1 / f0))) <= 0.7:
            total += d
            continue
        if t1 - t0 < 1e-10:
            raise ZeroOnContour("argument varies too fast; zero on contour")
        if budget[0] <= 0:
            raise ZeroOnContour("winding evaluation budget exhausted")
        tm = 0.5 * (t0 + t1)
        fm = complex(f(piece(tm)))
        budget[0] -= 1
        if abs(fm) <= _ZERO_TOL * scale:
            raise ZeroOnContour(f"|f|={abs(fm):.3e} on the contour")
        stack.append((tm, t1, fm, f1))
        stack.append((t0, tm, f0, fm))
    return total


def _winding(f, pieces, scale: float, budget: list[int], init: int = 17) -> int:
    total = sum(_piece_arg_change(f, piece, scale, budget, init) for piece in pieces)
    w = total / (2.0 * np.pi)
    wi = int(round(w))
    if abs(w - wi) > 0.1:
        raise ZeroOnContour(f"non-integer winding {w:.3f}")
    if wi < 0:
        raise ZeroOnContour(f"negative winding {wi}; f not analytic inside?")
    return wi


def _derivative(f, z: complex) -> complex:
    h = 1e-6 * max(1e-3, abs(z))
    return (complex(f(z + h)) - complex(f(z - h))) / (2.0 * h)


def _polish(f, z0: complex, mult: int) -> tuple[complex, float]:
    """Newton iteration with multiplicity; returns (root, last step size)."""
    z = complex(z0)
    step = np.inf
    for _ in range(60):
        df = _derivative(f, z)
        if df == 0.0:
            break
        delta = mult * complex(f(z)) / df
        z -= delta
        step = abs(delta)
        if step < 1e-14 * max(1.0, abs(z)):
            break
    return z, step


def _confirm_winding(f, z: complex, scale: float, budget: list[int]) -> int:
    radius = 1e-5 * max(1.0, abs(z))
    for _ in range(4):
        try:
            return _winding(f, [_cell_piece_circle(z, radius)], scale, budget,
                            init=17)
        except ZeroOnContour:
            radius *= 1.9
    raise ZeroOnContour("could not confirm multiplicity by a small circle")


def _cell_piece_circle(center: complex, radius: float) -> Callable[[float], complex]:
    return lambda t: center + radius * np.exp(2j * np.pi * t)


def _angle_inside(z: complex, a0: float, a1: float, margin: float = 1e-9) -> bool:
    rel = (np.angle(z) - a0) % (2.0 * np.pi)
    return margin < rel < (a1 - a0) - margin


class _Restart(Exception):
    """Internal: winding attribution broke; retry at higher density."""


def _locate_zeros(f, radius, total, scale, budget, init) -> list[tuple[complex, int]]:
    found: list[tuple[complex, int]] = []
    stack: list[tuple[float, float, float, float, int]] = [
        (0.0, radius, 0.0, 2.0 * np.pi, total)
    ]
    while stack:
        r0, r1, a0, a1, w = stack.pop()
        full_span = abs((a1 - a0) - 2.0 * np.pi) < 1e-12
        diam = max(r1 - r0, r1 * (a1 - a0))
        center = 0.5 * (r0 + r1) * np.exp(0.5j * (a0 + a1))
        if diam < 0.05:
            z, _ = _polish(f, center, w)
            inside = (
                r0 + 1e-9 < abs(z) < r1 - 1e-9 and _angle_inside(z, a0, a1)
            )
            if inside and abs(complex(f(z))) <= 1e-10 * scale:
                try:
                    if _confirm_winding(f, z, scale, budget) == w:
                        found.append((z, w))
                        continue
                except ZeroOnContour:
                    pass
        if diam < 1e-9:
            found.append((center, w))  # last resort; the count check guards
            continue
        for attempt, (jr, ja) in enumerate(_JITTER):
            rm = r0 + (r1 - r0) * (0.5 + jr)
            if full_span:
                # rotate the angular cuts so no fixed edge can pin a zero
                b = a0 + 0.313 + 0.71 * attempt
                children = [
                    (r0, rm, b, b + np.pi), (r0, rm, b + np.pi, b + 2.0 * np.pi),
                    (rm, r1, b, b + np.pi), (rm, r1, b + np.pi, b + 2.0 * np.pi),
                ]
            else:
                am = a0 + (a1 - a0) * (0.5 + ja)
                children = [
                    (r0, rm, a0, am), (r0, rm, am, a1),
                    (rm, r1, a0, am), (rm, r1, am, a1),
                ]
            try:
                ws = [
                    _winding(f, _cell_pieces(*child), scale, budget, init)
                    for child in children
                ]
            except ZeroOnContour:
                continue
            if sum(ws) != w:
                continue  # a zero sits on an internal edge; jitter again
            for child, cw in zip(children, ws):
                if cw > 0:
                    stack.append((*child, cw))
            break
        else:
            # every jitter failed: double-check the cell's own winding; a
            # disagreement means an ancestor mis-attributed a zero pair
            own = _winding(f, _cell_pieces(r0, r1, a0, a1), scale, budget,
                           init=4 * init)
            if own != w:
                raise _Restart(f"cell winding {w} -> {own} on re-count")
            raise ZeroOnContour(
                f"cell ({r0:.3g},{r1:.3g})x({a0:.3g},{a1:.3g}) resisted jittering"
            )
    return found


def disk_zeros(
    f: Callable[[complex], complex],
    search_radius: float = 1.0 - 1e-4,
    *,
    max_evals: int = 2_000_000,
) -> DiskZeros:
    """Zeros of an analytic f inside |lambda| < search_radius.

    Argument-principle winding on the outer circle fixes the total count;
    polar cells (annular sectors) are subdivided, each keeping its own
    winding, until Newton polish with the cell's multiplicity converges
    strictly inside the cell and a small-circle winding confirms it.  Cell
    splits are jittered when a contour grazes a zero, and the whole pass
    restarts at higher sampling density if the winding bookkeeping breaks
    (close zero pairs can alias a 2 pi phase whip at coarse sampling).
    """
    scale_samples = [abs(complex(f(search_radius * np.exp(2j * np.pi * k / 64))))
                     for k in range(64)]
    scale = float(np.median(scale_samples))
    if scale == 0.0:
        raise ZeroOnContour("f vanishes identically on the outer circle?")
    f0 = abs(complex(f(0.0)))
    if f0 <= _ZERO_TOL * scale:
        raise ZeroOnContour("f(0) = 0 violates the search precondition")

    budget = [max_evals]
    radius = search_radius
    total = None
    for k in range(5):
        try:
            total = _winding(f, _cell_pieces(0.0, radius, 0.0, 2.0 * np.pi),
                             scale, budget, init=33)
            break
        except ZeroOnContour:
            radius = search_radius * (1.0 - 3e-4 * (k + 1))
    if total is None:
        raise ZeroOnContour("outer circle winding failed after retries")
    if total == 0:
        return DiskZeros(zeros=(), total_count=0, distinct_count=0)

    found = None
    last_mismatch = None
    for init in (17, 33, 65):
        try:
            candidate = _locate_zeros(f, radius, total, scale, budget, init)
        except _Restart:
            continue
        count = sum(m for _, m in candidate)
        if count == total:
            found = candidate
            break
        last_mismatch = count
    if found is None:
        raise CountMismatch(
            f"polished zeros count {last_mismatch} != winding {total}"
        )

    merged: list[tuple[complex, int]] = []
    for z, m in sorted(found, key=lambda km: (abs(km[0]), np.angle(km[0]))):
        for idx, (z0, m0) in enumerate(merged):
            if abs(z - z0) < _MERGE_TOL:
                merged[idx] = (z0, m0 + m)
                break
        else:
            merged.append((z, m))
    for z, _ in merged:
        if abs(z) > 1.0 - EPS_BDRY:
            raise ZeroOnContour(
                f"zero at |lambda|={abs(z):.6f} inside the boundary band; "
                "degenerate instance"
            )
    return DiskZeros(
        zeros=tuple(merged),
        total_count=total,
        distinct_count=len(merged),
    )


# ---------------------------------------------------------------------------
# Identity checks
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IdentityCheck:
    lambda_tilde: complex
    pair_lhs: float
    pair_rhs: float
    pair_residual: float
    contractive_lhs: float
    contractive_rhs: float
    contractive_residual: float

    def to_json(self) -> dict:
        return {
            "lambda_tilde": [self.lambda_tilde.real, self.lambda_tilde.imag],
            "pair_lhs": self.pair_lhs,
            "pair_rhs": self.pair_rhs,
            "pair_residual": self.pair_residual,
            "contractive_lhs": self.contractive_lhs,
            "contractive_rhs": self.contractive_rhs,
            "contractive_residual": self.contractive_residual,
        }


def induced_gram_logdet(psi: HerglotzSpec, x: float) -> float:
    """ln det(I - phi^* phi) at a real point, phi induced by the pair {psi, iI}.

    Uses the exact rotation identity Phat^*Phat - Qhat^*Qhat = 2 Im psi,
    which turns the Gram determinant into

        det(I - phi^* phi) = 4^p det(Im psi) / |det(psi + i I)|^2,

    finite and smooth right up to the real poles of psi (where it decays to
    zero like an integrable power, with no cancellation in forming phi).
    """
    p = psi.p
    det_d = float(np.linalg.det(hermitian_part(psi.imag_offset)).real)
    val = eval_herglotz(psi, x)
    det_den = abs(complex(np.linalg.det(val + 1j * np.eye(p))))
    return (
        p * float(np.log(4.0))
        + float(np.log(max(det_d, _LOG_FLOOR)))
        - 2.0 * float(np.log(max(det_den, _LOG_FLOOR)))
    )


def _induced_gram_boundary(psi: HerglotzSpec) -> Callable[[float], float]:
    """Boundary ln det(I - phi^* phi) of the contraction induced by psi."""

    def boundary(theta: float) -> float:
        try:
            x = boundary_xi(theta)
        except BoundaryPole:
            x = 1e12  # theta within 1e-9 of the exceptional angle
        try:
            return induced_gram_logdet(psi, x)
        except PoleProximity:
            return induced_gram_logdet(psi, x + 3e-9)  # step off the guard band

    return boundary


def entropy_identity_check(
    handle: SolutionHandle,
    lambda_tilde: complex,
    *,
    zeros_tilde: DiskZeros | None = None,
    zeros_hat: DiskZeros | None = None,
    tol: float = 1e-8,
) -> IdentityCheck:
    """Both entropy representation identities at one interior point.

    Pair form (starred):    E*(phi, lt) = E*(psi, lt) + ln|qt(-lt)| - ln|Bt(-lt)|
    Contractive form:       E(phi, lt) = Ehat(phi_c, lt) + (p ln 2)/2
                                          + ln|qh(lt)| - ln|Bh(lt)|
    """
    if handle.mode != "pair":
        raise ParameterPole("identity check needs a pair-mode handle")
    lt = complex(lambda_tilde)
    psi: HerglotzSpec = handle.param
    p = handle.p

    if zeros_tilde is None:
        zeros_tilde = disk_zeros(lambda lam: q_tilde(handle, lam))
    if zeros_hat is None:
        zeros_hat = disk_zeros(lambda lam: q_hat(handle, lam))

    pair_lhs = entropy_of_solution(handle, lt, star=True, tol=tol).value
    pair_rhs = (
        entropy_of_parameter(psi, lt, star=True, tol=tol).value
        + float(np.log(abs(q_tilde(handle, -lt))))
        - float(np.log(abs(blaschke_eval(zeros_tilde, -lt))))
    )

    contr_lhs = entropy_of_solution(handle, lt, star=False, tol=tol).value
    contr_rhs = (
        contraction_entropy(_induced_gram_boundary(psi), lt, tol=tol).value
        + 0.5 * p * float(np.log(2.0))
        + float(np.log(abs(q_hat(handle, lt))))
        - float(np.log(abs(blaschke_eval(zeros_hat, lt))))
    )
    return IdentityCheck(
        lambda_tilde=lt,
        pair_lhs=pair_lhs,
        pair_rhs=pair_rhs,
        pair_residual=abs(pair_lhs - pair_rhs),
        contractive_lhs=contr_lhs,
        contractive_rhs=contr_rhs,
        contractive_residual=abs(contr_lhs - contr_rhs),
    )


def outer_poisson_check(
    handle: SolutionHandle,
    lambda_tilde: complex,
    *,
    zeros: DiskZeros | None = None,
    tol: float = 1e-8,
) -> float:
    """Residual of ln|D(lt)| against its boundary Poisson integral.

    D(lambda) = qt(lambda)/Bt(lambda) is outer, so its log-modulus is the
    Poisson integral of its boundary log-modulus; boundary values are taken
    at radius 1 - 1e-7 with one Richardson step.
    """
    lt = complex(lambda_tilde)
    if zeros is None:
        zeros = disk_zeros(lambda lam: q_tilde(handle, lam))

    def log_outer(lam: complex) -> float:
        return float(
            np.log(abs(q_tilde(handle, lam)))
            - np.log(abs(blaschke_eval(zeros, lam)))
        )

    r0, r1 = 1.0 - 1e-7, 1.0 - 2e-7

    def boundary(theta: float) -> float:
        phase = np.exp(1j * theta)
        return 2.0 * log_outer(r0 * phase) - log_outer(r1 * phase)

    mean, _, _ = poisson_mean(boundary, lt, tol=tol)
    return abs(log_outer(lt) - mean)
