"""Determinant-ratio sequences and the two Szego limit predictions.

For the block Toeplitz extensions S(i) generated by a solution, the ratios
det S(i) / det S(i-1) converge to

    2^p exp{-2 E*(phi, 0)} prod_j |lambda_j|^{-2},

where lambda_j runs over the disk zeros of qt counting multiplicities; the
product collapses to 1 in the positive definite case, recovering the
classical first limit formula for the parameter's own Toeplitz sequence.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._linalg import imag_part, negative_index
from .caratheodory import TaylorSeries, extension_blocks, taylor_coefficients
from .entropy import (
    DiskZeros,
    disk_zeros,
    entropy_of_parameter,
    entropy_of_solution,
    q_tilde,
)
from .errors import AmbiguousInertia, ConditioningBreakdown, PoleInsideRadius
from .frame import SolutionHandle, eval_solution
from .parameters import cayley_star
from .toeplitz import ToeplitzSpec, assemble_toeplitz

__all__ = [
    "SzegoReport",
    "LimitPrediction",
    "extension_radius",
    "determinant_sequence",
    "predict_limit",
    "szego_experiment",
]

DEFAULT_RADIUS = 0.6


def extension_radius(zeros: DiskZeros | None, default: float = DEFAULT_RADIUS) -> float:
    """Taylor extraction radius kept inside the innermost solution pole."""
    if zeros is None or zeros.total_count == 0:
        return default
    closest = min(abs(lam) for lam, _ in zeros.zeros)
    radius = min(default, 0.75 * closest)
    if radius <= 0.1:
        raise PoleInsideRadius(
            f"innermost disk zero at |lambda|={closest:.4f} leaves no room "
            "for coefficient extraction"
        )
    return radius


@dataclass(frozen=True)
class DeterminantSequence:
    dets: tuple[complex, ...]          # Lambda_i for i = 1..i_max
    log_ratios: tuple[float, ...]      # ln |Lambda_i / Lambda_{i-1}|
    ratio_signs: tuple[float, ...]     # sign of Lambda_i / Lambda_{i-1}
    kappas: tuple[int, ...]
    truncated: bool

    @property
    def i_max(self) -> int:
        return len(self.dets)

    def ratio(self, i: int) -> float:
        """Lambda_i / Lambda_{i-1} (real for Hermitian S with fixed inertia)."""
        return self.ratio_signs[i - 1] * float(np.exp(self.log_ratios[i - 1]))


def determinant_sequence(
    spec: ToeplitzSpec,
    handle: SolutionHandle,
    i_max: int,
    *,
    series: TaylorSeries | None = None,
    radius: float | None = None,
) -> DeterminantSequence:
    """Lambda_i = det S(i) for i = 1..i_max from the extension blocks.

    Each determinant comes from a fresh factorization (slogdet) so the
    ratios stay finite even when the Lambda themselves overflow.  The
    sequence is truncated and marked when a factorization degenerates.
    """
    if series is None:
        if radius is None:
            radius = DEFAULT_RADIUS
        series = taylor_coefficients(handle, i_max, radius=radius)
    blocks = extension_blocks(spec, series, i_max)

    dets: list[complex] = []
    logabs_prev = 0.0
    sign_prev = 1.0
    log_ratios: list[float] = []
    ratio_signs: list[float] = []
    kappas: list[int] = []
    truncated = False
    for i in range(1, i_max + 1):
        s_i = assemble_toeplitz(blocks, i)
        # S(i) is exactly Hermitian by assembly, so the determinant is the
        # product of real eigenvalues: sign and log-modulus come from the
        # eigendecomposition (a complex LU would leak a spurious imaginary
        # sign of order 1e-10 at i ~ 25).
        eigs = np.linalg.eigvalsh(s_i)
        if np.any(eigs == 0.0) or not np.all(np.isfinite(eigs)):
            truncated = True
            break
        try:
            kappas.append(negative_index(s_i))
        except AmbiguousInertia:
            truncated = True
            break
        sign = -1.0 if kappas[-1] % 2 else 1.0
        logabs = float(np.sum(np.log(np.abs(eigs))))
        dets.append(complex(sign * np.exp(min(logabs, 700.0))))
        log_ratios.append(logabs - logabs_prev)
        ratio_signs.append(sign / sign_prev)
        sign_prev, logabs_prev = sign, logabs
    if not dets:
        raise ConditioningBreakdown("no determinant could be computed")
    return DeterminantSequence(
        dets=tuple(dets),
        log_ratios=tuple(log_ratios),
        ratio_signs=tuple(ratio_signs),
        kappas=tuple(kappas),
        truncated=truncated,
    )


@dataclass(frozen=True)
class LimitPrediction:
    classical: float
    nonclassical: float
    nonclassical_integral_form: float
    blaschke_correction: float
    entropy_solution_at_zero: float
    entropy_parameter_at_zero: float

    def to_json(self) -> dict:
        return {
            "classical": self.classical,
            "nonclassical": self.nonclassical,
            "nonclassical_integral_form": self.nonclassical_integral_form,
            "blaschke_correction": self.blaschke_correction,
            "entropy_solution_at_zero": self.entropy_solution_at_zero,
            "entropy_parameter_at_zero": self.entropy_parameter_at_zero,
        }


def _log_density_integral(handle: SolutionHandle, n_nodes: int = 4096) -> float:
    """(1/2 pi) integral of ln det Im phi(2i(1-e^{i t})/(1+e^{i t})) dt.

    Independent of the adaptive machinery: midpoint rule on a fixed periodic
    grid, with Im phi evaluated directly on the real axis.
    """
    thetas = (np.arange(n_nodes) + 0.5) * (2.0 * np.pi / n_nodes)
    total = 0.0
    for theta in thetas:
        x = cayley_star(np.exp(1j * theta))
        density = imag_part(eval_solution(handle, complex(x.real)))
        det = float(np.linalg.det(density).real)
        total += float(np.log(max(abs(det), 1e-300)))
    return total / n_nodes


def predict_limit(handle: SolutionHandle, zeros: DiskZeros) -> LimitPrediction:
    """The limit predictions 2^p e^{-2 E*} (with and without correction).

    ``nonclassical_integral_form`` recomputes the entropy factor by a plain
    midpoint rule over the boundary symbol as an independent cross-check.
    """
    p = handle.p
    correction = 1.0
    for lam, mult in zeros.zeros:
        correction *= float(abs(lam)) ** (-2 * mult)

    e_solution = entropy_of_solution(handle, 0.0, star=True).value
    if handle.mode == "pair":
        e_param = entropy_of_parameter(handle.param, 0.0, star=True).value
    else:
        e_param = e_solution  # symbol-based classical value for contractions
    classical = 2.0**p * float(np.exp(-2.0 * e_param))
    nonclassical = 2.0**p * float(np.exp(-2.0 * e_solution)) * correction
    integral_form = 2.0**p * correction * float(np.exp(_log_density_integral(handle)))
    return LimitPrediction(
        classical=classical,
        nonclassical=nonclassical,
        nonclassical_integral_form=integral_form,
        blaschke_correction=correction,
        entropy_solution_at_zero=e_solution,
        entropy_parameter_at_zero=e_param,
    )


@dataclass(frozen=True)
class SzegoReport:
    ratios: tuple[tuple[int, float], ...]
    predicted_classical: float
    predicted_nonclassical: float
    predicted_integral_form: float
    blaschke_correction: float
    relative_errors: tuple[tuple[int, float], ...]
    kappas: tuple[int, ...]
    converged: bool
    tol_conv: float
    zeros: DiskZeros
    truncated: bool

    def to_json(self) -> dict:
        return {
            "ratios": [[i, r] for i, r in self.ratios],
            "predicted_classical": self.predicted_classical,
            "predicted_nonclassical": self.predicted_nonclassical,
            "predicted_integral_form": self.predicted_integral_form,
            "blaschke_correction": self.blaschke_correction,
            "relative_errors": [[i, e] for i, e in self.relative_errors],
            "kappas": list(self.kappas),
            "converged": self.converged,
            "tol_conv": self.tol_conv,
            "zeros": self.zeros.to_json(),
            "truncated": self.truncated,
        }


def szego_experiment(
    spec: ToeplitzSpec,
    handle: SolutionHandle,
    i_max: int = 32,
    *,
    tol_conv: float = 1e-2,
    series: TaylorSeries | None = None,
) -> SzegoReport:
    """Full limit experiment: ratios, predictions, dyadic convergence trend.

    The report is emitted even when the trend check fails; ``converged``
    records the verdict (relative error at i_max below tol_conv and
    non-increasing over the dyadic checkpoints 8, 16, 32).
    """
    zeros = disk_zeros(lambda lam: q_tilde(handle, lam))
    if series is None:
        radius = extension_radius(zeros)
        series = taylor_coefficients(handle, i_max, radius=radius)
    seq = determinant_sequence(spec, handle, i_max, series=series)
    prediction = predict_limit(handle, zeros)

    ratios = [(i, seq.ratio(i)) for i in range(1, seq.i_max + 1)]
    errors = [
        (i, abs(r - prediction.nonclassical) / abs(prediction.nonclassical))
        for i, r in ratios
    ]
    checkpoints = [i for i in (8, 16, 32) if i <= seq.i_max]
    err_at = dict(errors)
    # non-increasing over dyadic checkpoints, up to the roundoff floor where
    # the sequence has already saturated (rational symbols terminate exactly)
    floor = 1e-8
    trend_ok = all(
        err_at[b] <= err_at[a] or (err_at[a] <= floor and err_at[b] <= floor)
        for a, b in zip(checkpoints, checkpoints[1:])
    )
    converged = (
        not seq.truncated
        and seq.i_max == i_max
        and errors[-1][1] <= tol_conv
        and trend_ok
    )
    return SzegoReport(
        ratios=tuple(ratios),
        predicted_classical=prediction.classical,
        predicted_nonclassical=prediction.nonclassical,
        predicted_integral_form=prediction.nonclassical_integral_form,
        blaschke_correction=prediction.blaschke_correction,
        relative_errors=tuple(errors),
        kappas=seq.kappas,
        converged=converged,
        tol_conv=tol_conv,
        zeros=zeros,
        truncated=seq.truncated,
    )
