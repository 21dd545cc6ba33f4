"""Taylor data of the disk-side solution and block Toeplitz extensions.

omega_star expands as (s_0/2 - i nu) + s_1 lambda + ... + s_{n-1} lambda^{n-1}
+ s_n lambda^n + ...: the first n coefficients reproduce the prescribed
blocks, the further ones extend the Toeplitz matrix while preserving its
negative index.  Coefficients are extracted by the Cauchy integral on a
circle (trapezoid rule = FFT), confirmed at a second radius.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._linalg import negative_index, spectral_norm
from .errors import (
    AmbiguousInertia,
    CoefficientMismatch,
    NonConvergent,
    PoleInsideRadius,
    SolutionPole,
)
from .frame import SolutionHandle, eval_omega_star
from .toeplitz import ToeplitzSpec, assemble_toeplitz

__all__ = [
    "TaylorSeries",
    "ExtensionReport",
    "taylor_coefficients",
    "build_extension",
    "verify_solution",
]

#: Ratio of confirmation radius to extraction radius.
CONFIRM_FACTOR = 0.8


@dataclass(frozen=True)
class TaylorSeries:
    """Coefficients c_0..c_m of omega_star with a two-radius error estimate."""

    coeffs: tuple[np.ndarray, ...]
    radius: float
    error_estimate: float

    def __len__(self) -> int:
        return len(self.coeffs)


def _circle_coefficients(
    handle: SolutionHandle, m: int, radius: float, nodes: int
) -> tuple[list[np.ndarray], float]:
    """Cauchy coefficients c_0..c_m on |lambda| = radius; returns max |value|."""
    p = handle.p
    values = np.empty((nodes, p, p), dtype=np.complex128)
    for j in range(nodes):
        lam = radius * np.exp(2j * np.pi * j / nodes)
        try:
            values[j] = eval_omega_star(handle, lam)
        except SolutionPole as exc:
            raise PoleInsideRadius(
                f"solution pole on or near the circle |lambda|={radius}"
            ) from exc
    transform = np.fft.fft(values, axis=0) / nodes
    coeffs = [transform[k] * radius ** (-k) for k in range(m + 1)]
    return coeffs, float(np.max(np.abs(values)))


def taylor_coefficients(
    handle: SolutionHandle, m: int, radius: float = 0.5
) -> TaylorSeries:
    """Extract c_0..c_m at ``radius``, confirming at CONFIRM_FACTOR * radius.

    The disagreement between the two extractions is compared per coefficient
    against max(1, |c_k|) and against the roundoff envelope of the Cauchy
    sums (node noise is amplified by r^{-k}); only a disagreement above both
    raises :class:`NonConvergent`.  A gross disagreement means the circle
    encloses a pole and raises :class:`PoleInsideRadius` instead.
    """
    if not 0.1 < radius < 0.9:
        raise ValueError("extraction radius must lie in (0.1, 0.9)")
    if m < 0:
        raise ValueError("need m >= 0")
    nodes = max(256, 8 * (m + 1))
    nodes = 1 << int(np.ceil(np.log2(nodes)))
    r2 = CONFIRM_FACTOR * radius

    coeffs, scale1 = _circle_coefficients(handle, m, radius, nodes)
    confirm, scale2 = _circle_coefficients(handle, m, r2, nodes)

    worst = 0.0
    converged = True
    for k in range(m + 1):
        diff = spectral_norm(coeffs[k] - confirm[k])
        rel = diff / max(1.0, spectral_norm(coeffs[k]))
        worst = max(worst, rel)
        envelope = 64.0 * np.finfo(float).eps * (
            scale1 * radius ** (-k) + scale2 * r2 ** (-k)
        )
        if rel > 1e-6 and diff > envelope:
            converged = False
    if not converged:
        if worst > 1e-2:
            raise PoleInsideRadius(
                f"two-radius disagreement {worst:.3e}; pole inside |lambda|={radius}"
            )
        raise NonConvergent(f"two-radius disagreement {worst:.3e} exceeds 1e-6")
    return TaylorSeries(coeffs=tuple(coeffs), radius=radius, error_estimate=worst)


@dataclass(frozen=True)
class ExtensionReport:
    """Inertia and determinant trace of the extensions S(n)..S(n_tilde)."""

    base_n: int
    extended_n: int
    kappas: tuple[int, ...]
    dets: tuple[complex, ...]
    match_residuals: tuple[float, ...]
    truncated: bool = False

    @property
    def passed(self) -> bool:
        return (
            not self.truncated
            and all(r <= 1e-6 for r in self.match_residuals)
            and len(set(self.kappas)) == 1
        )

    def to_json(self) -> dict:
        return {
            "base_n": self.base_n,
            "extended_n": self.extended_n,
            "kappas": list(self.kappas),
            "dets": [[v.real, v.imag] for v in self.dets],
            "match_residuals": list(self.match_residuals),
            "truncated": self.truncated,
            "passed": self.passed,
        }


def coefficient_residuals(spec: ToeplitzSpec, series: TaylorSeries) -> list[float]:
    """Relative residuals of c_0 vs s_0/2 - i nu and c_k vs s_k, k < n."""
    out = []
    target0 = spec.s[0] / 2.0 - 1j * spec.nu
    out.append(
        spectral_norm(series.coeffs[0] - target0) / max(1.0, spectral_norm(target0))
    )
    for k in range(1, spec.n):
        out.append(
            spectral_norm(series.coeffs[k] - spec.s[k])
            / max(1.0, spectral_norm(spec.s[k]))
        )
    return out


def extension_blocks(spec: ToeplitzSpec, series: TaylorSeries, count: int) -> list[np.ndarray]:
    """Blocks s_0..s_{count-1}: prescribed ones first, then Taylor data."""
    if len(series) < count:
        raise ValueError(f"series has {len(series)} coefficients, need {count}")
    blocks = list(spec.s)
    for k in range(spec.n, count):
        blocks.append(series.coeffs[k])
    return blocks[:count]


def build_extension(
    spec: ToeplitzSpec, series: TaylorSeries, n_tilde: int
) -> ToeplitzSpec:
    """Extend the spec to order n_tilde using the series coefficients.

    The first n coefficients must reproduce the prescribed data to 1e-6
    relative (c_0 determines s_0 only jointly with nu, so s_0 is carried
    over from the spec, never overwritten).
    """
    if n_tilde < spec.n:
        raise ValueError("n_tilde must be >= n")
    if len(series) < n_tilde:
        raise ValueError(f"series has {len(series)} coefficients, need {n_tilde}")
    residuals = coefficient_residuals(spec, series)
    if max(residuals) > 1e-6:
        raise CoefficientMismatch(
            f"first-{spec.n} coefficient residual {max(residuals):.3e} exceeds 1e-6"
        )
    if n_tilde == spec.n:
        return spec
    return ToeplitzSpec(
        p=spec.p,
        n=n_tilde,
        s=tuple(extension_blocks(spec, series, n_tilde)),
        nu=spec.nu,
    )


def verify_solution(
    handle: SolutionHandle,
    spec: ToeplitzSpec,
    depth: int = 16,
    radius: float = 0.5,
) -> ExtensionReport:
    """Check that the handle solves the interpolation problem for ``spec``.

    Extracts n + depth coefficients, reports the first-n residuals, then
    tracks the negative index and determinant of every extension
    S(n)..S(n+depth).  The sequence is truncated early (and marked) when a
    determinant underflows or the inertia becomes ambiguous.
    """
    series = taylor_coefficients(handle, spec.n + depth, radius=radius)
    residuals = coefficient_residuals(spec, series)
    blocks = extension_blocks(spec, series, spec.n + depth + 1)

    kappas: list[int] = []
    dets: list[complex] = []
    truncated = False
    for i in range(spec.n, spec.n + depth + 1):
        s_i = assemble_toeplitz(blocks, i)
        det = complex(np.linalg.det(s_i))
        try:
            kappas.append(negative_index(s_i))
        except AmbiguousInertia:
            truncated = True
            break
        dets.append(det)
        if abs(det) < 1e-300:
            truncated = True
            break
    return ExtensionReport(
        base_n=spec.n,
        extended_n=spec.n + len(kappas) - 1,
        kappas=tuple(kappas),
        dets=tuple(dets),
        match_residuals=tuple(residuals),
        truncated=truncated,
    )
