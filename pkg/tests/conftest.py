import numpy as np
import pytest

from indef_entropy.entropy import disk_zeros, q_hat, q_tilde
from indef_entropy.frame import SolutionHandle
from indef_entropy.parameters import HerglotzSpec
from indef_entropy.scenario import FLAGSHIP_SEEDS, generate_instance
from indef_entropy.toeplitz import ToeplitzSpec, build_structured_triple


class Flagship:
    """Bundled instance, triple, psi = i handle and cached disk zeros."""

    def __init__(self, kappa: int, p: int = 1, n: int = 3, seed: int | None = None):
        self.kappa = kappa
        self.seed = FLAGSHIP_SEEDS[kappa] if seed is None else seed
        self.spec, self.psi = generate_instance(self.seed, p, n, kappa)
        self.triple = build_structured_triple(self.spec)
        self.handle = SolutionHandle.create(self.triple, self.psi)
        self._zeros_tilde = None
        self._zeros_hat = None

    @property
    def zeros_tilde(self):
        if self._zeros_tilde is None:
            self._zeros_tilde = disk_zeros(lambda lam: q_tilde(self.handle, lam))
        return self._zeros_tilde

    @property
    def zeros_hat(self):
        if self._zeros_hat is None:
            self._zeros_hat = disk_zeros(lambda lam: q_hat(self.handle, lam))
        return self._zeros_hat


@pytest.fixture(scope="session")
def flagship_definite() -> Flagship:
    return Flagship(kappa=0)


@pytest.fixture(scope="session")
def flagship_indefinite() -> Flagship:
    return Flagship(kappa=1)


@pytest.fixture(scope="session")
def flagship_block() -> Flagship:
    """A p = 2 instance to keep the block paths honest."""
    return Flagship(kappa=1, p=2, n=2, seed=8)


@pytest.fixture(scope="session")
def tiny_spec() -> ToeplitzSpec:
    """The hand-checkable p=1, n=2, s0=2, s1=1 instance."""
    return ToeplitzSpec(
        p=1, n=2, s=(np.array([[2.0]]), np.array([[1.0]])), nu=np.zeros((1, 1))
    )


@pytest.fixture(scope="session")
def tiny_handle(tiny_spec) -> SolutionHandle:
    triple = build_structured_triple(tiny_spec)
    return SolutionHandle.create(triple, HerglotzSpec.constant_i(1))


@pytest.fixture(scope="session")
def trivial_handle() -> SolutionHandle:
    """n=1, s0=2, psi = i: the solution collapses to phi = i, omega_star = 1."""
    spec = ToeplitzSpec(p=1, n=1, s=(np.array([[2.0]]),), nu=np.zeros((1, 1)))
    return SolutionHandle.create(
        build_structured_triple(spec), HerglotzSpec.constant_i(1)
    )


def random_herglotz(rng: np.random.Generator, p: int = 1) -> HerglotzSpec:
    """Random rational Herglotz parameter with PSD offset (so E* is finite)."""

    def psd(scale=1.0):
        m = rng.standard_normal((p, p)) + 1j * rng.standard_normal((p, p))
        return scale * (m @ m.conj().T) / p + 0.05 * np.eye(p)

    herm = rng.standard_normal((p, p)) + 1j * rng.standard_normal((p, p))
    herm = 0.5 * (herm + herm.conj().T)
    n_poles = int(rng.integers(0, 3))
    poles = []
    while len(poles) < n_poles:
        t = float(rng.uniform(-4, 4))
        if all(abs(t - s) > 0.3 for s in poles):
            poles.append(t)
    return HerglotzSpec(
        B=psd(0.3) if rng.random() < 0.5 else np.zeros((p, p)),
        C=herm,
        imag_offset=psd(1.0),
        poles=tuple(poles),
        residues=tuple(psd(1.0) for _ in poles),
    )
