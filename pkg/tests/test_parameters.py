import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from indef_entropy.errors import BoundaryPole, InvalidSpec, PoleProximity
from indef_entropy.parameters import (
    ContractionSpec,
    HerglotzSpec,
    boundary_xi,
    cayley,
    cayley_inverse,
    cayley_star,
    contraction_to_pair,
    eval_herglotz,
    pair_to_contraction,
    pick_kernel,
    rotation_matrix,
    signature_j,
)

from conftest import random_herglotz


def test_constant_i():
    psi = HerglotzSpec.constant_i(2)
    for z in (1j, 1 + 1j, -3 + 0.2j):
        assert np.array_equal(eval_herglotz(psi, z), 1j * np.eye(2))


def test_linear_and_pole_examples():
    linear = HerglotzSpec(B=np.eye(1), C=np.zeros((1, 1)), imag_offset=np.zeros((1, 1)))
    assert eval_herglotz(linear, 1 + 1j)[0, 0] == 1 + 1j
    one_pole = HerglotzSpec(
        B=np.zeros((1, 1)),
        C=np.zeros((1, 1)),
        imag_offset=np.zeros((1, 1)),
        poles=(1.0,),
        residues=(np.eye(1),),
    )
    # 1/(1 - i) = (1 + i)/2
    assert abs(eval_herglotz(one_pole, 1j)[0, 0] - (1 + 1j) / 2) < 1e-15


def test_pole_proximity():
    one_pole = HerglotzSpec(
        B=np.zeros((1, 1)),
        C=np.zeros((1, 1)),
        imag_offset=np.zeros((1, 1)),
        poles=(2.0,),
        residues=(np.eye(1),),
    )
    with pytest.raises(PoleProximity):
        eval_herglotz(one_pole, 2.0 + 1e-12)


def test_lower_halfplane_reflection():
    rng = np.random.default_rng(0)
    psi = random_herglotz(rng, p=2)
    z = 0.7 + 1.3j
    assert np.allclose(eval_herglotz(psi, np.conj(z)),
                       eval_herglotz(psi, z).conj().T)


def test_herglotz_pick_kernel_psd():
    rng = np.random.default_rng(5)
    for _ in range(10):
        psi = random_herglotz(rng, p=2)
        pts = np.array([0.1 + 0.5j, -0.7 + 1.1j, 1.9 + 0.3j, 0.4 + 2.2j])
        vals = [eval_herglotz(psi, z) for z in pts]
        eigs = np.linalg.eigvalsh(pick_kernel(vals, pts))
        assert eigs.min() > -1e-8 * max(1.0, eigs.max())


def test_psd_validation():
    with pytest.raises(InvalidSpec):
        HerglotzSpec(B=-np.eye(1), C=np.zeros((1, 1)), imag_offset=np.zeros((1, 1)))


def test_contraction_strictness():
    ContractionSpec(phi0=0.5 * np.eye(2))
    with pytest.raises(InvalidSpec):
        ContractionSpec(phi0=np.eye(2))


def test_cayley_fixed_points():
    assert cayley(0.0) == 2j
    assert abs(cayley(-1.0)) < 1e-15
    assert abs(cayley_star(0.0) - 2j) < 1e-15


@settings(max_examples=50, deadline=None)
@given(re=st.floats(-0.95, 0.95), im=st.floats(-0.95, 0.95))
def test_cayley_round_trip(re, im):
    lam = complex(re, im)
    if abs(lam) >= 0.99:
        return
    z = cayley(lam)
    assert z.imag > 0
    assert abs(cayley_inverse(z) - lam) <= 1e-13


def test_boundary_xi_values():
    assert abs(boundary_xi(np.pi)) < 1e-12
    assert abs(boundary_xi(np.pi / 2) + 2.0) < 1e-12


def test_boundary_xi_real_sweep():
    thetas = np.linspace(1e-3, 2 * np.pi - 1e-3, 1000)
    for theta in thetas:
        xi = boundary_xi(theta)  # raises if the imaginary part survives
        assert np.isfinite(xi)


def test_boundary_pole():
    with pytest.raises(BoundaryPole):
        boundary_xi(0.0)


def test_rotation_matrix_property():
    for p in (1, 2, 3):
        w = rotation_matrix(p)
        j = signature_j(p)
        expected = np.diag([1.0] * p + [-1.0] * p)
        assert np.linalg.norm(w.conj().T @ j @ w - expected) < 1e-15


def test_pair_to_contraction_examples():
    # symmetric pair gives the zero contraction
    assert np.allclose(pair_to_contraction(1j * np.eye(2), 1j * np.eye(2)), 0.0)
    # {I, 0} maps to -I (boundary case)
    assert np.allclose(pair_to_contraction(np.eye(2), np.zeros((2, 2))), -np.eye(2))


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_pair_contraction_round_trip(seed):
    rng = np.random.default_rng(seed)
    p = int(rng.integers(1, 4))
    m = rng.standard_normal((p, p)) + 1j * rng.standard_normal((p, p))
    phi0 = 0.9 * m / max(1.0, np.linalg.norm(m, 2))
    p_mat, q_mat = contraction_to_pair(phi0)
    # property-J by construction
    sym = p_mat.conj().T @ q_mat + q_mat.conj().T @ p_mat
    assert np.linalg.eigvalsh(0.5 * (sym + sym.conj().T)).min() > -1e-12
    back = pair_to_contraction(p_mat, q_mat)
    assert np.linalg.norm(back - phi0, 2) <= 1e-12
    assert np.linalg.norm(back, 2) <= 1.0 + 1e-12
