import numpy as np
import pytest

from indef_entropy._linalg import count_negative_eigs, rel_residual
from indef_entropy.errors import FramePole
from indef_entropy.frame import (
    SolutionHandle,
    a_psi_matrix,
    eval_frame,
    eval_omega_star,
    eval_solution,
    g_function,
)
from indef_entropy.parameters import (
    ContractionSpec,
    HerglotzSpec,
    cayley,
    eval_herglotz,
    pair_to_contraction,
    pick_kernel,
)
from indef_entropy.scenario import generate_instance
from indef_entropy.toeplitz import ToeplitzSpec, build_structured_triple

from conftest import random_herglotz


def test_frame_identity_at_zero(flagship_definite):
    fr = eval_frame(flagship_definite.triple, 0.0)
    assert np.array_equal(fr.matrix, np.eye(2))


def test_frame_pole():
    spec = ToeplitzSpec(p=1, n=1, s=(np.array([[2.0]]),), nu=np.zeros((1, 1)))
    with pytest.raises(FramePole):
        eval_frame(build_structured_triple(spec), 2j)


def test_frame_worked_example_n1():
    # n=1, s0=2: U(z) = I - (iz/(2+iz)) * ones, derived by hand from the
    # rank-one resolvent
    spec = ToeplitzSpec(p=1, n=1, s=(np.array([[2.0]]),), nu=np.zeros((1, 1)))
    triple = build_structured_triple(spec)
    z = 1.0
    w = 1j * z / (2.0 + 1j * z)
    expected = np.eye(2) - w * np.ones((2, 2))
    fr = eval_frame(triple, z)
    assert np.allclose(fr.matrix, expected, atol=1e-14)
    j = triple.J
    assert np.linalg.norm(fr.matrix.conj().T @ j @ eval_frame(triple, z).matrix - j) < 1e-13


def test_j_unitarity_random_pairs(flagship_indefinite):
    triple = flagship_indefinite.triple
    rng = np.random.default_rng(11)
    for _ in range(100):
        z = complex(rng.uniform(-4, 4), rng.uniform(0.05, 4))
        u_conj = eval_frame(triple, np.conj(z)).matrix
        u = eval_frame(triple, z).matrix
        assert rel_residual(u_conj.conj().T @ triple.J @ u - triple.J, 1.0) <= 1e-10


def test_e9_inverse_identity(flagship_indefinite):
    # -[I 0] U(conj z)^* [iI; phi(z)] equals (c psi + i d)^{-1}
    handle = flagship_indefinite.handle
    triple = flagship_indefinite.triple
    psi = flagship_indefinite.psi
    rng = np.random.default_rng(2)
    p = triple.p
    for _ in range(20):
        z = complex(rng.uniform(-3, 3), rng.uniform(0.1, 3))
        fr = eval_frame(triple, z)
        phi = eval_solution(handle, z)
        u_conj = eval_frame(triple, np.conj(z)).matrix
        lhs = -np.hstack([np.eye(p), np.zeros((p, p))]) @ u_conj.conj().T @ np.vstack(
            [1j * np.eye(p), phi]
        )
        den = fr.c @ eval_herglotz(psi, z) + 1j * fr.d
        rhs = np.linalg.inv(den)
        assert rel_residual(lhs - rhs, max(np.linalg.norm(rhs, 2), 1e-300)) <= 1e-9


def test_identity_frame_solution_value():
    # at z = 0 the frame is the identity, so phi(0) = i psi(0) ... psi / i = psi
    spec = ToeplitzSpec(p=1, n=1, s=(np.array([[2.0]]),), nu=np.zeros((1, 1)))
    handle = SolutionHandle.create(
        build_structured_triple(spec), HerglotzSpec.constant_i(1)
    )
    assert np.allclose(eval_solution(handle, 0.0), 1j)


def test_pair_vs_contractive_forms(flagship_definite):
    # psi = i corresponds to phi0 = 0 under the pair rotation
    triple = flagship_definite.triple
    psi = flagship_definite.psi
    phi0 = pair_to_contraction(
        eval_herglotz(psi, 2j), 1j * np.eye(triple.p)
    )
    assert np.allclose(phi0, 0.0, atol=1e-14)
    pair_handle = SolutionHandle.create(triple, psi)
    contr_handle = SolutionHandle.create(triple, ContractionSpec(phi0=phi0))
    rng = np.random.default_rng(8)
    for _ in range(30):
        z = complex(rng.uniform(-3, 3), rng.uniform(0.05, 3))
        a = eval_solution(pair_handle, z)
        b = eval_solution(contr_handle, z)
        assert rel_residual(a - b, max(np.linalg.norm(a, 2), 1.0)) <= 1e-11


def test_solution_class_bound(flagship_indefinite):
    # Pick-kernel negative squares of phi on random grids stay <= kappa of S
    handle = flagship_indefinite.handle
    kappa = flagship_indefinite.triple.kappa
    rng = np.random.default_rng(21)
    for _ in range(10):
        pts = np.array(
            [complex(rng.uniform(-3, 3), rng.uniform(0.1, 3)) for _ in range(6)]
        )
        vals = [eval_solution(handle, z) for z in pts]
        gram = pick_kernel(vals, pts)
        assert count_negative_eigs(gram, eps=1e-8) <= kappa


def test_lower_halfplane_extension(flagship_definite):
    handle = flagship_definite.handle
    z = 1.1 + 0.9j
    assert np.allclose(
        eval_solution(handle, np.conj(z)), eval_solution(handle, z).conj().T
    )


def test_omega_star_at_zero_matches_data(flagship_indefinite):
    spec = flagship_indefinite.spec
    expected = spec.s[0] / 2.0 - 1j * spec.nu
    assert np.allclose(eval_omega_star(flagship_indefinite.handle, 0.0), expected)


def test_omega_star_reflection(flagship_definite):
    # omega_star(1/conj(lam)) = -omega_star(lam)^* from phi(z) = phi(conj z)^*
    handle = flagship_definite.handle
    rng = np.random.default_rng(4)
    for _ in range(10):
        lam = complex(rng.uniform(-0.7, 0.7), rng.uniform(-0.7, 0.7))
        if abs(lam) < 0.2:
            continue
        lhs = eval_omega_star(handle, 1.0 / np.conj(lam))
        rhs = -eval_omega_star(handle, lam).conj().T
        assert rel_residual(lhs - rhs, max(np.linalg.norm(rhs, 2), 1.0)) < 1e-10


def test_g_function_cross_identity(flagship_block):
    # the matched-point frame identity is asserted inside g_function itself
    triple = flagship_block.triple
    psi = flagship_block.psi
    rng = np.random.default_rng(14)
    for _ in range(20):
        z = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        if abs(z) < 0.1 or abs(z - 0.5j) < 0.2:
            continue
        g = g_function(triple, psi, z)
        assert np.all(np.isfinite(g))


def test_g_function_far_field():
    spec = ToeplitzSpec(p=1, n=1, s=(np.array([[2.0]]),), nu=np.zeros((1, 1)))
    triple = build_structured_triple(spec)
    g = g_function(triple, HerglotzSpec.constant_i(1), 1e6 * (1 + 1j))
    assert np.linalg.norm(g - np.eye(1), 2) <= 1e-6


def test_g_function_far_field_decay(flagship_definite):
    # deviation from the identity falls off like 1/|z| along a ray
    triple = flagship_definite.triple
    psi = flagship_definite.psi
    d1 = np.linalg.norm(g_function(triple, psi, 1e3 * (1 + 1j)) - np.eye(1), 2)
    d2 = np.linalg.norm(g_function(triple, psi, 1e6 * (1 + 1j)) - np.eye(1), 2)
    assert d2 <= 1e-2 * d1 * 1.1


def test_a_psi_specialization(flagship_definite):
    triple = flagship_definite.triple
    p = triple.p
    a_psi = a_psi_matrix(triple, np.zeros((p, p)))
    expected = triple.A - 1j * triple.phi2 @ triple.phi1.conj().T @ triple.S_inv
    assert np.allclose(a_psi, expected)


def test_a_psi_eigenvalue_bound(flagship_indefinite, flagship_definite):
    # constant psi = iI is strictly dissipative, so the number of
    # eigenvalues of A_psi in the upper half-plane is at most kappa
    for flag in (flagship_definite, flagship_indefinite):
        triple = flag.triple
        a_psi = a_psi_matrix(triple, 1j * np.eye(triple.p))
        eigs = np.linalg.eigvals(a_psi)
        upper = int(np.sum(eigs.imag > 1e-10))
        assert upper <= triple.kappa


def test_a_psi_identity_random_values(flagship_block):
    rng = np.random.default_rng(31)
    triple = flagship_block.triple
    for _ in range(5):
        psi_val = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        a_psi_matrix(triple, psi_val)  # raises if the identity fails


def test_g_function_random_herglotz():
    spec, _ = generate_instance(6, 1, 3, 0)
    triple = build_structured_triple(spec)
    rng = np.random.default_rng(9)
    for _ in range(10):
        psi = random_herglotz(rng)
        z = complex(rng.uniform(-2, 2), rng.uniform(0.3, 2))
        g_function(triple, psi, z)  # internal cross-check must hold
