import numpy as np
import pytest

from g2calib.boundary_split import random_coassociative_config, split_coassociative, standard_config
from g2calib.errors import DegenerateInputError, PreconditionError
from g2calib.symbol_index import (
    B_SYMBOL,
    P_PLUS_SYMBOL,
    V_CROSS,
    W_CROSS,
    BoundaryComponentData,
    SymbolMatrix,
    bqp_closed_form,
    bqp_symbol,
    calderon_symbol,
    cauchy_riemann_symbol,
    chirule_residual,
    complex_basis,
    cross_matrix,
    ebc_check,
    index_formula,
    maslov_from_index,
    psi_positive_closed_form,
    psi_positive_det_formula,
    psi_positive_ellipticity,
    r_blocks,
    symbol_R,
    unit_grid,
)

ETAS = list(unit_grid(360))


def block(upper_right, lower_left):
    m = np.zeros((4, 4), dtype=complex)
    m[:2, 2:] = upper_right
    m[2:, :2] = lower_left
    return m


# ---------------------------------------------------------------------------
# cross matrices


def test_displayed_cross_matrices():
    assert V_CROSS.equals(block([[0, 1], [-1, 0]], [[0, 1], [-1, 0]]))
    assert W_CROSS.equals(block([[0, -1j], [1j, 0]], [[0, 1j], [-1j, 0]]))


def test_cross_matrices_from_standard_split_exact():
    s = split_coassociative(standard_config())
    assert cross_matrix("v", s).equals(V_CROSS)
    assert cross_matrix("w", s).equals(W_CROSS)


def test_cross_matrices_from_random_splits():
    rng = np.random.default_rng(0)
    for _ in range(50):
        s = split_coassociative(random_coassociative_config(rng))
        assert cross_matrix("v", s).equals(V_CROSS)
        assert cross_matrix("w", s).equals(W_CROSS)


def test_complex_basis_relations():
    s = split_coassociative(standard_config())
    alpha, beta, alpha_bar, beta_bar = complex_basis(s).T
    # v x alpha = -beta_bar and w x alpha = -i beta_bar, read off the first column
    assert V_CROSS.entries[3, 0] == -1 and W_CROSS.entries[3, 0] == -1j
    # alpha, beta, conjugates form an orthogonal basis of nu^C
    G = complex_basis(s).conj().T @ complex_basis(s)
    assert np.allclose(G, 2 * np.eye(4), atol=1e-12)
    assert np.allclose(alpha.conj(), alpha_bar) and np.allclose(beta.conj(), beta_bar)


def test_cross_matrix_argument():
    with pytest.raises(ValueError):
        cross_matrix("u", split_coassociative(standard_config()))


def test_chirule_orthogonal_triples_1e4():
    rng = np.random.default_rng(1)
    from g2calib.g2_algebra import random_orthonormal_frames

    F = random_orthonormal_frames(rng, 10_000, 3)
    worst = max(chirule_residual(*f) for f in F[:10_000])
    assert worst < 1e-9


# ---------------------------------------------------------------------------
# sigma(R) and q


def test_symbol_R_displayed_blocks():
    for eta in (1, 1j, np.exp(0.3j)):
        r_minus, r_plus = r_blocks(eta)
        assert symbol_R(eta).equals(block(r_minus, r_plus), tol=1e-15)
    assert symbol_R((1, 0)).equals(block([[0, 1], [-1, 0]], [[0, -1], [1, 0]]))
    assert symbol_R((0, 1)).equals(block([[0, -1j], [1j, 0]], [[0, -1j], [1j, 0]]))


def test_symbol_R_involution_hermitian():
    for eta in ETAS:
        R = symbol_R(eta).entries
        assert np.allclose(R @ R, np.eye(4), atol=1e-12)
        assert np.allclose(R, R.conj().T, atol=1e-15)
        assert np.allclose(np.linalg.eigvalsh(R), [-1, -1, 1, 1], atol=1e-12)


def test_symbol_R_rejects_bad_covectors():
    with pytest.raises(DegenerateInputError):
        symbol_R((0, 0))
    with pytest.raises(PreconditionError):
        symbol_R(2)


def test_calderon_displayed_at_eta_one():
    q = calderon_symbol(1)
    expected = 0.5 * np.array([[1, 0, 0, 1], [0, 1, -1, 0], [0, -1, 1, 0], [1, 0, 0, 1]])
    assert q.equals(expected)


def test_calderon_is_rank_two_projector():
    for eta in ETAS:
        q = calderon_symbol(eta).entries
        R = symbol_R(eta).entries
        assert np.allclose(q @ q, q, atol=1e-12)
        assert np.allclose(q, q.conj().T)
        assert np.trace(q).real == pytest.approx(2)
        assert np.allclose(q @ R, q, atol=1e-12)
        assert np.allclose(q, 0.5 * (np.eye(4) + R), atol=0)


def test_calderon_exact_on_eighth_roots():
    # entries of sigma(R) are exact when eta is
    for eta in (1, 1j, -1, -1j):
        q = calderon_symbol(eta).entries
        r_minus, r_plus = r_blocks(eta)
        assert np.array_equal(q, 0.5 * (np.eye(4) + block(r_minus, r_plus)))


# ---------------------------------------------------------------------------
# ebc


def test_boundary_symbol_rank():
    assert B_SYMBOL.equals([[0, 1, 0, 0], [0, 0, 0, 1]])
    assert np.sum(B_SYMBOL.singular_values() > 1e-9) == 2


def test_ebc_check_360():
    rep = ebc_check(360)
    assert rep.passed and rep.boundary_rank == 2
    # oracle: sigma(B) q has rows (0, 1, -eta_bar, 0)/2 and (eta, 0, 0, 1)/2 -> singular values 1/sqrt2
    assert rep.min_singular_value == pytest.approx(1 / np.sqrt(2), abs=1e-12)
    assert rep.min_singular_value > 0.4


def test_ebc_projector_onto_nu_plus():
    rep = ebc_check(360, boundary=P_PLUS_SYMBOL)
    assert rep.passed
    assert rep.min_singular_value == pytest.approx(1 / np.sqrt(2), abs=1e-12)


def test_ebc_fails_for_degenerate_boundaries():
    rank_one = SymbolMatrix([[1, 0, 0, 0], [2, 0, 0, 0]], B_SYMBOL.domain, B_SYMBOL.codomain)
    assert not ebc_check(360, boundary=rank_one).passed
    # full rank, but annihilates the range of q at eta = 1
    kernel_rows = SymbolMatrix([[1, 0, 0, -1], [0, 1, 1, 0]], B_SYMBOL.domain, B_SYMBOL.codomain)
    rep = ebc_check(360, boundary=kernel_rows)
    assert rep.boundary_rank == 2 and not rep.passed
    assert rep.argmin_eta == pytest.approx(1)


def test_ebc_grid_minimum():
    with pytest.raises(ValueError):
        ebc_check(89)


# ---------------------------------------------------------------------------
# B q P^+


def test_bqp_displayed():
    assert bqp_symbol(1).equals(0.5 * np.array([[0, 1], [1, 0]]))
    assert bqp_symbol(1j).equals(0.5 * np.array([[0, 1], [1j, 0]]))


def test_bqp_product_matches_closed_form():
    for eta in ETAS:
        assert bqp_symbol(eta).equals(bqp_closed_form(eta), tol=1e-12)


def test_bqp_blocks():
    for eta in ETAS[::17]:
        m = bqp_symbol(eta).entries
        # beta -> beta up to the 1/2 normalisation of q
        assert m[0, 1] == pytest.approx(0.5)
        # alpha -> beta_bar: the Cauchy-Riemann symbol up to the factor -i
        assert m[1, 0] == pytest.approx(-1j * cauchy_riemann_symbol(eta), abs=1e-12)


# ---------------------------------------------------------------------------
# psi-positive case


def test_psi_positive_z_zero_reduces_to_coassociative():
    rep = psi_positive_ellipticity(0, 360)
    assert rep.min_abs_det == pytest.approx(0.5, abs=1e-12)
    for eta in ETAS[::30]:
        assert psi_positive_det_formula(0, eta) == pytest.approx(-0.5j * eta)


def test_psi_positive_z_one():
    rep = psi_positive_ellipticity(1, 360)
    assert rep.passed and rep.min_abs_det > 0


def test_psi_positive_random_z():
    rng = np.random.default_rng(2)
    for _ in range(100):
        r, t = 10 * np.sqrt(rng.uniform()), rng.uniform(0, 2 * np.pi)
        rep = psi_positive_ellipticity(r * np.exp(1j * t), 720)
        assert rep.det_formula_residual <= 1e-12
        assert rep.closed_form_residual <= 1e-12
        assert rep.min_abs_det > 0
        assert rep.passed


def test_psi_positive_det_lower_bound():
    # |det| >= 1/2 on the unit circle: -2i eta - z - conj(z) eta^2 = -eta (2i + 2 Re(z conj(eta)))
    rng = np.random.default_rng(3)
    for z in rng.normal(size=20) * 5 + 1j * rng.normal(size=20) * 5:
        assert psi_positive_ellipticity(z, 720).min_abs_det >= 0.5 - 1e-12


def test_unconjugated_last_entry_does_not_reproduce_product():
    rep = psi_positive_ellipticity(3 - 2j, 360)
    assert rep.closed_form_residual < 1e-12
    assert rep.unconjugated_variant_residual > 1
    # real z: the two variants coincide
    assert psi_positive_ellipticity(0.7, 360).unconjugated_variant_residual < 1e-12


def test_psi_positive_closed_form_determinant():
    rng = np.random.default_rng(4)
    for z in rng.normal(size=10) + 1j * rng.normal(size=10):
        for eta in ETAS[::45]:
            m = psi_positive_closed_form(z, eta).entries
            assert np.linalg.det(m) == pytest.approx(psi_positive_det_formula(z, eta), abs=1e-14)


# ---------------------------------------------------------------------------
# index


def test_index_examples():
    assert index_formula([BoundaryComponentData(0, 0)]) == 1
    for n in range(-3, 6):
        assert index_formula([BoundaryComponentData(0, n)]) == n + 1
    for g in range(5):
        assert index_formula([BoundaryComponentData(g, 2 * (1 - g))]) == 3 * (1 - g)
    assert index_formula([BoundaryComponentData(1, 0), BoundaryComponentData(1, 0)]) == 0
    assert index_formula([BoundaryComponentData(0, 0), BoundaryComponentData(0, 0)]) == 2


def test_index_additive_and_doubling():
    rng = np.random.default_rng(5)
    for _ in range(50):
        comps = [BoundaryComponentData(int(g), int(c)) for g, c in zip(rng.integers(0, 5, 3), rng.integers(-5, 6, 3))]
        assert index_formula(comps) == sum(index_formula([c]) for c in comps)
        c = comps[0]
        assert index_formula([c, c]) == 2 * (c.c1 + 1 - c.genus)


def test_component_validation():
    with pytest.raises(ValueError):
        BoundaryComponentData(-1, 0)
    with pytest.raises(ValueError):
        BoundaryComponentData(0, 0.5)
    assert BoundaryComponentData.from_json({"genus": 2, "c1": -2}) == BoundaryComponentData(2, -2)


def test_maslov_examples():
    assert maslov_from_index(1) == 0
    assert maslov_from_index(2) == 1
    for n in range(6):
        comps = [BoundaryComponentData(0, n)]
        assert maslov_from_index(index_formula(comps), comps) == n % 2


def test_maslov_rejects_other_boundaries():
    with pytest.raises(PreconditionError):
        maslov_from_index(0, [BoundaryComponentData(1, 0)])
    with pytest.raises(PreconditionError):
        maslov_from_index(2, [BoundaryComponentData(0, 0), BoundaryComponentData(0, 0)])


def test_symbol_matrix_bookkeeping():
    with pytest.raises(ValueError):
        B_SYMBOL @ B_SYMBOL
    assert (B_SYMBOL @ calderon_symbol(1)).codomain == B_SYMBOL.codomain
    with pytest.raises(ValueError):
        SymbolMatrix(np.eye(3))


def test_psi_positive_product_from_factors():
    from g2calib.symbol_index import S_PLUS_INCLUSION, boundary_symbol_psi_positive

    z = 0.4 - 1.3j
    for eta in ETAS[::20]:
        m = boundary_symbol_psi_positive(z) @ calderon_symbol(eta) @ S_PLUS_INCLUSION
        assert m.equals(psi_positive_closed_form(z, eta), tol=1e-15)
