import numpy as np
import pytest

from g2calib.calibration import (
    SEARCH_TOL,
    OrientedPlane,
    calibration_value,
    classify_plane,
    coordinate_plane,
    direction_grid,
    e_alpha,
    is_associative,
    is_coassociative,
    is_psi_positive,
    make_plane,
    max_associative_content,
)
from g2calib.errors import DegenerateInputError, DegreeError
from g2calib.g2_algebra import DIM, PHI0, PSI0, chi_eval, random_g2_element, random_orthonormal_frames

E = np.eye(DIM)


def e(i):
    return E[i - 1]


def random_associative_planes(rng, n):
    out = []
    for _ in range(n):
        g = random_g2_element(rng)
        out.append(OrientedPlane(g[:, :3].T))
    return out


def planes_containing_associative(rng, n):
    out = []
    for _ in range(n):
        g = random_g2_element(rng)
        x = rng.normal(size=DIM)
        x[:3] = 0
        out.append(make_plane([g @ e(1), g @ e(2), g @ e(3), g @ x]))
    return out


def test_make_plane_examples():
    P = make_plane([e(1), e(2), e(3)])
    assert np.allclose(P.frame, E[:3])
    Q = make_plane([2 * e(1), e(1) + e(2), e(3)])
    assert np.allclose(Q.frame, E[:3])
    with pytest.raises(DegenerateInputError):
        make_plane([e(1), e(1), e(2)])
    with pytest.raises(ValueError):
        make_plane([e(1), e(2)])


def test_make_plane_keeps_orientation():
    rng = np.random.default_rng(0)
    V = rng.normal(size=(4, DIM))
    P = make_plane(V)
    assert np.allclose(P.frame @ P.frame.T, np.eye(4), atol=1e-12)
    # same oriented span: change of basis has positive determinant
    coeffs = V @ P.frame.T
    assert np.linalg.det(coeffs) > 0
    assert np.allclose(coeffs @ P.frame, V)


def test_calibration_value_examples():
    assert calibration_value(PHI0, coordinate_plane(1, 2, 3)) == 1
    assert calibration_value(PSI0, coordinate_plane(4, 5, 6, 7)) == 1
    for a in np.linspace(0, np.pi, 7):
        assert calibration_value(PHI0, e_alpha(a)) == pytest.approx(np.cos(a), abs=1e-15)


def test_calibration_value_degree_mismatch():
    with pytest.raises(DegreeError):
        calibration_value(PSI0, coordinate_plane(1, 2, 3))


def test_orientation_odd_exactly():
    rng = np.random.default_rng(1)
    for F in random_orthonormal_frames(rng, 20, 4):
        P = OrientedPlane(F)
        assert calibration_value(PSI0, P.swapped(1, 3)) == -calibration_value(PSI0, P)
    for F in random_orthonormal_frames(rng, 20, 3):
        P = OrientedPlane(F)
        assert calibration_value(PHI0, P.swapped(0, 2)) == -calibration_value(PHI0, P)


def test_comass_1e5_frames():
    rng = np.random.default_rng(2)
    F = random_orthonormal_frames(rng, 100_000, 3)
    vals = PHI0.evaluate(F[:, 0], F[:, 1], F[:, 2])
    assert np.abs(vals).max() <= 1 + 1e-9


def test_is_associative_examples():
    assert is_associative(coordinate_plane(1, 2, 3))
    assert not is_associative(coordinate_plane(1, 2, 4))
    assert is_associative(coordinate_plane(1, 4, 5))
    assert is_associative(coordinate_plane(1, 2, 3).swapped())


def test_is_associative_agrees_with_chi():
    rng = np.random.default_rng(3)
    planes = random_associative_planes(rng, 300)
    # near-calibrated planes: tilt by a small angle
    for P in random_associative_planes(rng, 300):
        planes.append(make_plane(P.frame + 1e-3 * rng.normal(size=P.frame.shape)))
    planes += [OrientedPlane(F) for F in random_orthonormal_frames(rng, 400, 3)]
    for P in planes:
        by_chi = np.linalg.norm(chi_eval(*P.frame)) <= 1e-6
        assert is_associative(P) == by_chi


def test_is_coassociative_examples():
    assert is_coassociative(coordinate_plane(4, 5, 6, 7))
    assert not is_coassociative(coordinate_plane(1, 2, 3, 4))
    assert is_coassociative(coordinate_plane(2, 3, 4, 5))


def test_associative_complement_is_coassociative():
    rng = np.random.default_rng(4)
    for P in random_associative_planes(rng, 20):
        assert is_coassociative(P.complement())


def test_is_psi_positive_examples():
    rng = np.random.default_rng(5)
    assert is_psi_positive(coordinate_plane(4, 5, 6, 7))
    assert not is_psi_positive(coordinate_plane(1, 2, 3, 4))
    F = coordinate_plane(4, 5, 6, 7)
    assert is_psi_positive(make_plane(F.frame + 1e-2 * rng.normal(size=F.frame.shape)))


def test_predicates_check_dimension():
    with pytest.raises(DegreeError):
        is_associative(coordinate_plane(1, 2, 3, 4))
    with pytest.raises(DegreeError):
        is_coassociative(coordinate_plane(1, 2, 3))


def test_direction_grid_identifies_antipodes():
    g = direction_grid(32)
    assert np.allclose(np.linalg.norm(g, axis=1), 1)
    assert g.shape[0] >= 32**4 // 2 - 32**3
    keys = {tuple(np.round(x, 9)) for x in g}
    assert not any(tuple(np.round(-x, 9)) in keys for x in g[:2000])


def test_max_associative_content_examples():
    c = max_associative_content(coordinate_plane(1, 2, 3, 4))
    assert c.value == pytest.approx(1, abs=1e-12)
    assert is_associative(c.plane)
    assert c.plane.same_oriented_subspace(coordinate_plane(1, 2, 3), tol=1e-9) or c.plane.same_oriented_subspace(
        coordinate_plane(1, 2, 3).swapped(), tol=1e-9
    )
    assert max_associative_content(coordinate_plane(4, 5, 6, 7)).value < 1 - SEARCH_TOL


def test_max_content_g2_invariant():
    rng = np.random.default_rng(6)
    F = make_plane(rng.normal(size=(4, DIM)))
    base = max_associative_content(F).value
    for _ in range(3):
        g = random_g2_element(rng)
        moved = OrientedPlane(F.frame @ g.T)
        assert max_associative_content(moved).value == pytest.approx(base, abs=1e-9)
    co = OrientedPlane(random_g2_element(rng)[:, 3:].T)
    assert max_associative_content(co).value < 1 - SEARCH_TOL


def test_max_content_is_complementary_to_psi():
    rng = np.random.default_rng(7)
    for _ in range(200):
        F = make_plane(rng.normal(size=(4, DIM)))
        c = max_associative_content(F).value
        psi = calibration_value(PSI0, F)
        assert c**2 + psi**2 == pytest.approx(1, abs=1e-9)


def test_max_content_grid_only_is_a_lower_bound():
    rng = np.random.default_rng(8)
    F = make_plane(rng.normal(size=(4, DIM)))
    coarse = max_associative_content(F, refine=False)
    fine = max_associative_content(F)
    assert coarse.value <= fine.value + 1e-12
    assert coarse.grid_value == pytest.approx(coarse.value, abs=1e-9)


def test_psi_positive_iff_phi_free_1e3():
    rng = np.random.default_rng(0)
    planes = [make_plane(rng.normal(size=(4, DIM))) for _ in range(500)]
    planes += planes_containing_associative(rng, 500)
    # the psi threshold matched to the search tolerance: content = sqrt(1 - psi^2)
    psi_tol = np.sqrt(1 - (1 - SEARCH_TOL) ** 2)
    counter = []
    for F in planes:
        phi_free = max_associative_content(F).value < 1 - SEARCH_TOL
        if is_psi_positive(F, psi_tol) != phi_free:
            counter.append(F)
    assert counter == []
    assert sum(not is_psi_positive(F) for F in planes) == 500


def test_classify_plane_report():
    r = classify_plane(coordinate_plane(2, 3, 4, 5))
    assert r["coassociative"] and r["psi_positive"] and r["phi_free"]
    assert r["psi0"] == 1
    r = classify_plane(coordinate_plane(1, 2, 3))
    assert r["associative"] and r["phi0"] == 1 and r["chi_norm"] == 0


def test_plane_json_round_trip():
    P = make_plane(np.random.default_rng(9).normal(size=(4, DIM)))
    Q = OrientedPlane.from_json(P.to_json())
    assert np.allclose(P.frame, Q.frame)
    with pytest.raises(ValueError):
        OrientedPlane.from_json({"dim": 3, "vectors": P.frame.tolist()})
