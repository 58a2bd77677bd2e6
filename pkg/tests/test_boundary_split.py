import numpy as np
import pytest

from g2calib.boundary_split import (
    BoundaryConfig,
    check_antilinear,
    perturbed_psi_positive_config,
    random_coassociative_config,
    split_coassociative,
    split_psi_positive,
    standard_config,
)
from g2calib.calibration import is_psi_positive, make_plane
from g2calib.errors import PreconditionError
from g2calib.g2_algebra import DIM, cross

E = np.eye(DIM)


def e(i):
    return E[i - 1]


def test_standard_split():
    cfg = standard_config()
    s = split_coassociative(cfg)
    assert abs(abs(s.a @ e(4)) - 1) < 1e-12
    assert np.allclose(s.apply_J(s.a), cross(e(1), s.a))
    # Ja = e1 x e4 = e5 up to the sign of a
    assert np.allclose(np.abs(s.nuX_frame), np.abs(E[[3, 4]]), atol=1e-12)
    assert max(s.residuals(cfg.F).values()) < 1e-12


def test_swapped_tangent_frame():
    cfg = BoundaryConfig(u=-e(1), v=e(3), w=e(2), F=make_plane([e(3), e(2), e(4), e(5)]))
    s = split_coassociative(cfg)
    base = split_coassociative(standard_config())
    assert max(s.residuals(cfg.F).values()) < 1e-12
    # same subspace nu_X, opposite complex orientation (a, Ja)
    change = s.nuX_frame @ base.nuX_frame.T
    assert np.allclose(np.abs(np.linalg.det(change)), 1, atol=1e-12)
    assert np.linalg.det(change) == pytest.approx(-1, abs=1e-12)


def test_split_rejects_non_coassociative():
    cfg = BoundaryConfig(u=e(1), v=e(2), w=e(3), F=make_plane([e(2), e(3), e(1), e(4)]))
    with pytest.raises(PreconditionError):
        split_coassociative(cfg)


def test_split_rejects_non_associative_frame():
    cfg = BoundaryConfig(u=e(1), v=e(2), w=e(4), F=make_plane([e(2), e(4), e(3), e(5)]))
    with pytest.raises(PreconditionError):
        split_coassociative(cfg)


def test_antilinear_examples():
    s = split_coassociative(standard_config())
    rng = np.random.default_rng(0)
    assert check_antilinear(s, s.v)
    assert check_antilinear(s, s.w)
    for _ in range(10):
        a, b = rng.normal(size=2)
        assert check_antilinear(s, a * s.v + b * s.w)


def test_antilinear_rejects_nontangent():
    s = split_coassociative(standard_config())
    with pytest.raises(PreconditionError):
        check_antilinear(s, e(4))


def test_random_configs_1e3():
    rng = np.random.default_rng(1)
    worst = 0.0
    for _ in range(1000):
        cfg = random_coassociative_config(rng)
        s = split_coassociative(cfg)
        worst = max(worst, max(s.residuals(cfg.F).values()))
        c = rng.normal(size=2)
        assert check_antilinear(s, c[0] * cfg.v + c[1] * cfg.w)
        # J is an isometry of nu
        x, y = rng.normal(size=(2, 4)) @ s.nu_frame
        assert abs(s.apply_J(x) @ s.apply_J(y) - x @ y) < 1e-9
    assert worst < 1e-9


def test_mu_orthogonal_to_TX():
    rng = np.random.default_rng(2)
    for _ in range(50):
        cfg = random_coassociative_config(rng)
        s = split_coassociative(cfg)
        assert np.abs(s.muX_frame @ cfg.F.frame.T).max() < 1e-9
        assert abs(s.a @ cfg.u) < 1e-9


def test_psi_positive_on_coassociative_is_identity_projection():
    cfg = standard_config()
    split, rep = split_psi_positive(cfg)
    assert rep.projection_singular_values == pytest.approx((1, 1), abs=1e-12)
    assert rep.jb_mu_norm > 0
    assert abs(rep.z) < 1e-12
    assert max(split.residuals().values()) < 1e-12


def test_psi_positive_perturbation():
    rng = np.random.default_rng(3)
    for _ in range(50):
        cfg = perturbed_psi_positive_config(random_coassociative_config(rng), rng, 1e-2)
        assert is_psi_positive(cfg.F)
        split, rep = split_psi_positive(cfg)
        lo, hi = rep.projection_singular_values[1], rep.projection_singular_values[0]
        assert 0 < lo <= hi <= 1 + 1e-12
        assert rep.jb_mu_norm > 0
        r = split.residuals()
        assert r["nu_orthonormal"] < 1e-9 and r["J_squared"] < 1e-9 and r["nu_perp_E"] < 1e-9


def test_psi_positive_rejects_associative_containing():
    cfg = BoundaryConfig(u=e(1), v=e(2), w=e(3), F=make_plane([e(2), e(3), e(1), e(4)]))
    with pytest.raises(PreconditionError):
        split_psi_positive(cfg)


def test_psi_positive_rejects_bad_NX():
    cfg = standard_config()
    with pytest.raises(PreconditionError):
        split_psi_positive(cfg, NX_frame=[e(4), e(6)])


def test_config_json_round_trip():
    rng = np.random.default_rng(4)
    cfg = random_coassociative_config(rng)
    back = BoundaryConfig.from_json(cfg.to_json())
    assert np.allclose(back.u, cfg.u) and np.allclose(back.F.frame, cfg.F.frame)
    back.validate()
