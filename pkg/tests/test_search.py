"""
Tests for frame potential minimisation.
"""

import math

import numpy as np
import pandas as pd
import pytest

from designlab.algebra.hilbert import Configuration, FieldTag, angle_spectrum
from designlab.analytics.designs import equiangular_check, onb, potential
from designlab.analytics.search import (
    FramePotentialSearch,
    minimize,
    potential_gradient,
    rationalize,
    rationalize_spectrum,
    write_trajectory_csv,
)
from designlab.exceptions import DomainError
from designlab.models.requests import SearchOptions


def _finite_difference_gradient(cfg: Configuration, t: int, h: float = 1e-5) -> np.ndarray:
    m = cfg.field.m
    base = np.array(cfg.vectors)
    grad = np.zeros((cfg.n, cfg.dim, m))
    for idx in np.ndindex(cfg.n, cfg.dim, m):
        plus, minus = base.copy(), base.copy()
        plus[idx] += h
        minus[idx] -= h
        up = potential(Configuration(cfg.field, cfg.dim, plus, cfg.weights), t)
        down = potential(Configuration(cfg.field, cfg.dim, minus, cfg.weights), t)
        grad[idx] = (up - down) / (2 * h)
    return grad


# =============================================================================
# GRADIENT
# =============================================================================

def test_gradient_matches_central_differences(make_configuration, rng):
    for trial in range(100):
        field = ["R", "C", "H"][trial % 3]
        t = 1 + trial % 3
        n = 1 + trial % 4
        cfg = make_configuration(field, 2, n, rng, unit=False, weighted=trial % 2 == 0)
        analytic = np.stack([g.values.reshape(cfg.dim, -1) for g in potential_gradient(cfg, t)])
        numeric = _finite_difference_gradient(cfg, t)
        scale = max(1.0, float(np.max(np.abs(numeric))))
        assert np.max(np.abs(analytic - numeric)) / scale < 1e-5


def test_gradient_of_single_vector():
    """For n = 1 the potential is ||v||^{4t}, so the gradient is 4t ||v||^{4t-2} v."""
    vectors = np.zeros((1, 2, 4))
    vectors[0, :, :2] = [[1.0, 2.0], [0.5, -1.0]]
    cfg = Configuration(FieldTag.C, 2, vectors)
    norm_sq = cfg.norms_sq()[0]
    for t in (1, 2, 3):
        (grad,) = potential_gradient(cfg, t)
        expected = 4 * t * norm_sq ** (2 * t - 1) * vectors[0, :, :2].reshape(-1)
        assert np.allclose(grad.values, expected)


def test_orthonormal_basis_is_a_critical_point():
    """Every gradient block of an orthonormal basis is radial."""
    cfg = onb(FieldTag.H, 3)
    for t in (1, 2, 3):
        for j, grad in enumerate(potential_gradient(cfg, t)):
            expected = 4 * t * cfg.vectors[j].reshape(-1)
            assert np.allclose(grad.values, expected)


def test_gradient_rejects_t_zero():
    with pytest.raises(DomainError):
        potential_gradient(onb(FieldTag.R, 2), 0)


# =============================================================================
# RATIONAL ANGLES
# =============================================================================

def test_rationalize_recovers_small_fractions():
    assert rationalize(0.4000000001) == (2, 5)
    assert rationalize(0.333333341) == (1, 3)
    assert rationalize(0.0) == (0, 1)


def test_rationalize_rejects_irrational_angles():
    assert rationalize((3 - math.sqrt(5)) / 8) is None


def test_rationalize_domain():
    with pytest.raises(DomainError):
        rationalize(1.5)


def test_rationalize_spectrum_of_basis():
    (entry,) = rationalize_spectrum(angle_spectrum(onb(FieldTag.C, 3)))
    assert entry[1] == 6 and entry[2] == (0, 1)


# =============================================================================
# SEARCH
# =============================================================================

def _small_options(**overrides):
    params = dict(field="C", dim=2, n=4, t=2, restarts=3, max_iters=300, seed=11)
    params.update(overrides)
    return SearchOptions(**params)


def test_search_is_deterministic():
    first = minimize(_small_options())
    second = minimize(_small_options())
    assert first.potential == second.potential
    assert np.array_equal(first.best.vectors, second.best.vectors)
    assert first.restart_index == second.restart_index


def test_search_does_not_depend_on_workers():
    serial = minimize(_small_options(restarts=2, max_iters=100))
    parallel = minimize(_small_options(restarts=2, max_iters=100, workers=2))
    assert np.array_equal(serial.best.vectors, parallel.best.vectors)


def test_trajectory_is_non_increasing():
    result = minimize(_small_options())
    values = [value for _, value in result.trajectory]
    assert all(b <= a for a, b in zip(values, values[1:]))
    assert result.trajectory[0][0] == 0


@pytest.mark.parametrize("field,dim,n", [("C", 2, 4), ("H", 2, 5), ("R", 3, 5)])
def test_iterates_never_drop_below_the_bound(field, dim, n):
    result = FramePotentialSearch(_small_options(field=field, dim=dim, n=n, restarts=3, max_iters=200)).run()
    bound = result.report.bound
    for outcome in result.restarts:
        assert min(value for _, value in outcome.trajectory) >= bound * (1 - 1e-12)


def test_best_restart_has_lowest_potential():
    result = FramePotentialSearch(_small_options(restarts=4)).run()
    assert len(result.restarts) == 4
    assert result.restarts[result.restart_index].potential == min(o.potential for o in result.restarts)


def test_search_result_vectors_are_unit():
    result = minimize(_small_options())
    assert result.best.is_unit_norm(tol=1e-9)
    assert result.best.field is FieldTag.C


def test_search_finds_complex_sic():
    """Four vectors in C^2 minimising the degree-2 potential form a 2-design."""
    result = minimize(_small_options(restarts=8, max_iters=3000))
    assert result.report.is_design
    equiangular, angle, maximal = equiangular_check(result.best, tol=1e-4)
    assert equiangular and maximal
    assert np.isclose(angle, 1 / 3, atol=1e-4)


def test_trajectory_csv(tmp_path):
    result = minimize(_small_options(restarts=1, max_iters=50))
    path = write_trajectory_csv(result, tmp_path / "trajectory.csv")
    frame = pd.read_csv(path)
    assert list(frame.columns) == ["iteration", "potential"]
    assert len(frame) == len(result.trajectory)
    assert np.isclose(frame["potential"].iloc[-1], result.trajectory[-1][1])


def test_search_result_serialises():
    data = minimize(_small_options(restarts=2, max_iters=50)).to_dict()
    assert data["configuration"]["field"] == "C"
    assert len(data["restart_potentials"]) == 2
    assert "is_design" in data["report"]


# =============================================================================
# REPRODUCTIONS (SLOW)
# =============================================================================

def _quaternionic_plane(n):
    return SearchOptions(field="H", dim=2, n=n, t=2, restarts=20, max_iters=5000, seed=1)


@pytest.mark.slow
def test_six_quaternionic_lines_form_a_two_design():
    result = minimize(_quaternionic_plane(6))
    assert result.report.is_design
    assert np.isclose(result.potential, 10.8, rtol=1e-6)
    equiangular, angle, maximal = equiangular_check(result.best, tol=1e-4)
    assert equiangular and maximal
    assert np.isclose(angle, 0.4, atol=1e-4)


@pytest.mark.slow
def test_seven_quaternionic_lines():
    result = minimize(_quaternionic_plane(7))
    assert not result.report.is_design
    assert np.isclose(result.potential, 353 / 24, rtol=1e-6)
    rational = {form for _, _, form in rationalize_spectrum(result.report.spectrum, tol=1e-4)}
    assert rational == {(1, 4), (1, 3), (1, 2)}


@pytest.mark.slow
def test_five_quaternionic_lines():
    result = minimize(_quaternionic_plane(5))
    assert not result.report.is_design
    assert np.isclose(result.potential, 125 / 16, rtol=1e-6)
