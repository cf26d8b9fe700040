from __future__ import annotations

import numpy as np
import pytest

from sdsforge import distributions
from sdsforge.errors import ConfigurationError
from sdsforge.numerics import Rng


def test_builtin_kinds_are_available():
    assert {"gaussian", "moons", "ring"} <= set(distributions.available())


def test_gaussian_moments():
    sampler = distributions.create({"kind": "gaussian", "mean": [2, -1], "cov": [[1.0, 0.5], [0.5, 2.0]]})
    x = sampler.sample(Rng(0), 20000)
    assert sampler.dim == 2
    np.testing.assert_allclose(x.mean(axis=0), [2, -1], atol=0.05)
    np.testing.assert_allclose(np.cov(x, rowvar=False), [[1.0, 0.5], [0.5, 2.0]], atol=0.08)


def test_gaussian_covariance_forms():
    iso = distributions.gaussian.Settings(mean=(0, 0, 0), cov=0.25)
    np.testing.assert_allclose(iso.covariance(), 0.25 * np.eye(3))
    diag = distributions.gaussian.Settings(mean=(0, 0), cov=[1.0, 4.0])
    np.testing.assert_allclose(diag.covariance(), np.diag([1.0, 4.0]))


def test_gaussian_rejects_indefinite_covariance():
    with pytest.raises(ConfigurationError):
        distributions.create({"kind": "gaussian", "mean": [0, 0], "cov": [[1, 2], [2, 1]]})


def test_ring_radius():
    x = distributions.create({"kind": "ring", "radius": 3.0, "width": 0.05}).sample(Rng(1), 5000)
    radius = np.linalg.norm(x, axis=1)
    assert radius.mean() == pytest.approx(3.0, abs=0.01)
    assert radius.std() == pytest.approx(0.05, rel=0.1)


def test_moons_are_centered_and_two_dimensional():
    x = distributions.create({"kind": "moons", "noise": 0.0, "center": [1.0, 1.0]}).sample(Rng(2), 4000)
    assert x.shape == (4000, 2)
    np.testing.assert_allclose(x.mean(axis=0), [1.0, 1.0], atol=0.05)


def test_unknown_kind_and_settings():
    with pytest.raises(ConfigurationError, match="unknown distribution"):
        distributions.create({"kind": "spiral"})
    with pytest.raises(ConfigurationError):
        distributions.create({"mean": [0, 0]})
    with pytest.raises(ConfigurationError):
        distributions.create({"kind": "ring", "radius": -1.0})
    with pytest.raises(ConfigurationError):
        distributions.create({"kind": "ring", "petals": 5})


def test_draw_labeled_orders_classes():
    samplers = [
        distributions.create({"kind": "gaussian", "mean": [-5, 0], "cov": 0.01}),
        distributions.create({"kind": "gaussian", "mean": [5, 0], "cov": 0.01}),
    ]
    data = distributions.draw_labeled(samplers, 30, Rng(3))
    assert len(data) == 60
    assert data.dim == 2
    np.testing.assert_array_equal(data.labels, np.repeat([0, 1], 30))
    assert (data.of_class(0)[:, 0] < 0).all()
    assert (data.of_class(1)[:, 0] > 0).all()


def test_draw_labeled_rejects_mixed_dimensions():
    samplers = [
        distributions.create({"kind": "gaussian", "mean": [0, 0, 0]}),
        distributions.create({"kind": "ring"}),
    ]
    with pytest.raises(ConfigurationError):
        distributions.draw_labeled(samplers, 5, Rng(0))
