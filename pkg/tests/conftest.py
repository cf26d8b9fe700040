from __future__ import annotations

import pathlib

import numpy as np
import pytest
from scipy.special import softmax

from sdsforge.diffusion import NULL_CONDITION, Denoiser, make_linear_schedule
from sdsforge.generator import GeneratorSettings, StyleGenerator
from sdsforge.numerics import Rng, Tensor


def pytest_addoption(parser):
    parser.addoption(
        "--runslow",
        action="store_true",
        default=False,
        help="run the full-pipeline acceptance experiments",
    )


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: full-pipeline experiments, enabled by --runslow")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


class ZeroCritic:
    """Predicts zero noise for every input."""

    data_dim = 2

    def predict(self, z_t, t, cond):
        return Tensor(z_t.data * 0.0)


class OracleCritic:
    """Predicts exactly the noise most recently drawn by the adaptation step."""

    data_dim = 2

    def __init__(self):
        self.eps = None

    def predict(self, z_t, t, cond):
        return Tensor(self.eps)


class MixtureCritic:
    """Predicts the exact noise for isotropic Gaussian classes with equal priors."""

    data_dim = 2

    def __init__(self, schedule, means=((-2.0, 0.0), (2.0, 0.0)), var=0.25):
        self.schedule = schedule
        self.means = np.asarray(means, dtype=np.float64)
        self.var = var

    def predict(self, z_t, t, cond):
        z = np.atleast_2d(z_t.data)
        a = np.broadcast_to(np.asarray(self.schedule.alpha_bar(t), dtype=np.float64), (len(z),))
        a = a[:, None, None]
        spread = a * self.var + 1.0 - a
        # One prediction per class, shape (n, classes, d).
        eps = np.sqrt(1.0 - a) * (z[:, None, :] - np.sqrt(a) * self.means[None]) / spread
        logits = -0.5 * np.sum((z[:, None, :] - np.sqrt(a) * self.means[None]) ** 2, axis=2)
        weights = softmax(logits / spread[:, :, 0], axis=1)
        null = np.sum(weights[:, :, None] * eps, axis=1)
        cond = np.broadcast_to(np.asarray(cond), (len(z),))
        picked = eps[np.arange(len(z)), np.maximum(cond, 0)]
        out = np.where((cond == NULL_CONDITION)[:, None], null, picked)
        return Tensor(out.reshape(z_t.shape))



@pytest.fixture
def schedule():
    return make_linear_schedule()


@pytest.fixture
def small_settings():
    return GeneratorSettings(z_dim=4, w_dim=4, mapping_hidden=8, layers=3, hidden=8, seed=11)


@pytest.fixture
def small_generator(small_settings):
    return StyleGenerator(small_settings)


@pytest.fixture
def small_denoiser():
    return Denoiser(2, 2, hidden=(16, 16), time_dim=8, cond_dim=4, rng=Rng(9))


SMALL_CONFIG = """\
seed = 4
denoiser.steps = 20
denoiser.batch = 32
denoiser.hidden = [16, 16]
denoiser.samples_per_class = 50
classifier.steps = 20
classifier.hidden = 8
classifier.samples_per_class = 50
pretrain.steps = 5
pretrain.batch = 32
pretrain.samples = 500
data.reference_samples = 50
sds.iters = 4
sds.batch = 4
sds.eval_every = 2
sds.eval_samples = 32
sds.n_select = 2
sds.select_batch = 4
sds.k = 2
"""


@pytest.fixture
def small_config_file(tmp_path) -> pathlib.Path:
    path = tmp_path / "small.conf"
    path.write_text(SMALL_CONFIG)
    return path


@pytest.fixture
def zero_critic():
    return ZeroCritic()


@pytest.fixture
def oracle_critic():
    return OracleCritic()


@pytest.fixture
def mixture_critic(schedule):
    return MixtureCritic(schedule)
