from __future__ import annotations

import numpy as np
import pytest

from sdsforge.diffusion import (
    NULL_CONDITION,
    Denoiser,
    DenoiserTrainConfig,
    ScheduleSettings,
    ancestral_sample,
    cfg_score,
    denoiser_loss,
    make_linear_schedule,
    q_sample,
    timestep_embedding,
    train_denoiser,
    tweedie_z0,
)
from sdsforge.distributions import LabeledSamples
from sdsforge.errors import ConfigurationError, ShapeError, UsageError
from sdsforge.numerics import Rng, Tape, Tensor, finite_difference_grad, relative_error


def test_two_step_schedule():
    sched = make_linear_schedule(2, 0.1, 0.2)
    np.testing.assert_allclose(sched.betas, [0.1, 0.2])
    np.testing.assert_allclose(sched.alpha_bars, [0.9, 0.72])
    assert sched.alpha_bar(2) == pytest.approx(0.72)
    assert sched.alpha_bar_prev(1) == 1.0
    assert sched.alpha_bar_prev(2) == pytest.approx(0.9)


def test_default_schedule_end(schedule):
    assert schedule.T == 1000
    assert schedule.beta(1) == pytest.approx(1e-4)
    assert schedule.beta(1000) == pytest.approx(0.02)
    assert schedule.alpha_bar(1000) == pytest.approx(4.0358e-05, rel=1e-3)
    assert np.all(np.diff(schedule.alpha_bars) < 0)


def test_schedule_arrays_are_read_only(schedule):
    with pytest.raises(ValueError):
        schedule.betas[0] = 0.5


def test_timesteps_outside_range_are_rejected(schedule):
    with pytest.raises(UsageError):
        schedule.alpha_bar(0)
    with pytest.raises(UsageError):
        schedule.alpha_bar(1001)


@pytest.mark.parametrize(
    "kwargs",
    [{"T": 1}, {"beta_start": 0.0}, {"beta_end": 1.0}, {"beta_start": 0.03, "beta_end": 0.02}],
)
def test_invalid_schedule_settings(kwargs):
    with pytest.raises(ConfigurationError):
        ScheduleSettings(**kwargs)


def test_tweedie_inverts_q_sample(schedule):
    rng = Rng(21)
    z0 = rng.normal((1000, 3))
    eps = rng.normal((1000, 3))
    t = 1 + rng.integers(schedule.T, 1000)
    z_t = q_sample(Tensor(z0), t, Tensor(eps), schedule)
    recovered = tweedie_z0(z_t, Tensor(eps), t, schedule)
    np.testing.assert_allclose(recovered.data, z0, rtol=0, atol=1e-9)


def test_q_sample_single_latent(schedule):
    z0 = Tensor([1.0, -1.0])
    eps = Tensor([0.5, 0.5])
    z_t = q_sample(z0, 10, eps, schedule)
    a = schedule.alpha_bar(10)
    np.testing.assert_allclose(z_t.data, np.sqrt(a) * z0.data + np.sqrt(1 - a) * eps.data)


def test_q_sample_shape_mismatch(schedule):
    with pytest.raises(ShapeError):
        q_sample(Tensor(np.zeros((2, 2))), 3, Tensor(np.zeros((2, 3))), schedule)


def test_timestep_embedding_layout():
    emb = timestep_embedding(np.array([0, 5]), 8)
    assert emb.shape == (2, 8)
    np.testing.assert_allclose(emb[0], [0, 0, 0, 0, 1, 1, 1, 1])
    assert emb[1, 0] == pytest.approx(np.sin(5.0))


def test_cfg_endpoints_and_affinity(small_denoiser, schedule):
    rng = Rng(4)
    z_t = Tensor(rng.normal((16, 2)))
    t = 1 + rng.integers(schedule.T, 16)
    eps_c = small_denoiser.predict(z_t, t, 1).data
    eps_null = small_denoiser.predict(z_t, t, NULL_CONDITION).data
    np.testing.assert_array_equal(cfg_score(small_denoiser, z_t, t, 1, 1.0).data, eps_c)
    np.testing.assert_allclose(cfg_score(small_denoiser, z_t, t, 1, 0.0).data, eps_null, atol=1e-12)
    base = cfg_score(small_denoiser, z_t, t, 1, 0.0).data
    unit = cfg_score(small_denoiser, z_t, t, 1, 1.0).data
    for s in (0.5, 2.0, 7.5):
        guided = cfg_score(small_denoiser, z_t, t, 1, s).data
        np.testing.assert_allclose(guided, base + s * (unit - base), rtol=0, atol=1e-12)


def test_cfg_single_latent(small_denoiser):
    z = Tensor([0.3, -0.2])
    single = cfg_score(small_denoiser, z, 40, 0, 3.0)
    batch = cfg_score(small_denoiser, Tensor(z.data[None, :]), np.array([40]), 0, 3.0)
    assert single.shape == (2,)
    np.testing.assert_allclose(single.data, batch.data[0])


def test_cfg_rejects_null_condition(small_denoiser):
    with pytest.raises(UsageError):
        cfg_score(small_denoiser, Tensor(np.zeros((1, 2))), 1, NULL_CONDITION, 2.0)


def test_denoiser_rejects_wrong_latent_shape(small_denoiser):
    with pytest.raises(ShapeError):
        small_denoiser.predict(Tensor(np.zeros((3, 5))), 1, 0)


def test_denoiser_loss_matches_direct_computation(small_denoiser, schedule):
    data = Rng(1).normal((8, 2))
    cond = np.array([0, 1] * 4)
    loss = denoiser_loss(small_denoiser, Tensor(data), cond, schedule, Rng(77), p_uncond=0.5)

    rng = Rng(77)
    t = 1 + rng.integers(schedule.T, 8)
    eps = rng.normal((8, 2))
    dropped = rng.uniform(8) < 0.5
    a = schedule.alpha_bar(t)[:, None]
    z_t = np.sqrt(a) * data + np.sqrt(1 - a) * eps
    pred = small_denoiser.predict(
        Tensor(z_t), t, np.where(dropped, NULL_CONDITION, cond)
    ).data
    expected = np.sum((pred - eps) ** 2) / 8
    assert loss.item() == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("name", ["output.weight", "layers.0.weight", "embedding"])
def test_denoiser_loss_gradient(schedule, name):
    den = Denoiser(2, 2, hidden=(6, 6), time_dim=4, cond_dim=3, rng=Rng(31)).requires_grad_(True)
    for instance in range(20):
        rng = Rng(200 + instance)
        data = Tensor(rng.normal((4, 2)))
        cond = rng.integers(2, 4)

        def loss(param):
            original = den.parameters[name]
            den.parameters[name] = param
            try:
                return denoiser_loss(den, data, cond, schedule, Rng(instance), p_uncond=0.25)
            finally:
                den.parameters[name] = original

        den.zero_grad()
        with Tape() as tape:
            value = denoiser_loss(den, data, cond, schedule, Rng(instance), p_uncond=0.25)
        tape.backward(value)
        expected = finite_difference_grad(loss, den.parameters[name])
        assert relative_error(den.parameters[name].grad, expected) < 1e-4



def test_train_denoiser_is_deterministic_and_frozen(schedule):
    rng = Rng(0)
    points = np.concatenate([rng.normal((40, 2)) - 2.0, rng.normal((40, 2)) + 2.0])
    data = LabeledSamples(points, np.repeat([0, 1], 40))
    cfg = DenoiserTrainConfig(steps=15, batch=16, hidden=(8,), time_dim=4, cond_dim=2, log_every=5)
    a = train_denoiser(data, cfg, schedule)
    b = train_denoiser(data, cfg, schedule)
    for name, value in a.arrays().items():
        np.testing.assert_array_equal(value, b.arrays()[name])
    assert not any(p.requires_grad for p in a.parameters.values())
    assert [step for step, _ in a.loss_curve] == [1, 5, 10, 15]
    assert a.num_classes == 2


def test_train_denoiser_needs_two_classes(schedule):
    data = LabeledSamples(np.zeros((10, 2)), np.zeros(10, dtype=np.int64))
    with pytest.raises(ConfigurationError):
        train_denoiser(data, DenoiserTrainConfig(steps=1), schedule)


def test_denoiser_restores_from_arrays(small_denoiser):
    restored = Denoiser.from_parameters(small_denoiser.arrays())
    z = Tensor(Rng(3).normal((5, 2)))
    np.testing.assert_array_equal(
        restored.predict(z, 17, 1).data, small_denoiser.predict(z, 17, 1).data
    )
    assert restored.hidden == (16, 16)
    assert restored.time_dim == 8


def test_ancestral_sample(small_denoiser):
    sched = make_linear_schedule(20)
    a = ancestral_sample(small_denoiser, 1, 2.0, sched, Rng(6), 10)
    b = ancestral_sample(small_denoiser, 1, 2.0, sched, Rng(6), 10)
    assert a.shape == (10, 2)
    np.testing.assert_array_equal(a, b)
    assert ancestral_sample(small_denoiser, 1, 2.0, sched, Rng(6), 0).shape == (0, 2)


@pytest.fixture(scope="module")
def two_gaussian_denoiser():
    rng = Rng(0)
    points = np.concatenate(
        [
            rng.normal((2000, 2)) * 0.5 + np.array([-2.0, 0.0]),
            rng.normal((2000, 2)) * 0.5 + np.array([2.0, 0.0]),
        ]
    )
    data = LabeledSamples(points, np.repeat([0, 1], 2000))
    cfg = DenoiserTrainConfig(steps=1500, batch=256, seed=1, log_every=100)
    return train_denoiser(data, cfg, make_linear_schedule())


def test_denoiser_loss_falls_below_a_quarter(two_gaussian_denoiser):
    losses = [loss for _, loss in two_gaussian_denoiser.loss_curve]
    assert np.mean(losses[-3:]) < 0.25 * losses[0]


def test_ancestral_sample_reaches_the_class_mean(two_gaussian_denoiser):
    x = ancestral_sample(two_gaussian_denoiser, 1, 1.0, make_linear_schedule(), Rng(6), 500)
    np.testing.assert_allclose(x.mean(axis=0), [2.0, 0.0], atol=0.3)


def test_training_without_dropping_keeps_the_null_row(schedule):
    rng = Rng(0)
    points = np.concatenate([rng.normal((40, 2)) - 2.0, rng.normal((40, 2)) + 2.0])
    data = LabeledSamples(points, np.repeat([0, 1], 40))
    cfg = DenoiserTrainConfig(
        steps=20, batch=16, hidden=(8,), time_dim=4, cond_dim=3, p_uncond=0.0, seed=4
    )
    initial = Denoiser(2, 2, hidden=(8,), time_dim=4, cond_dim=3, rng=Rng(4).spawn())
    trained = train_denoiser(data, cfg, schedule)
    before, after = initial.arrays()["embedding"], trained.arrays()["embedding"]
    np.testing.assert_array_equal(after[trained.null_row], before[initial.null_row])
    assert not np.array_equal(after[:2], before[:2])
