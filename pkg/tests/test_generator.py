from __future__ import annotations

import numpy as np
import pytest

from sdsforge.errors import ConfigurationError, ShapeError
from sdsforge.generator import (
    GeneratorSettings,
    LatentEncoder,
    PretrainSettings,
    StyleCodes,
    StyleGenerator,
    encode,
    fingerprint,
    initial_bandwidth,
    make_encoder,
    map_latent,
    pretrain_generator,
    snapshot_frozen,
    synthesize,
)
from sdsforge.metrics import median_bandwidth, mmd_squared
from sdsforge.numerics import Rng, Tape, Tensor, finite_difference_grad, no_grad, relative_error


def test_output_shapes(small_generator):
    z = Tensor(Rng(1).normal((5, 4)))
    assert small_generator(z).shape == (5, 2)
    assert small_generator(Tensor(np.zeros(4))).shape == (2,)


def test_map_latent_broadcasts_one_code(small_generator):
    codes = map_latent(small_generator, Tensor(Rng(1).normal((3, 4))))
    assert len(codes) == 3
    assert codes[1] is codes[2] is codes[3]
    assert codes.numpy().shape == (3, 3, 4)


def test_latent_dimension_is_checked(small_generator):
    with pytest.raises(ShapeError):
        small_generator(Tensor(np.zeros((2, 5))))


def test_slot_count_is_checked(small_generator):
    w = Tensor(np.zeros((2, 4)))
    with pytest.raises(ShapeError):
        synthesize(small_generator, StyleCodes.broadcast(w, 2))


def test_initialization_is_seeded(small_settings):
    a = StyleGenerator(small_settings)
    b = StyleGenerator(small_settings)
    assert fingerprint(a.parameters) == fingerprint(b.parameters)
    c = StyleGenerator(GeneratorSettings(**{**small_settings.to_dict(), "seed": 12}))
    assert fingerprint(a.parameters) != fingerprint(c.parameters)


def test_biases_start_at_zero(small_generator):
    for name, parameter in small_generator.parameters.items():
        if name.endswith("bias"):
            assert not parameter.data.any()


def test_adaptable_parameters_exclude_biases_mapping_and_head(small_generator):
    names = set(small_generator.adaptable_parameters())
    assert names == {
        f"synthesis.{layer}.{part}"
        for layer in (1, 2, 3)
        for part in ("weight", "style_scale.weight", "style_shift.weight")
    }


def test_only_selected_layer_receives_gradients(small_generator):
    small_generator.set_trainable(small_generator.layer_parameter_names(2))
    with Tape() as tape:
        x = small_generator(Tensor(Rng(2).normal((6, 4))))
    tape.backward(x)
    for name, parameter in small_generator.parameters.items():
        if name in small_generator.layer_parameter_names(2):
            assert parameter.grad is not None and parameter.grad.any()
        else:
            assert parameter.grad is None


def test_layer_code_only_reaches_its_layer(small_generator):
    w = small_generator.map_latent(Tensor(Rng(3).normal((4, 4))))[1]
    leaves = tuple(Tensor(w.data, requires_grad=True) for _ in range(3))
    with Tape() as tape:
        out = small_generator.synthesize(StyleCodes(leaves))
    tape.backward(out)
    assert all(leaf.grad.any() for leaf in leaves)
    small_generator.parameters["synthesis.2.style_scale.weight"].data[:] = 0.0
    small_generator.parameters["synthesis.2.style_shift.weight"].data[:] = 0.0
    for leaf in leaves:
        leaf.zero_grad()
    with Tape() as tape:
        out = small_generator.synthesize(StyleCodes(leaves))
    tape.backward(out)
    assert not leaves[1].grad.any()
    assert leaves[0].grad.any() and leaves[2].grad.any()


@pytest.mark.parametrize(
    "name", ["mapping.fc1.weight", "synthesis.2.weight", "synthesis.3.style_shift.weight"]
)
def test_generator_gradient_matches_finite_differences(small_settings, name):
    gen = StyleGenerator(small_settings).requires_grad_(True)
    encoder = LatentEncoder.orthogonal(2, 5)
    for instance in range(20):
        rng = Rng(100 + instance)
        z = Tensor(rng.normal((3, 4)))
        seed = rng.normal((3, 2))

        def objective(param):
            original = gen.parameters[name]
            gen.parameters[name] = param
            try:
                return float(np.sum(seed * encode(encoder, gen(z)).data))
            finally:
                gen.parameters[name] = original

        gen.zero_grad()
        with Tape() as tape:
            out = encode(encoder, gen(z))
        tape.backward(out, seed)
        expected = finite_difference_grad(objective, gen.parameters[name])
        assert relative_error(gen.parameters[name].grad, expected) < 1e-4


def test_snapshot_is_frozen_and_independent(small_generator):
    small_generator.requires_grad_(True)
    frozen = snapshot_frozen(small_generator)
    assert fingerprint(frozen.parameters) == fingerprint(small_generator.parameters)
    assert not any(p.requires_grad for p in frozen.parameters.values())
    small_generator.parameters["head.bias"].data += 1.0
    assert fingerprint(frozen.parameters) != fingerprint(small_generator.parameters)


def test_copy_keeps_trainable_flags(small_generator):
    small_generator.set_trainable(["synthesis.1.weight"])
    clone = small_generator.copy()
    assert clone.trainable_names() == ("synthesis.1.weight",)
    assert fingerprint(clone.parameters) == fingerprint(small_generator.parameters)


def test_set_trainable_rejects_unknown_names(small_generator):
    with pytest.raises(KeyError):
        small_generator.set_trainable(["synthesis.9.weight"])


def test_from_parameters_infers_architecture(small_generator, small_settings):
    rebuilt = StyleGenerator.from_parameters(small_generator.arrays())
    for field in ("z_dim", "w_dim", "mapping_hidden", "layers", "hidden", "out_dim"):
        assert getattr(rebuilt.settings, field) == getattr(small_settings, field)
    z = Tensor(Rng(4).normal((3, 4)))
    np.testing.assert_array_equal(rebuilt(z).data, small_generator(z).data)


def test_restoring_wrong_shapes_fails(small_generator, small_settings):
    arrays = small_generator.arrays()
    arrays["head.weight"] = np.zeros((3, 2))
    with pytest.raises(ShapeError):
        StyleGenerator(small_settings, parameters=arrays)


def test_orthogonal_encoder_preserves_norms():
    encoder = LatentEncoder.orthogonal(3, 7)
    np.testing.assert_allclose(encoder.q @ encoder.q.T, np.eye(3), atol=1e-12)
    x = Rng(1).normal((50, 3))
    np.testing.assert_allclose(
        np.linalg.norm(encode(encoder, Tensor(x)).data, axis=1),
        np.linalg.norm(x, axis=1),
        rtol=1e-12,
    )
    np.testing.assert_array_equal(encoder.q, LatentEncoder.orthogonal(3, 7).q)


def test_identity_encoder_passes_through():
    x = Tensor([[1.0, 2.0]])
    assert encode(LatentEncoder(), x) is x
    assert LatentEncoder().arrays() == {}


def test_make_encoder_follows_settings():
    assert make_encoder(GeneratorSettings()).mode == "identity"
    encoder = make_encoder(GeneratorSettings(encoder="orthogonal", out_dim=2))
    assert encoder.q.shape == (2, 2)
    with pytest.raises(ConfigurationError):
        GeneratorSettings(encoder="random")


def test_pretraining_reduces_mmd(small_settings):
    samples = Rng(8).normal((600, 2)) * 0.5 + np.array([-2.0, 0.0])
    untrained = StyleGenerator(small_settings)
    cfg = PretrainSettings(steps=150, batch=64, lr=1e-2, samples=600, seed=2)
    trained = pretrain_generator(samples, cfg, small_settings)
    z = Tensor(Rng(9).normal((300, 4)))
    before = mmd_squared(untrained(z).data, samples[:300], 1.0)
    after = mmd_squared(trained(z).data, samples[:300], 1.0)
    assert after < before
    assert not any(p.requires_grad for p in trained.parameters.values())


def test_pretraining_checks_inputs(small_settings):
    with pytest.raises(ConfigurationError):
        pretrain_generator(np.zeros((100, 2)), PretrainSettings(steps=1), small_settings)
    with pytest.raises(ConfigurationError):
        pretrain_generator(np.zeros((600, 3)), PretrainSettings(steps=1), small_settings)
    with pytest.raises(ConfigurationError):
        PretrainSettings(samples=499)


def test_pretraining_without_steps_keeps_the_initialization(small_settings):
    samples = Rng(8).normal((600, 2))
    trained = pretrain_generator(samples, PretrainSettings(steps=0, samples=600), small_settings)
    assert fingerprint(trained.parameters) == fingerprint(StyleGenerator(small_settings).parameters)


def test_pretraining_matches_the_source_mean():
    samples = Rng(5).normal((4000, 2)) * 0.5 + np.array([-2.0, 0.0])
    cfg = PretrainSettings(steps=300, batch=256, lr=5e-3, samples=4000, seed=5)
    trained = pretrain_generator(samples, cfg)
    with no_grad():
        x = trained(Tensor(Rng(6).normal((2000, 8)))).data
    np.testing.assert_allclose(x.mean(axis=0), [-2.0, 0.0], atol=0.2)


def test_initial_bandwidth_pools_source_and_generated(small_generator):
    far = Rng(8).normal((1000, 2)) * 0.1 + np.array([-20.0, 0.0])
    assert median_bandwidth(far) < 1.0
    assert initial_bandwidth(small_generator, far, Rng(1)) > 5.0

