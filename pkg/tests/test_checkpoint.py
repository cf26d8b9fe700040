from __future__ import annotations

import numpy as np
import pytest

from sdsforge import checkpoint
from sdsforge.errors import CheckpointError
from sdsforge.generator import LatentEncoder, fingerprint
from sdsforge.metrics import ConditionClassifier
from sdsforge.numerics import Rng, Tensor


def test_generator_round_trip(tmp_path, small_generator):
    encoder = LatentEncoder.orthogonal(2, 7)
    path = tmp_path / "gen.ckpt"
    checkpoint.save_generator(path, small_generator, encoder)
    gen, restored = checkpoint.load_generator(path)
    assert fingerprint(gen.parameters) == fingerprint(small_generator.parameters)
    assert gen.settings.layers == small_generator.settings.layers
    assert restored.mode == "orthogonal"
    np.testing.assert_array_equal(restored.q, encoder.q)
    assert not gen.trainable_names()
    z = Tensor(Rng(1).normal((3, 4)))
    np.testing.assert_array_equal(gen(z).data, small_generator(z).data)


def test_identity_encoder_is_not_stored(tmp_path, small_generator):
    path = tmp_path / "gen.ckpt"
    checkpoint.save_generator(path, small_generator, LatentEncoder())
    assert "encoder.q" not in path.read_text()
    _, encoder = checkpoint.load_generator(path)
    assert encoder.mode == "identity"
    assert encoder.q is None


def test_denoiser_round_trip(tmp_path, small_denoiser):
    path = tmp_path / "den.ckpt"
    checkpoint.save_denoiser(path, small_denoiser)
    den = checkpoint.load_denoiser(path)
    z_t = Tensor(Rng(2).normal((4, 2)))
    t = np.array([1, 10, 100, 1000])
    np.testing.assert_array_equal(den.predict(z_t, t, 1).data, small_denoiser.predict(z_t, t, 1).data)


def test_classifier_round_trip(tmp_path):
    clf = ConditionClassifier(2, 2, hidden=4, rng=Rng(3))
    path = tmp_path / "clf.ckpt"
    checkpoint.save_classifier(path, clf)
    x = Rng(4).normal((5, 2))
    np.testing.assert_array_equal(checkpoint.load_classifier(path).log_probs(x), clf.log_probs(x))


def test_layout_is_sorted_and_deterministic(tmp_path):
    arrays = {"b": np.arange(6.0).reshape(2, 3), "a": np.array(0.1)}
    first, second = tmp_path / "1.ckpt", tmp_path / "2.ckpt"
    checkpoint.write_checkpoint(first, arrays)
    checkpoint.write_checkpoint(second, dict(reversed(list(arrays.items()))))
    assert first.read_text() == second.read_text()
    assert first.read_text().splitlines() == [
        "SDSFORGE-CKPT v1",
        "ARRAY a 0",
        "0.10000000000000001",
        "ARRAY b 2 2 3",
        "0 1 2 3 4 5",
        "END",
    ]
    restored = checkpoint.read_checkpoint(first)
    assert restored["a"] == 0.1
    np.testing.assert_array_equal(restored["b"], arrays["b"])


@pytest.mark.parametrize(
    "text, line",
    [
        ("SDSFORGE-CKPT v2\nEND\n", 1),
        ("", 1),
        ("SDSFORGE-CKPT v1\nARRAY a 1 2\n1 2\n", 4),
        ("SDSFORGE-CKPT v1\nARRAY a 1 3\n1 2\nEND\n", 3),
        ("SDSFORGE-CKPT v1\nARRAY a 2 3\n1 2 3\nEND\n", 2),
        ("SDSFORGE-CKPT v1\nARRAY a 1 1\nx\nEND\n", 3),
        ("SDSFORGE-CKPT v1\nARRAY a 1 1\nnan\nEND\n", 3),
        ("SDSFORGE-CKPT v1\nARRAY a 0\n1\nARRAY a 0\n2\nEND\n", 4),
        ("SDSFORGE-CKPT v1\nweights\nEND\n", 2),
    ],
)
def test_malformed_checkpoints(tmp_path, text, line):
    path = tmp_path / "bad.ckpt"
    path.write_text(text)
    with pytest.raises(CheckpointError) as info:
        checkpoint.read_checkpoint(path)
    assert str(info.value).startswith(f"{path}:{line}:")


def test_loading_the_wrong_kind(tmp_path, small_denoiser):
    path = tmp_path / "den.ckpt"
    checkpoint.save_denoiser(path, small_denoiser)
    with pytest.raises(CheckpointError, match="not a generator checkpoint"):
        checkpoint.load_generator(path)
    with pytest.raises(CheckpointError, match="not a classifier checkpoint"):
        checkpoint.load_classifier(path)


def test_missing_file(tmp_path):
    with pytest.raises(OSError):
        checkpoint.read_checkpoint(tmp_path / "absent.ckpt")
