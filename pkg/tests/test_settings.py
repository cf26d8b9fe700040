from __future__ import annotations

import pytest

from sdsforge.errors import ConfigurationError
from sdsforge.settings import ExperimentConfig, parse_config, read_config


def test_empty_text_gives_defaults():
    cfg = parse_config("")
    assert cfg.echo() == ExperimentConfig().echo()
    assert cfg.sds.s == 7.5
    assert cfg.sds.t_max == 500
    assert cfg.sds.k is None
    assert cfg.generator.layers == 4
    assert read_config(None).echo() == cfg.echo()


def test_echo_round_trips():
    cfg = parse_config("sds.s = 7.5\n")
    echo = cfg.echo()
    assert "sds.s = 7.5\n" in echo
    assert parse_config(echo).echo() == echo
    keys = [line.split(" = ")[0] for line in echo.splitlines()]
    assert keys == sorted(keys)


def test_echo_round_trips_custom_classes():
    cfg = parse_config(
        "data.classes = [{kind: ring, radius: 3.0, width: 0.05}, {kind: moons, noise: 0.0}]\n"
        "sds.lambda_rec = 0.5\n"
        "sds.share_noise = false\n"
        "denoiser.hidden = [32, 32]\n"
    )
    assert [type(s).__module__.rsplit(".", 1)[1] for s in cfg.samplers()] == ["ring", "moons"]
    assert cfg.sds.share_noise is False
    assert cfg.denoiser.hidden == (32, 32)
    assert parse_config(cfg.echo()).echo() == cfg.echo()


def test_comments_and_blank_lines():
    cfg = parse_config("# adaptation\n\nsds.t_max = 300  # shallower\n   \nseed = 9\n")
    assert cfg.sds.t_max == 300
    assert cfg.seed == 9


def test_k_beyond_layers_names_key_and_line():
    with pytest.raises(ConfigurationError) as info:
        parse_config("sds.k = 99\n", source="exp.conf")
    assert info.value.key == "sds.k"
    assert info.value.line == 1
    assert str(info.value).startswith("exp.conf:1: sds.k")


def test_empty_timestep_range_is_rekeyed():
    with pytest.raises(ConfigurationError) as info:
        parse_config("sds.t_max = 100\nsds.t_min = 100\n")
    assert info.value.key == "sds.t_min"
    assert info.value.line == 2
    assert "sds.t_min" in str(info.value)


@pytest.mark.parametrize(
    "text, key, line",
    [
        ("sds.bogus = 1\n", "sds.bogus", 1),
        ("seed = 1\nnosuch = 3\n", "nosuch", 2),
        ("sds.iters = many\n", "sds.iters", 1),
        ("sds.share_noise = 3\n", "sds.share_noise", 1),
        ("sds.s = [1, 2\n", "sds.s", 1),
        ("sds.s = 1.0\nsds.s = 2.0\n", "sds.s", 2),
        ("sds.s =\n", "sds.s", 1),
        ("sds.weighting = cubic\n", "sds.weighting", 1),
        ("schedule.T = 100\n", "sds.t_max", None),
        ("sds.target = 0\n", "sds.target", 1),
        ("seed = abc\n", "seed", 1),
    ],
)
def test_invalid_settings(text, key, line):
    with pytest.raises(ConfigurationError) as info:
        parse_config(text)
    assert info.value.key == key
    assert info.value.line == line


def test_malformed_line():
    with pytest.raises(ConfigurationError) as info:
        parse_config("seed = 1\njust some words\n", source="bad.conf")
    assert info.value.line == 2
    assert str(info.value).startswith("bad.conf:2:")


def test_class_dimensions_must_match_output():
    with pytest.raises(ConfigurationError) as info:
        parse_config(
            "data.classes = [{kind: gaussian, mean: [0, 0, 0]}, {kind: gaussian, mean: [1, 1, 1]}]\n"
        )
    assert info.value.key == "generator.out_dim"


def test_unknown_distribution_kind():
    with pytest.raises(ConfigurationError) as info:
        parse_config("data.classes = [{kind: spiral}, {kind: moons}]\n")
    assert info.value.key == "data.classes"
    assert info.value.line == 1


def test_with_value_revalidates():
    cfg = ExperimentConfig()
    changed = cfg.with_value("sds.t_max", 300)
    assert changed.sds.t_max == 300
    assert cfg.sds.t_max == 500
    with pytest.raises(ConfigurationError):
        cfg.with_value("sds.t_max", 5000)
    with pytest.raises(ConfigurationError):
        cfg.with_value("sds.bogus", 1)


def test_read_config_from_file(tmp_path):
    path = tmp_path / "exp.conf"
    path.write_text("sds.lambda_dir = 0\n")
    assert read_config(path).sds.lambda_dir == 0.0
    with pytest.raises(OSError):
        read_config(tmp_path / "missing.conf")
