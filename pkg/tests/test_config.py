import math

import pytest

from tfqkd.config import (FIELD_NAMES, ConfigError, ProtocolConfig, apply_overrides,
                          dump_config, load_config, misalignment_angle, parse_config_text)


def test_defaults():
    c = ProtocolConfig()
    assert (c.mu_0, c.mu_1, c.P_mu0, c.eps_sec, c.eps_cor) == (0.4, 1e-5, 0.15, 1e-10, 1e-12)
    assert c.P_X == pytest.approx(0.25)
    assert c.P_mu1 == pytest.approx(0.85)
    assert c.N_Z == c.N * 0.75 ** 2
    assert c.alpha == c.beta == misalignment_angle(0.02)


def test_misalignment_angle():
    assert math.sin(misalignment_angle(0.02)) ** 2 == pytest.approx(0.02)
    with pytest.raises(ValueError):
        misalignment_angle(1.5)


@pytest.mark.parametrize("change", [dict(N=0), dict(P_Z=1.0), dict(mu_1=0.5), dict(mu_Z=-1),
                                    dict(P_d=2.0), dict(f_EC=0.9), dict(delta_mu=1.0),
                                    dict(eps_sec=0.0)])
def test_validation(change):
    with pytest.raises(ConfigError):
        ProtocolConfig().replace(**change)


def test_parse_and_dump_roundtrip():
    c = ProtocolConfig(N=1e14, delta_mu=0.1)
    assert parse_config_text(dump_config(c)) == c
    assert set(line.split(" = ")[0] for line in dump_config(c).splitlines()) == set(FIELD_NAMES)


def test_comments_and_blank_lines():
    c = parse_config_text("# header\n\nN = 1e13  # pulses\nP_d=1e-8\n")
    assert c.N == 1e13 and c.P_d == 1e-8


@pytest.mark.parametrize("text, line", [("N = 1e12\nbogus = 3\n", 2),
                                        ("N = 1e12\n\nN = 1e13\n", 3),
                                        ("P_d = lots\n", 1),
                                        ("# ok\nmu_Z 0.1\n", 2)])
def test_errors_carry_line_numbers(text, line):
    with pytest.raises(ConfigError) as info:
        parse_config_text(text)
    assert info.value.lineno == line
    assert f"line {line}" in str(info.value)


def test_load_with_overrides(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("N = 1e13\nP_d = 1e-8\n")
    c = load_config(str(path), ["P_d=1e-7", "delta_mu = 0.2"])
    assert (c.N, c.P_d, c.delta_mu) == (1e13, 1e-7, 0.2)
    assert load_config(None) == ProtocolConfig()


@pytest.mark.parametrize("item", ["N", "nope=1", "N=abc"])
def test_bad_overrides(item):
    with pytest.raises(ConfigError):
        apply_overrides(ProtocolConfig(), [item])
