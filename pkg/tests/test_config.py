import json

import pytest

from cqedgate import PolarizationPair
from cqedgate.config import QUAD_ENV_VAR, ConfigError, load_config, parse_config
from cqedgate.units import nm_to_ghz


def write(tmp_path, text):
    path = tmp_path / "cfg.json"
    path.write_text(text)
    return str(path)


def test_defaults():
    cfg = load_config(None)
    assert cfg.alpha == 0.93
    assert cfg.probe.fwhm == 4.2
    assert cfg.operating_nu == pytest.approx(nm_to_ghz(920.96))
    assert cfg.backgrounds[PolarizationPair.parse("VV")].a0 == 0.19
    assert cfg.quad.node_count == 40
    assert cfg.rabi.p_pi == 0.12
    assert cfg.lifetime.gamma0 == pytest.approx(1 / 0.53)


def test_full_document(tmp_path):
    doc = {"device": {"g_ghz": 10, "cavity_ghz": 325000.0, "qd_nm": 922.0, "t2_ps": None},
           "probe": {"fwhm_ghz": 0},
           "gate": {"alpha": 0.5, "operating_ghz": 325001.0,
                    "backgrounds": {"V->H": [0.1, 0, 0]}},
           "quad": {"nodes": 12}, "rabi": {"damping": 0.2}, "lifetime": {"gamma0_inv_ps": 600}}
    cfg = load_config(write(tmp_path, json.dumps(doc, indent=2)))
    assert cfg.device.nu_cavity == 325000.0
    assert cfg.probe.center == 325000.0
    assert cfg.operating_nu == 325001.0
    assert cfg.backgrounds[PolarizationPair.parse("VH")].a0 == 0.1
    assert cfg.backgrounds[PolarizationPair.parse("HH")].is_zero
    assert cfg.quad.node_count == 12


@pytest.mark.parametrize("text,line,fragment", [
    ('{\n  "device": {\n    "g_ghz": "big"\n  }\n}', 3, "finite number"),
    ('{\n  "device": {"cavity_nm": 920, \n "cavity_ghz": 3e5}}', 3, "only one"),
    ('{\n\n  "gate": {"alpha": 1.5}}', 3, "[0, 1]"),
    ('{\n  "probe": {\n  "colour": 1}}', 3, "unknown key"),
    ('{"quad": {\n "nodes": 0}}', 2, "positive integer"),
])
def test_errors_name_the_line(tmp_path, text, line, fragment):
    path = write(tmp_path, text)
    with pytest.raises(ConfigError) as info:
        load_config(path)
    assert f"{path}:{line}:" in str(info.value)
    assert fragment in str(info.value)


def test_invalid_json_position(tmp_path):
    path = write(tmp_path, '{\n  "device": {,}\n}')
    with pytest.raises(ConfigError, match=r"cfg.json:2:\d+: invalid JSON"):
        load_config(path)


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(str(tmp_path / "nope.json"))


def test_env_override(monkeypatch):
    monkeypatch.setenv(QUAD_ENV_VAR, "7")
    assert parse_config({}).quad.node_count == 7
    monkeypatch.setenv(QUAD_ENV_VAR, "x")
    with pytest.raises(ConfigError):
        parse_config({})


def test_g_zero_allowed():
    cfg = parse_config({"device": {"g_ghz": 0}})
    assert cfg.device.g == 0
