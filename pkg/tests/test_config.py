import json
import math

import pytest

from quatsurf.errors import ConfigInvalid
from quatsurf.io.config import (
    RunConfig,
    config_digest,
    config_from_dict,
    load_config,
    parse_spectral,
    run_config_schema,
)


@pytest.mark.parametrize(
    "value, expected",
    [
        (0.5, 0.5),
        (-3, -3.0),
        ([0.3, 0.2], 0.3 + 0.2j),
        ((1.0, -1.0), 1.0 - 1.0j),
        ("7 - 4*sqrt(3)", 7.0 - 4.0 * math.sqrt(3.0)),
        ("exp(I*pi/3)", complex(0.5, math.sqrt(3.0) / 2.0)),
    ],
)
def test_parse_spectral(value, expected):
    assert parse_spectral(value) == pytest.approx(expected, abs=1e-14)


@pytest.mark.parametrize(
    "value", [True, [1.0], [1.0, 2.0, 3.0], "x + 1", "__import__('os')", "1 +"]
)
def test_parse_spectral_rejects(value):
    with pytest.raises(ValueError):
        parse_spectral(value)


def test_defaults():
    config = config_from_dict({})
    assert isinstance(config, RunConfig)
    assert config.surface.kind == "cylinder"
    assert config.dual_gauge == "parallel_cmc"
    assert config.sweep.n_re == 13 and config.sweep.n_im == 3
    assert config.transport.substeps == 64
    assert config.output.formats == ["obj"]


def test_schema_error_carries_path():
    with pytest.raises(ConfigInvalid) as info:
        config_from_dict({"surface": {"kind": "torus"}})
    assert info.value.path == ["surface", "kind"]
    assert str(info.value).startswith("surface/kind: ")


def test_unknown_key_rejected():
    with pytest.raises(ConfigInvalid):
        config_from_dict({"surfce": {}})


def test_model_error_carries_path():
    with pytest.raises(ConfigInvalid) as info:
        config_from_dict({"surface": {"grid": {"x_min": 1.0, "x_max": 0.0}}})
    assert info.value.path[:2] == ["surface", "grid"]


def test_classical_step_needs_T0():
    with pytest.raises(ConfigInvalid) as info:
        config_from_dict({"pipeline": [{"kind": "classical", "spectral": 0.75}]})
    assert info.value.path[:2] == ["pipeline", 0]


def test_bianchi_step_needs_second_value():
    with pytest.raises(ConfigInvalid):
        config_from_dict({"pipeline": [{"kind": "bianchi", "spectral": [0.3, 0.2]}]})


def test_bad_spectral_expression():
    with pytest.raises(ConfigInvalid):
        config_from_dict({"pipeline": [{"kind": "rho", "spectral": "rho + 1"}]})


def test_non_mapping_document():
    with pytest.raises(ConfigInvalid):
        config_from_dict([1, 2, 3])


def test_step_values():
    config = config_from_dict(
        {"pipeline": [{"kind": "bianchi", "spectral": [0.3, 0.2], "second": "-2 + I/2"}]}
    )
    step = config.pipeline[0]
    assert step.value() == 0.3 + 0.2j
    assert step.second_value() == pytest.approx(-2.0 + 0.5j)


def test_section_sign_validated():
    with pytest.raises(ConfigInvalid):
        config_from_dict({"pipeline": [{"kind": "rho", "spectral": 0.5, "section": {"sign": 2}}]})


def test_load_yaml_and_json(tmp_path):
    yaml_path = tmp_path / "run.yaml"
    yaml_path.write_text("surface:\n  kind: plane\nseed: 7\n", encoding="utf-8")
    json_path = tmp_path / "run.json"
    json_path.write_text(json.dumps({"surface": {"kind": "plane"}, "seed": 7}), encoding="utf-8")
    from_yaml, from_json = load_config(yaml_path), load_config(json_path)
    assert from_yaml.surface.kind == "plane"
    assert config_digest(from_yaml) == config_digest(from_json)


def test_unparsable_file(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(ConfigInvalid):
        load_config(path)


def test_missing_file(tmp_path):
    with pytest.raises(OSError):
        load_config(tmp_path / "absent.yaml")


def test_digest_tracks_content():
    assert config_digest(config_from_dict({})) == config_digest(config_from_dict({}))
    assert config_digest(config_from_dict({})) != config_digest(config_from_dict({"seed": 1}))


def test_schema_is_json_schema():
    schema = run_config_schema()
    assert schema["type"] == "object"
    assert "pipeline" in schema["properties"]
