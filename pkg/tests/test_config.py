import json

import pytest

from fracmech.config import ConfigError, apply_overrides, parse_config


def test_minimal_beam_config_gets_defaults():
    cfg = parse_config({"analysis": "beam-static"})
    assert cfg.structure == "beam"
    assert cfg.material["Ks"] == pytest.approx(5 / 6)
    assert cfg.mesh["n_elem"] == 50
    assert cfg.bc == "CC"
    assert cfg.load == {"Fz": 1e6}
    assert cfg.geometry == {"L": 1.0, "b": 0.1, "h": 0.05}
    assert cfg.fractional.is_classical


def test_minimal_plate_config_gets_defaults():
    cfg = parse_config(analysis="plate-modal")
    assert (cfg.mesh["nx"], cfg.mesh["ny"]) == (20, 20)
    assert cfg.bc == "SSSS"
    assert cfg.geometry == {"L": 1.0, "B": 1.0, "h": 0.1}
    assert cfg.load == {"Fz": 1e7}


def test_order_outside_range_is_rejected_with_reason():
    with pytest.raises(ConfigError, match=r"\[0\.5, 1\]"):
        parse_config({"fractional": {"alpha1": 0.3}}, analysis="beam-static")
    with pytest.raises(ConfigError, match="sweep.alpha2"):
        parse_config({"sweep": {"alpha2": [0.8, 1.2]}}, analysis="sweep")


def test_horizon_longer_than_domain_is_rejected():
    with pytest.raises(ConfigError, match="l_f"):
        parse_config({"fractional": {"l_f": 2.0}}, analysis="beam-static")
    # a plate measures against its longer side
    cfg = parse_config({"geometry": {"B": 2.0}, "fractional": {"l_f": 1.5}}, analysis="plate-static")
    assert cfg.fractional.l_f == 1.5


@pytest.mark.parametrize(
    "raw,key",
    [
        ({"colour": 1}, "colour"),
        ({"mesh": {"n_elements": 4}}, "mesh.n_elements"),
        ({"geometry": {"width": 1.0}}, "geometry.width"),
        ({"load": {"Fq": 1.0}}, "load.Fq"),
        ({"material": {"E": "stiff"}}, "material.E"),
        ({"mesh": {"n_elem": 1}}, "mesh.n_elem"),
        ({"bc": "SSSS"}, "bc"),
        ({"output": {"format": "xml"}}, "output.format"),
    ],
)
def test_schema_violations_name_the_key(raw, key):
    with pytest.raises(ConfigError, match=key.replace(".", r"\.")):
        parse_config(raw, analysis="beam-static")


def test_unknown_analysis():
    with pytest.raises(ConfigError, match="analysis"):
        parse_config({})
    with pytest.raises(ConfigError):
        parse_config({"analysis": "beam-dynamic"})


def test_overrides_use_dot_paths_and_json_values():
    raw = apply_overrides({"mesh": {"n_elem": 4}}, ["mesh.n_elem=8", "fractional.alpha1=0.75", "bc=\"SS\"", "bc=SS"])
    assert raw == {"mesh": {"n_elem": 8}, "fractional": {"alpha1": 0.75}, "bc": "SS"}
    with pytest.raises(ConfigError):
        apply_overrides({}, ["mesh.n_elem"])
    with pytest.raises(ConfigError):
        apply_overrides({"bc": "SS"}, ["bc.case=CC"])


def test_config_file_and_overrides(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"analysis": "beam-static", "bc": "SS", "mesh": {"n_elem": 10}}))
    cfg = parse_config(path, ["mesh.n_elem=12"])
    assert cfg.analysis == "beam-static" and cfg.bc == "SS" and cfg.mesh["n_elem"] == 12
    # the subcommand wins over the file
    assert parse_config(path, analysis="beam-modal").analysis == "beam-modal"


def test_bad_config_files(tmp_path):
    with pytest.raises(ConfigError, match="does not exist"):
        parse_config(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError, match="not valid JSON"):
        parse_config(bad)


def test_pressure_becomes_line_load():
    cfg = parse_config({"load": {"pressure": 1e7}}, analysis="beam-static")
    assert cfg.load == {"Fz": pytest.approx(1e6)}


def test_sweep_grids_are_normalised():
    cfg = parse_config(
        {"sweep": {"structure": "beam", "alpha1": [0.7, 0.8], "l_f": 0.3}, "fractional": {"l_star": 0.002}},
        analysis="sweep",
    )
    assert cfg.sweep["alpha1"] == [0.7, 0.8]
    assert cfg.sweep["alpha2"] == [1.0]
    assert cfg.sweep["l_f"] == [0.3]
    assert cfg.sweep["l_star"] == [0.002]
    with pytest.raises(ConfigError, match="sweep.structure"):
        parse_config({"sweep": {"structure": "shell"}}, analysis="sweep")


def test_echo_is_json_safe():
    cfg = parse_config({"fractional": {"alpha1": 0.8, "l_f": 0.3}}, analysis="beam-static")
    echo = cfg.echo()
    assert json.loads(json.dumps(echo)) == echo
    assert echo["fractional"]["alpha1"] == 0.8


def test_dispersion_and_lattice_sections_are_checked():
    with pytest.raises(ConfigError, match="kmin"):
        parse_config({"dispersion": {"kmin": 10.0, "kmax": 1.0}}, analysis="dispersion")
    with pytest.raises(ConfigError, match="lattice.alpha2"):
        parse_config({"lattice": {"alpha2": 0.9}}, analysis="lattice-check")
