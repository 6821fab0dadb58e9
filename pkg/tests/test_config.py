import pytest

from kerrsense import ConfigError, UnitConvention
from kerrsense.config import load_config, parse_config

GOOD = """\
units: hz2pi
gamma_hz2pi: 1.0e9
sweeps:
  - name: fig4b
    base: {delta: 0, u_kerr: 1, eps: 1.0e6, g2: crit}
    axes:
      - {name: eps, scale: log, start: 1.0e3, stop: 1.0e7, count: 41}
    outputs: [steady, noise, snr]
    json_mirror: true
"""


def test_good_config():
    (spec,) = parse_config(GOOD)
    assert spec.units is UnitConvention.HZ_OVER_2PI
    assert spec.base.g2 == 2.5e8
    assert spec.axes[0].grid()[0] == pytest.approx(1e3)
    assert spec.json_mirror
    p = spec.resolve({"eps": 1e6})
    assert (p.gamma, p.g2, p.u_kerr) == (1.0, 0.25, 1e-9)


def test_gamma_units_config(tmp_path):
    path = tmp_path / "c.yaml"
    path.write_text("units: gamma\nsweeps:\n  - name: a\n    base: {g2: 0.2}\n    outputs: [eigen]\n")
    (spec,) = load_config(path)
    assert spec.base.gamma == 1.0 and spec.axes == ()


@pytest.mark.parametrize(
    "text, field, line",
    [
        (GOOD.replace("json_mirror", "mirror"), "sweeps[0].mirror", 9),
        (GOOD.replace("units: hz2pi", "units: rad"), "units", 1),
        (GOOD.replace("gamma_hz2pi: 1.0e9\n", ""), "gamma_hz2pi", 1),
        (GOOD.replace("count: 41", "count: 4.5"), "sweeps[0].axes[0].count", 7),
        (GOOD.replace("start: 1.0e3", "start: -1.0"), "sweeps[0].axes[0].start", 7),
        (GOOD.replace("u_kerr: 1", "u_kerr: -1"), "sweeps[0].base.u_kerr", 5),
        (GOOD.replace("name: eps", "name: gamma"), "sweeps[0].axes[0].name", 7),
        (GOOD.replace("outputs: [steady, noise, snr]", "outputs: [photons]"), "sweeps[0].outputs", 8),
        (GOOD.replace("delta: 0", "delta: fast"), "sweeps[0].base.delta", 5),
    ],
)
def test_errors_name_field_and_line(text, field, line):
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert info.value.field == field
    assert info.value.line == line
    assert f"line {line}" in str(info.value)


def test_units_are_required():
    with pytest.raises(ConfigError, match="units"):
        parse_config(GOOD.replace("units: hz2pi\n", ""))


def test_malformed_yaml():
    with pytest.raises(ConfigError, match="malformed"):
        parse_config("units: [gamma\n")


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.yaml")
