import pytest

from bankdyn.config import RunConfig, dump_config, load_config, parse_config
from bankdyn.errors import ConfigError
from bankdyn.integrator import IntegratorConfig
from bankdyn.model import ModelParams, RateSet, SinusoidalRate


def test_empty_file_gives_defaults(tmp_path):
    path = tmp_path / "empty.ini"
    path.write_text("")
    cfg = load_config(path)
    assert cfg == RunConfig()
    assert (cfg.params.kappa1, cfg.params.kappa2) == (0.08, 0.025)
    reg = cfg.regulation
    assert (reg.lambda_l, reg.lambda_u, reg.gamma_l, reg.gamma_u) == (0.78, 1.0, 0.1, 0.2)
    assert load_config(None) == cfg


def test_reserve_fractions_summing_past_one():
    with pytest.raises(ConfigError, match="kappa1 \\+ kappa2 \\+ delta"):
        parse_config("[params]\nkappa1 = 0.5\nkappa2 = 0.4\ndelta = 0.2\n")


def test_d0_list_makes_three_sets():
    cfg = parse_config("[scenario]\nd0 = [0.7, 6, 10]\n")
    sets = cfg.scenario.sets()
    assert [s.name for s in sets] == ["set1", "set2", "set3"]
    assert [s.D0 for s in sets] == [0.7, 6.0, 10.0]
    assert all(len(s.ratios) == 10 for s in sets)


def test_ratio_forms():
    grid = parse_config("[scenario]\nratios = 0.2:2.0:0.2\n").scenario.ratios
    assert grid == (0.2, 0.4, 0.6, 0.8, 1.0, 1.2, 1.4, 1.6, 1.8, 2.0)
    listed = parse_config("[scenario]\nratios = [0.2, 0.3, 0.6]\nnames = [\"a\"]\nd0 = [6]\n").scenario
    assert listed.ratios == (0.2, 0.3, 0.6)
    assert listed.sets()[0].initial_states()[1][2].L == pytest.approx(1.8, abs=1e-15)


def test_partial_rate_section_keeps_other_defaults():
    cfg = parse_config("[rates.loan]\ncos_amp = 0.0\n")
    assert cfg.rates.loan == SinusoidalRate(0.11, 0.0, 0.0, 1.0)
    assert cfg.rates.deposit == RateSet().deposit


@pytest.mark.parametrize("text,line", [
    ("[params]\nkappa1 = 0.08\nkapa2 = 0.1\n", 3),
    ("[integrator]\n\ndt = fast\n", 3),
    ("[scenario]\nd0 = [1]\nworkers = 0\n", 3),
])
def test_bad_keys_report_line(text, line):
    with pytest.raises(ConfigError, match=f"line {line}"):
        parse_config(text, source="run.ini")


@pytest.mark.parametrize("text", [
    "[plot]\nx = 1\n",
    "kappa1 = 0.1\n",
    "[params\nk = 1\n",
    "[rates.loan]\nfreq = 2\n",
    "[scenario]\nd0 = [1, 2]\nnames = [\"a\"]\n",
    "[scenario]\nratios = [0.4, 0.2]\n",
    "[regulation]\ncar_below_min = maybe\n",
    "[integrator]\nevent_policy = ignore\n",
])
def test_invalid_configs(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "nope.ini")


def test_round_trip():
    cfg = RunConfig(
        params=ModelParams(k=0.02, b=0.5),
        rates=RateSet(SinusoidalRate(0.03, 0.01, 0.001, 2.0), SinusoidalRate(0.1, 0.0, 0.02, 2.0),
                      SinusoidalRate(0.05, 0.005, 0.0, 2.0)),
        integrator=IntegratorConfig(t_end=1.5, dt=1e-3, event_policy="annotate-and-continue"),
    )
    cfg = parse_config(dump_config(cfg).replace("d0 = [0.7, 6.0, 10.0]", "d0 = [1, 2]\nnames = [\"x\", \"y\"]"))
    assert parse_config(dump_config(cfg)) == cfg
    assert parse_config(dump_config(RunConfig())) == RunConfig()
