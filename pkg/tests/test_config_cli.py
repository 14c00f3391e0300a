import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import qdspin as q
from qdspin.cli import main
from qdspin.config import RunConfig, parse_b_values, parse_state_spec
from qdspin.constants import InvalidParameterError


def test_config_roundtrip_default():
    config = RunConfig()
    again = RunConfig.from_json(config.to_json())
    assert again == config


@settings(max_examples=100, deadline=None)
@given(
    st.floats(min_value=1.0, max_value=200.0),
    st.floats(min_value=1e3, max_value=1e7),
    st.sampled_from(["none", "initial", "half"]),
    st.lists(st.floats(min_value=0.0, max_value=5.0), min_size=1, max_size=4),
)
def test_config_roundtrip_random(a_total, n_nuclei, normalize, b_fields):
    config = RunConfig(a_total=a_total, n_nuclei=n_nuclei, normalize=normalize, b_fields=b_fields)
    assert RunConfig.from_json(config.to_json()) == config


def test_config_defaults_reproduce_material_parameters():
    config = RunConfig()
    dot = config.dot(0.0)
    assert dot.a_total == 83.0
    assert dot.n_nuclei == 1.5e6
    assert dot.i_nuclear == 1.5
    assert dot.constants.g_factor == 0.44


def test_config_rejects_unknown_keys():
    with pytest.raises(InvalidParameterError):
        RunConfig.from_dict({"bogus": 1})


def test_config_overrides_win():
    config = RunConfig(t_max=20.0).with_overrides(t_max=50.0, dt=None)
    assert config.t_max == 50.0 and config.dt == 0.02


def test_parse_state_specs():
    assert parse_state_spec("bell:psi-") == q.Bell("psi-")
    assert parse_state_spec("werner:p=0.33") == q.Werner(0.33)
    assert parse_state_spec("belldiag:a=0.4,b=0.4") == q.BellDiagonal(0.4, complex(0.4, 0.0))
    spec = parse_state_spec("phase:gamma=1.5707963")
    assert spec.gamma == pytest.approx(np.pi / 2, abs=1e-6)
    assert parse_state_spec("entfam:a=0.25").a == 0.25
    with pytest.raises(InvalidParameterError):
        parse_state_spec("nonsense:1")
    with pytest.raises(InvalidParameterError):
        parse_state_spec("werner:q=0.1")


def test_parse_b_values():
    assert parse_b_values("0.011") == [0.011]
    assert parse_b_values("0,0.003,1.0") == [0.0, 0.003, 1.0]
    vals = parse_b_values("0:0.1:0.005")
    assert len(vals) == 21 and vals[0] == 0.0 and vals[-1] == pytest.approx(0.1)
    with pytest.raises(InvalidParameterError):
        parse_b_values("")
    with pytest.raises(InvalidParameterError):
        parse_b_values("0:1:-0.1")


def test_cli_evolve_row_count_and_header(tmp_path):
    out = tmp_path / "traj.csv"
    code = main(["evolve", "--state", "bell:psi-", "--b", "0.011", "--tmax", "20", "--out", str(out)])
    assert code == 0
    lines = out.read_text().splitlines()
    headers = [l for l in lines if l.startswith("#")]
    rows = [l for l in lines if not l.startswith("#")]
    assert rows[0].startswith("t_ns,")
    assert len(rows) - 1 == 1001
    joined = "\n".join(headers)
    assert "qdspin_version=" in joined
    assert "b_mt=11" in joined
    assert "kink_times_ns=none" in joined


def test_cli_evolve_kink_header(tmp_path):
    out = tmp_path / "traj.csv"
    code = main(
        ["evolve", "--state", "belldiag:a=0.4,b=0.4", "--b", "0.1", "--tmax", "20", "--out", str(out)]
    )
    assert code == 0
    header = [l for l in out.read_text().splitlines() if "kink_times_ns=" in l][0]
    t_kink = float(header.split("kink_times_ns=")[1].split(";")[0])
    assert t_kink == pytest.approx(4.67, abs=0.05)


def test_cli_evolve_phase_state_bounds_coincide(tmp_path):
    out = tmp_path / "traj.csv"
    code = main(
        ["evolve", "--state", "phase:gamma=1.5707963", "--b", "0.0165", "--tmax", "5",
         "--out", str(out)]
    )
    assert code == 0
    rows = [l.split(",") for l in out.read_text().splitlines() if not l.startswith("#")][1:]
    d_lo = np.array([float(r[10]) for r in rows])
    d_hi = np.array([float(r[11]) for r in rows])
    assert np.abs(d_hi - d_lo).max() < 1e-9


def test_cli_evolve_deterministic_bytes(tmp_path):
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["evolve", "--state", "werner:p=0.33", "--b", "0.005", "--tmax", "5"]
    assert main(args + ["--out", str(out1)]) == 0
    assert main(args + ["--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_cli_sweep_monotone_m(tmp_path):
    out = tmp_path / "sweep.csv"
    code = main(
        ["sweep", "--metric", "M", "--b", "0:0.1:0.02", "--state", "werner:p=0.33",
         "--out", str(out)]
    )
    assert code == 0
    rows = [l.split(",") for l in out.read_text().splitlines() if not l.startswith("#")][1:]
    ms = [float(r[1]) for r in rows]
    assert len(ms) == 6
    assert all(m2 > m1 for m1, m2 in zip(ms, ms[1:]))


def test_cli_sweep_workers_byte_identical(tmp_path, monkeypatch):
    out1, out2 = tmp_path / "w1.csv", tmp_path / "w2.csv"
    args = ["sweep", "--metric", "esd", "--b", "0.011,0.0165", "--state", "bell:psi-", "--dt", "0.05"]
    monkeypatch.setenv("QDSPIN_WORKERS", "1")
    assert main(args + ["--out", str(out1)]) == 0
    monkeypatch.setenv("QDSPIN_WORKERS", "2")
    assert main(args + ["--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_cli_sweep_empty_b_is_usage_error(capsys):
    code = main(["sweep", "--metric", "M", "--b", "", "--state", "werner:p=0.33"])
    assert code == 2
    err = capsys.readouterr().err
    record = json.loads(err.strip().splitlines()[-1])
    assert record["error"] == "InvalidParameterError"


def test_cli_validity_error_exit_code(tmp_path, capsys):
    code = main(["evolve", "--state", "bell:psi-", "--b", "0", "--tmax", "20000",
                 "--out", str(tmp_path / "x.csv")])
    assert code == 3
    record = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert record["error"] == "ValidityWindowError"


def test_cli_config_file_plus_override(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps(RunConfig(state="werner:p=0.33", t_max=5.0, b_fields=[0.0]).to_dict()))
    out = tmp_path / "traj.csv"
    code = main(["evolve", "--config", str(cfg), "--b", "0.003", "--out", str(out)])
    assert code == 0
    header = "\n".join(l for l in out.read_text().splitlines() if l.startswith("#"))
    assert "b_mt=3" in header  # flag override wins over the file

def test_cli_calibration_out(tmp_path):
    out = tmp_path / "sweep.csv"
    calib = tmp_path / "curve.csv"
    code = main(
        ["sweep", "--metric", "M", "--b", "0:0.06:0.02", "--state", "werner:p=0.33",
         "--out", str(out), "--calibration-out", str(calib), "--calibration-quantity", "M"]
    )
    assert code == 0
    lines = [l for l in calib.read_text().splitlines() if not l.startswith("#")]
    assert lines[0] == "B_T,M"
    assert len(lines) == 1 + 4
