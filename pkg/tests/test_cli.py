import csv
import io
import subprocess
import sys

import numpy as np
import pytest

from twirlkit.channel import amplitude_damping, dumps_channel
from twirlkit.cli import ExperimentConfig, main


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.reader(io.StringIO(text)))


def test_twirl_ad_half(capsys):
    code, out, _ = run(["twirl", "ad:0.5"], capsys)
    assert code == 0
    table = rows(out)
    assert table[0] == ["pauli_string", "probability"]
    probs = {r[0]: float(r[1]) for r in table[1:]}
    assert abs(probs["I"] - (2 + 2 * np.sqrt(0.5) - 0.5) / 4) < 1e-11
    assert abs(probs["I"] - 0.72855) < 1e-5
    assert abs(probs["X"] - 0.125) < 1e-12 and abs(probs["Y"] - 0.125) < 1e-12
    assert abs(probs["Z"] - 0.02145) < 1e-5


def test_twirl_ad_zero(capsys):
    code, out, _ = run(["twirl", "ad:0"], capsys)
    assert code == 0
    assert [float(r[1]) for r in rows(out)[1:]] == [1, 0, 0, 0]


@pytest.mark.parametrize("source", ["ad:2", "ad:abc", "/no/such/file"])
def test_twirl_bad_source(source, capsys):
    code, _, err = run(["twirl", source], capsys)
    assert code == 2 and err.startswith("twirlkit:")


def test_twirl_channel_file(tmp_path, capsys):
    path = tmp_path / "ad.txt"
    path.write_text(dumps_channel(amplitude_damping(0.5)))
    code, out, _ = run(["twirl", str(path)], capsys)
    assert code == 0 and abs(float(rows(out)[2][1]) - 0.125) < 1e-12


def test_twirl_non_cptp_file(tmp_path, capsys):
    path = tmp_path / "bad.txt"
    path.write_text("n = 1\nkraus\n2, 0\n0, 1\n")
    code, _, err = run(["twirl", str(path)], capsys)
    assert code == 3 and "invalid channel" in err


def test_lindblad_default_grid(capsys):
    code, out, _ = run(["lindblad"], capsys)
    assert code == 0
    table = rows(out)
    assert table[0] == ["t", "rate_1", "deviation", "status"]
    assert [float(r[0]) for r in table[1:]] == [0.1, 0.5, 1.0, 2.0]
    for r in table[1:]:
        assert r[3] == "ok"
        assert abs(float(r[1]) - 1.0) < 1e-6
        assert float(r[2]) < 1e-6


def test_lindblad_t1_scaling(capsys):
    code, out, _ = run(["lindblad", "--t1", "2"], capsys)
    assert code == 0
    assert all(abs(float(r[1]) - 0.5) < 1e-6 for r in rows(out)[1:])


def test_lindblad_singular_row(capsys):
    code, out, _ = run(["lindblad", "--t-grid", "0.5,40"], capsys)
    assert code == 0
    assert rows(out)[2][-1] == "singular"


def test_lindblad_empty_grid(capsys):
    code, _, err = run(["lindblad", "--t-grid", ""], capsys)
    assert code == 2 and "empty" in err


def test_backaction(capsys):
    code, out, _ = run(["backaction", "--horizon", "20", "--t-step", "0.05"], capsys)
    assert code == 0
    main_table, summary = out.split("\n\n")
    table = rows(main_table)
    assert table[0][:3] == ["n_qubits", "t", "p_exact"]
    by_n = {}
    for r in table[1:]:
        by_n.setdefault(int(r[0]), []).append(r)
    assert sorted(by_n) == [1, 2, 3, 4]
    for n, rs in by_n.items():
        assert float(rs[0][2]) == 1 and float(rs[0][3]) == 1
        assert abs(float(rs[-1][3]) - 0.5**n) < 1e-6
    div = rows(summary)
    assert div[0] == ["n_qubits", "divergence_time"]
    times = [float(r[1]) for r in div[1:]]
    assert all(b <= a for a, b in zip(times, times[1:]))


def test_fixedpoint(capsys):
    code, out, _ = run(["fixedpoint"], capsys)
    assert code == 0
    table = rows(out)
    assert table[0] == ["iteration", "p1", "p2", "p3", "p4"]
    assert np.abs(np.array(table[-1][1:], dtype=float) - 0.25).max() < 1e-6


def test_fixedpoint_identity_start(capsys):
    code, out, _ = run(["fixedpoint", "--lambda", "0"], capsys)
    assert code == 0
    table = rows(out)
    assert len(table) == 2 and table[1] == ["0", "1", "0", "0", "0"]


def test_fixedpoint_iterations_decrease_with_lambda(capsys):
    counts = []
    for lam in ("0.1", "0.5", "0.9"):
        code, out, _ = run(["fixedpoint", "--lambda", lam], capsys)
        assert code == 0
        counts.append(len(rows(out)))
    assert counts[0] > counts[1] > counts[2]


def test_fixedpoint_lambda_domain(capsys):
    assert run(["fixedpoint", "--lambda", "1.5"], capsys)[0] == 2


def test_ctqec(capsys):
    code, out, _ = run(["ctqec", "--horizon", "0.05", "--beta", "0,10"], capsys)
    assert code == 0
    table = rows(out)
    assert table[0][:5] == ["beta", "t", "fidelity_exact", "fidelity_pta", "gap"]
    first = [r for r in table[1:] if float(r[1]) == 0]
    assert all(float(r[4]) == 0 for r in first)
    finals = [r for r in table[1:] if abs(float(r[1]) - 0.05) < 1e-12]
    assert len(finals) == 2 and float(finals[1][2]) >= float(finals[0][2])


def test_ctqec_stability_error(capsys):
    code, _, err = run(["ctqec", "--dt", "0.1", "--beta", "100"], capsys)
    assert code == 2 and "need dt <" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["backaction", "--t1", "-1"],
        ["backaction", "--qubits", "0..3"],
        ["backaction", "--qubits", "1..6"],
        ["backaction", "--fd-step", "0.1"],
        ["ctqec", "--beta", "-1"],
        ["backaction", "--threshold", "union"],
        ["nosuchcommand"],
        [],
    ],
)
def test_config_errors(argv, capsys):
    assert run(argv, capsys)[0] == 2


def test_output_file_and_determinism(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    argv = ["backaction", "--horizon", "0.5", "--qubits", "1..2"]
    assert main(argv + ["--out", str(a)]) == 0
    assert main(argv + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert capsys.readouterr().out == ""


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("t1 = 2\nt_step = 0.02\nhorizon = 0.1\nqubits = 2..3\n")
    code, out, _ = run(["backaction", "--config", str(cfg), "--qubits", "1..1"], capsys)
    assert code == 0
    summary = rows(out.split("\n\n")[1])
    assert [r[0] for r in summary[1:]] == ["1"]
    assert float(rows(out)[2][1]) == pytest.approx(0.02)


def test_config_file_errors(tmp_path, capsys):
    bad_key = tmp_path / "a.cfg"
    bad_key.write_text("colour = red\n")
    assert run(["backaction", "--config", str(bad_key)], capsys)[0] == 2
    bad_value = tmp_path / "b.cfg"
    bad_value.write_text("t1 = fast\n")
    assert run(["backaction", "--config", str(bad_value)], capsys)[0] == 2
    assert run(["backaction", "--config", str(tmp_path / "missing.cfg")], capsys)[0] == 2


def test_defaults_validate():
    cfg = ExperimentConfig().validate()
    assert cfg.qubit_range == (1, 4) and cfg.beta_grid == (0.0, 1.0, 10.0, 100.0)


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "twirlkit", "twirl", "ad:1"], capture_output=True, text=True)
    assert out.returncode == 0
    assert [float(r[1]) for r in rows(out.stdout)[1:]] == [0.25] * 4
