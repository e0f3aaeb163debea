import json
import xml.etree.ElementTree as ET
from pathlib import Path


from coldpipe.cli import main

CONFIG = str(Path(__file__).resolve().parents[1] / "configs" / "tab1.yaml")


def run(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_solve_smoke(capsys):
    code, out, _ = run(["solve", "--config", CONFIG, "--tokens", "2048",
                        "--strategy", "optimal_dp"], capsys)
    assert code == 0
    assert "makespan" in out
    assert "Device" in out


def test_solve_writes_json(tmp_path, capsys):
    out_path = tmp_path / "plan.json"
    code, _, _ = run(["solve", "--config", CONFIG, "--tokens", "2048",
                      "--strategy", "even", "--out", str(out_path)], capsys)
    assert code == 0
    payload = json.loads(out_path.read_text())
    assert payload["strategy"] == "even"
    assert len(payload["plan"]) == 4
    assert payload["timeline"]["makespan_s"] == payload["makespan_s"]


def test_unknown_strategy_is_usage_error(capsys):
    code, _, err = run(["solve", "--config", CONFIG, "--tokens", "2048",
                        "--strategy", "alchemy"], capsys)
    assert code == 1
    assert "alchemy" in err


def test_brute_force_guard_refusal(capsys):
    code, _, err = run(["solve", "--config", CONFIG, "--tokens", "2048",
                        "--strategy", "brute_force"], capsys)
    assert code == 1
    assert "brute force" in err


def test_bad_tokens_usage_error(capsys):
    code, _, _ = run(["solve", "--config", CONFIG, "--tokens", "0"], capsys)
    assert code == 1


def test_config_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.yaml"
    bad.write_text("model: {preset: qwen3_14b}\n")  # missing sections
    code, _, err = run(["solve", "--config", str(bad), "--tokens", "64"], capsys)
    assert code == 2
    assert "config error" in err


def test_infeasible_exit_code_and_diagnostic(tmp_path, capsys):
    text = Path(CONFIG).read_text().replace("memory_gb: 20.0", "memory_gb: 0.1")
    text = text.replace("memory_gb: 10.0", "memory_gb: 0.1")
    text = text.replace("memory_gb: 8.0", "memory_gb: 0.1")
    cfg = tmp_path / "tiny.yaml"
    cfg.write_text(text)
    code, _, err = run(["solve", "--config", str(cfg), "--tokens", "2048"], capsys)
    assert code == 3
    assert "memory headroom" in err
    assert "Device 1" in err


def test_sweep_writes_csv(tmp_path, capsys):
    out = tmp_path / "r.csv"
    code, stdout, _ = run(["sweep", "--config", CONFIG, "--out", str(out)], capsys)
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == ("token_length,strategy,makespan_s,load_s_total,"
                        "comm_s_total,comp_s_total,wait_s_total,improvement_pct")
    assert len(lines) == 25  # header + 6 token lengths x 4 strategies
    assert "average improvement" in stdout


def test_sweep_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(["sweep", "--config", CONFIG, "--out", str(a)], capsys)[0] == 0
    assert run(["sweep", "--config", CONFIG, "--out", str(b)], capsys)[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_gantt_svg_well_formed(tmp_path, capsys):
    out = tmp_path / "chart.svg"
    code, _, _ = run(["gantt", "--config", CONFIG, "--tokens", "8192",
                      "--strategy", "even", "--format", "svg",
                      "--out", str(out)], capsys)
    assert code == 0
    root = ET.fromstring(out.read_text())
    assert root.tag.endswith("svg")
    rects = [el for el in root.iter() if el.tag.endswith("rect")]
    assert len(rects) > 8  # bars for 4 stages plus legend swatches
    # long-token even split makes the weak devices wait: hatched gaps
    # appear for stages beyond the legend swatch
    assert out.read_text().count("url(#wait)") >= 3


def test_gantt_single_device_two_bars(tmp_path, capsys):
    out = tmp_path / "single.svg"
    code, _, _ = run(["gantt", "--config", CONFIG, "--tokens", "2048",
                      "--strategy", "single_device", "--out", str(out)], capsys)
    assert code == 0
    text = out.read_text()
    assert text.count("#4C72B0") == 2  # one load bar + one legend swatch
    assert text.count("#DD8452") == 1  # comm appears only in the legend


def test_gantt_ascii_fixed_width(capsys):
    code, out, _ = run(["gantt", "--config", CONFIG, "--tokens", "8192",
                        "--strategy", "even", "--format", "ascii"], capsys)
    assert code == 0
    bar_lines = [l for l in out.splitlines() if l.rstrip().endswith("|")]
    assert len(bar_lines) == 4
    assert all(len(l) == 80 for l in bar_lines)


def test_verify_smoke(capsys):
    code, out, _ = run(["verify", "--count", "5", "--seed", "1"], capsys)
    assert code == 0
    assert out.count("ok") >= 5
    assert "5/5 instances passed" in out


def test_verify_zero_count_usage_error(capsys):
    code, _, _ = run(["verify", "--count", "0"], capsys)
    assert code == 1


def test_verify_detects_injected_solver_fault(capsys, monkeypatch):
    from coldpipe import dp_scheduler
    from coldpipe.dp_scheduler import SolveResult

    true_solve = dp_scheduler.solve

    def skewed(tables):
        result = true_solve(tables)
        return SolveResult(makespan_s=result.makespan_s * 1.05,
                           plan=result.plan)

    monkeypatch.setattr(dp_scheduler, "solve", skewed)
    code, out, _ = run(["verify", "--count", "4", "--seed", "2"], capsys)
    assert code == 4
    assert "MISMATCH" in out


def test_dump_config_round_trip(tmp_path, capsys):
    out = tmp_path / "dumped.yaml"
    code, _, _ = run(["dump-config", "--preset", "tab1", "--out", str(out)], capsys)
    assert code == 0
    assert out.read_text() == Path(CONFIG).read_text()
    redumped = tmp_path / "again.yaml"
    code, _, _ = run(["dump-config", "--config", str(out),
                      "--out", str(redumped)], capsys)
    assert code == 0
    assert redumped.read_bytes() == out.read_bytes()


def test_missing_subcommand_usage_error(capsys):
    assert run([], capsys)[0] == 1


def test_threads_env_respected(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("COLDPIPE_THREADS", "3")
    out = tmp_path / "r.csv"
    ref = tmp_path / "ref.csv"
    assert run(["sweep", "--config", CONFIG, "--out", str(out)], capsys)[0] == 0
    monkeypatch.setenv("COLDPIPE_THREADS", "1")
    assert run(["sweep", "--config", CONFIG, "--out", str(ref)], capsys)[0] == 0
    assert out.read_bytes() == ref.read_bytes()


def test_threads_env_garbage_is_config_error(capsys, monkeypatch):
    monkeypatch.setenv("COLDPIPE_THREADS", "many")
    code, _, err = run(["sweep", "--config", CONFIG, "--out", "/tmp/x.csv"],
                       capsys)
    assert code == 2
    assert "COLDPIPE_THREADS" in err


TINY_CONFIG = """\
model:
  d_model: 512
  h_q: 8
  h_kv: 2
  d_head: 64
  d_ff: 2048
  num_layers: 6
  bytes_per_element: 2
radio:
  efficiency: 0.5
  bandwidth_mhz: 160.0
  noise_dbm_per_hz: -174.0
  ref_distance_m: 1.0
  path_loss_exp: 3.0
  ref_gain_db: -47.2
  tx_power_down_dbm: 25.0
devices:
- {id: 1, peak_tflops: 40.0, util_ceiling: 0.5, util_rate_per_token: 6.0e-4,
   disk_read_mb_s: 3000.0, memory_gb: 4.0, tx_power_up_dbm: 20.0, distance_m: 2.0}
- {id: 2, peak_tflops: 10.0, util_ceiling: 0.8, util_rate_per_token: 1.5e-3,
   disk_read_mb_s: 1500.0, memory_gb: 2.0, tx_power_up_dbm: 16.0, distance_m: 5.0}
experiment:
  token_lengths: [128, 1024]
  strategies: [optimal_dp, brute_force, even]
"""


def test_sweep_with_brute_force_strategy(tmp_path, capsys):
    cfg = tmp_path / "tiny.yaml"
    cfg.write_text(TINY_CONFIG)
    out = tmp_path / "tiny.csv"
    code, _, _ = run(["sweep", "--config", str(cfg), "--out", str(out)], capsys)
    assert code == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 7  # header + 2 token lengths x 3 strategies
    makespans = {}
    for line in lines[1:]:
        fields = line.split(",")
        makespans[(fields[0], fields[1])] = float(fields[2])
    for t in ("128", "1024"):
        assert makespans[(t, "optimal_dp")] == makespans[(t, "brute_force")]
        assert makespans[(t, "optimal_dp")] <= makespans[(t, "even")]
