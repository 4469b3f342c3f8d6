import json

import pytest

from fstsp.cli import EXIT_IO, EXIT_OK, EXIT_VALIDATION, main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_generate_solve_check_pipeline(tmp_path, capsys):
    inst = tmp_path / "inst.json"
    code, _, _ = run(capsys, "generate", "--seed", "1", "--c", "3", "--depot", "b",
                     "--endurance", "20", "--speed", "25", "--ratio", "1.0",
                     "--out", str(inst))
    assert code == EXIT_OK and inst.exists()

    report = tmp_path / "report.json"
    sched = tmp_path / "sched.json"
    code, _, _ = run(capsys, "solve", "--instance", str(inst), "--variant", "dmn2",
                     "--mode", "wait", "--out", str(report), "--schedule-out", str(sched))
    assert code == EXIT_OK
    body = json.loads(report.read_text())
    assert body["status"] == "Optimal"

    code, out, _ = run(capsys, "check", "--instance", str(inst),
                       "--schedule", str(sched), "--mode", "wait", "--out", "-")
    assert code == EXIT_OK
    assert json.loads(out)["feasible"] is True

    # cross-variant equality through the CLI
    code, out, _ = run(capsys, "solve", "--instance", str(inst), "--variant", "dmn",
                       "--mode", "wait", "--out", "-")
    assert code == EXIT_OK
    assert json.loads(out)["value"] == pytest.approx(body["value"], rel=1e-6)


def test_check_infeasible_exit_code(tmp_path, capsys):
    inst = tmp_path / "inst.json"
    run(capsys, "generate", "--seed", "2", "--c", "2", "--out", str(inst))
    bad = tmp_path / "bad.json"
    bad.write_text('{"route": [0, 1, 3], "sorties": []}')
    code, out, _ = run(capsys, "check", "--instance", str(inst),
                       "--schedule", str(bad), "--mode", "wait", "--out", "-")
    assert code == EXIT_VALIDATION


def test_missing_file_is_io_error(capsys):
    code, _, err = run(capsys, "solve", "--instance", "/nonexistent.json")
    assert code == EXIT_IO and "cannot read" in err


def test_usage_error_exit_code(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["solve", "--variant", "bogus", "--instance", "x.json"])
    assert exc.value.code == 2


def test_emit_lp(tmp_path, capsys):
    inst = tmp_path / "inst.json"
    run(capsys, "generate", "--seed", "1", "--c", "2", "--ratio", "1.0", "--out", str(inst))
    out = tmp_path / "model.lp"
    code, _, _ = run(capsys, "emit-lp", "--instance", str(inst), "--variant", "dmn2",
                     "--mode", "wait", "--out", str(out))
    assert code == EXIT_OK
    text = out.read_text()
    assert text.splitlines()[2] == "Minimize" and text.rstrip().endswith("End")


def test_plot_has_one_dashed_pair_per_sortie(tmp_path, capsys):
    inst = tmp_path / "inst.json"
    run(capsys, "generate", "--seed", "1", "--c", "1", "--ratio", "1.0",
        "--endurance", "60", "--out", str(inst))
    sched = tmp_path / "sched.json"
    sched.write_text('{"route": [0, 2], "sorties": [[0, 1, 2]]}')
    code, out, _ = run(capsys, "plot", "--instance", str(inst),
                       "--schedule", str(sched), "--out", "-")
    assert code == EXIT_OK
    assert out.count('class="sortie"') == 2  # one dashed pair
    assert out.count('class="truck"') == 1
    assert out.count('class="depot"') == 1


def test_oracle_and_heuristic_commands(tmp_path, capsys):
    inst = tmp_path / "inst.json"
    run(capsys, "generate", "--seed", "3", "--c", "3", "--out", str(inst))
    code, out, _ = run(capsys, "oracle", "--instance", str(inst), "--mode", "nowait",
                       "--out", "-")
    assert code == EXIT_OK
    oracle_value = json.loads(out)["value"]
    code, out, _ = run(capsys, "heuristic", "--instance", str(inst),
                       "--mode", "nowait", "--out", "-")
    assert code == EXIT_OK
    sched = json.loads(out)
    assert sched["route"][0] == 0
    assert oracle_value > 0


def test_thin_client_against_live_server(tmp_path, capsys):
    import socket
    import threading
    import time

    import uvicorn

    from fstsp.service.app import app

    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        port = s.getsockname()[1]
    config = uvicorn.Config(app, host="127.0.0.1", port=port, log_level="error")
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    try:
        for _ in range(100):
            if server.started:
                break
            time.sleep(0.05)
        assert server.started
        url = f"http://127.0.0.1:{port}"
        inst = tmp_path / "inst.json"
        code, _, _ = run(capsys, "generate", "--seed", "4", "--c", "2",
                         "--server", url, "--out", str(inst))
        assert code == EXIT_OK
        code, out, _ = run(capsys, "solve", "--instance", str(inst),
                           "--variant", "dmn2", "--mode", "wait",
                           "--server", url, "--out", "-")
        assert code == EXIT_OK
        assert json.loads(out)["status"] == "Optimal"
        # validation errors surface as exit code 4 through the wire too
        bad = tmp_path / "bad.json"
        bad.write_text(inst.read_text().replace('"endurance": 20.0', '"endurance": -1.0'))
        code, _, err = run(capsys, "solve", "--instance", str(bad), "--server", url)
        assert code == EXIT_VALIDATION
    finally:
        server.should_exit = True
        thread.join(timeout=5)


def test_bench_smoke_writes_tables(tmp_path, capsys):
    outdir = tmp_path / "bench"
    code, out, _ = run(capsys, "bench", "--grid", "smoke", "--variants", "dmn2",
                       "--modes", "wait,nowait", "--out", str(outdir))
    assert code == EXIT_OK
    for name in ("results.csv", "by_speed.csv", "by_depot.csv", "wait_vs_nowait.csv"):
        assert (outdir / name).exists()
    rows = (outdir / "results.csv").read_text().splitlines()
    assert rows[0].startswith("instance,")
    assert len(rows) == 1 + 2 * 2  # 2 instances x 2 modes
