import json

from tepmon.cli import main


def test_gen_data_and_fit(tmp_path, capsys):
    d = tmp_path / "data"
    assert main(["gen-data", "--data-dir", str(d)]) == 0
    out = capsys.readouterr().out
    assert "wrote 16 series" in out
    assert (d / "fault_0.csv").exists() and (d / "fault_15.csv").exists()

    model_path = tmp_path / "model.json"
    assert main(["fit", "--data-dir", str(d), "--out", str(model_path)]) == 0
    out = capsys.readouterr().out
    assert "a=28" in out
    doc = json.loads(model_path.read_text())
    assert doc["a"] == 28


def test_eval_detect_writes_csv(data_dir, tmp_path, capsys):
    csv_path = tmp_path / "detect.csv"
    assert main(
        ["eval", "detect", "--data-dir", str(data_dir), "--out", str(csv_path)]
    ) == 0
    out = capsys.readouterr().out
    assert "fault  7: alarm at t=" in out
    assert csv_path.read_text().startswith("fault_id,detected,alarm_t")


def test_eval_diagnose_stub(data_dir, capsys):
    assert main(["eval", "diagnose", "--data-dir", str(data_dir)]) == 0
    out = capsys.readouterr().out
    assert "accuracy:" in out
