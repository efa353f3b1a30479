from __future__ import annotations

import csv
import json
import shutil

import numpy as np
import pytest

from adavu.cli import main
from adavu.labanxml import parse_xml
from adavu.ontology import shipped_ontology_dir
from adavu.recognizer import write_skeleton_csv
from adavu.synthetic import make_templates


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_transcribe_natta(tmp_path, data_dir, capsys):
    xml, svg, rep = tmp_path / "n.xml", tmp_path / "n.svg", tmp_path / "r.json"
    code, out, _ = run(["transcribe", "--annotation", data_dir / "natta_1.csv", "--title", "natta_1",
                        "--out-xml", xml, "--out-svg", svg, "--report", rep], capsys)
    assert code == 0 and out == ""
    score = parse_xml(xml.read_text())
    assert [f.posture_id for f in score.frames] == [None] * 5
    assert svg.read_text().count('class="cell"') == 5
    report = json.loads(rep.read_text())
    assert report["status"] == "ok" and report["measures"] == 5
    assert [p["posture_id"] for p in report["postures"]] == ["Natta1P1", "Natta1P2", "Natta1P1", "Natta1P3", "Natta1P1"]


def test_transcribe_is_deterministic(tmp_path, data_dir, capsys):
    outs = []
    for k in range(2):
        xml, svg = tmp_path / f"{k}.xml", tmp_path / f"{k}.svg"
        assert run(["transcribe", "--annotation", data_dir / "natta_1.csv", "--title", "t",
                    "--out-xml", xml, "--out-svg", svg], capsys)[0] == 0
        outs.append((xml.read_bytes(), svg.read_bytes()))
    assert outs[0] == outs[1]


def test_missing_mapping_db_is_exit_1(tmp_path, data_dir, capsys):
    code, _, err = run(["transcribe", "--annotation", data_dir / "natta_1.csv",
                        "--mapping-db", tmp_path / "nope.json"], capsys)
    assert code == 1 and "nope.json" in err


def test_missing_input_is_exit_1(capsys):
    assert run(["transcribe"], capsys)[0] == 1


def test_unknown_posture_is_exit_2(tmp_path, data_dir, capsys):
    ann = tmp_path / "a.csv"
    ann.write_text((data_dir / "natta_1.csv").read_text().replace("Natta1P3", "Ghost"))
    rep = tmp_path / "r.json"
    code, _, err = run(["transcribe", "--annotation", ann, "--report", rep, "--out-xml", tmp_path / "x.xml"], capsys)
    assert code == 2
    assert "record 4 (Ghost, frames 189-218)" in err
    assert json.loads(rep.read_text())["status"] == "invalid"
    assert not (tmp_path / "x.xml").exists()


def test_analyze_sync_kuditta_mettu(data_dir, capsys):
    code, out, _ = run(["analyze-sync", "--audio-events", data_dir / "kuditta_mettu_audio.csv",
                        "--annotation", data_dir / "kuditta_mettu_annotation.csv", "--bar-length", 8], capsys)
    assert code == 0
    report = json.loads(out)
    assert report["summary"]["full_beats"] == 16
    assert report["summary"]["synced_full_beats"] == 16
    assert report["meter"]["bar_length"] == 8
    assert report["meter"]["period_s"] == pytest.approx(1.16, abs=0.01)


def test_analyze_sync_shifted_annotation(tmp_path, data_dir, capsys):
    rows = list(csv.DictReader((data_dir / "kuditta_mettu_annotation.csv").open()))
    for r in rows:
        r["start_frame"] = str(int(r["start_frame"]) + 30)
        r["end_frame"] = str(int(r["end_frame"]) + 30)
    shifted = tmp_path / "shifted.csv"
    with shifted.open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]))
        w.writeheader()
        w.writerows(rows)
    code, out, _ = run(["analyze-sync", "--audio-events", data_dir / "kuditta_mettu_audio.csv",
                        "--annotation", shifted, "--bar-length", 8], capsys)
    assert code == 0
    assert json.loads(out)["summary"]["synced_full_beats"] < 16


def test_analyze_sync_empty_audio(tmp_path, data_dir, capsys):
    audio = tmp_path / "empty.csv"
    audio.write_text("")
    code, out, _ = run(["analyze-sync", "--audio-events", audio,
                        "--annotation", data_dir / "kuditta_mettu_annotation.csv"], capsys)
    assert code == 0
    assert json.loads(out)["beats"] == []


def test_validate_ontology(tmp_path, capsys):
    code, out, _ = run(["validate-ontology"], capsys)
    assert code == 0
    assert json.loads(out)["counts"] == {"sollukattus": 23, "adavus": 58, "postures": 23, "bols": 32}  # 31 bols + stick beat
    broken = tmp_path / "onto"
    shutil.copytree(shipped_ontology_dir(), broken)
    doc = json.loads((broken / "adavus.json").read_text())
    doc["adavus"][0]["sollukattu"] = "Tatta_X"
    (broken / "adavus.json").write_text(json.dumps(doc))
    code, out, err = run(["validate-ontology", "--ontology", broken], capsys)
    assert code == 2 and "Tatta_X" in err


def test_render(tmp_path, data_dir, capsys):
    svg = tmp_path / "g.svg"
    code, out, _ = run(["render", "--xml", data_dir / "natta1p1_golden.xml", "--out-svg", svg], capsys)
    assert code == 0 and out == ""
    assert svg.read_text().count('class="cell"') == 1
    code, out, _ = run(["render", "--xml", data_dir / "natta1p1_golden.xml"], capsys)
    assert code == 0 and out.startswith("<svg")


def test_render_bad_level_is_exit_2(tmp_path, data_dir, capsys):
    bad = tmp_path / "bad.xml"
    bad.write_text((data_dir / "natta1p1_golden.xml").read_text().replace("<level>3</level>", "<level>5</level>", 1))
    assert run(["render", "--xml", bad], capsys)[0] == 2


@pytest.fixture
def skeleton_files(tmp_path):
    classes = ("Natta1P1", "Natta1P2", "Natta1P3")
    t = make_templates(classes, np.random.default_rng(11))
    rng = np.random.default_rng(12)
    train_csv, seq_csv = tmp_path / "train.csv", tmp_path / "seq.csv"
    write_skeleton_csv(train_csv, [(t.sample(c, rng, frame=i), c) for i, c in enumerate(classes * 6)])
    seq = []
    frame = 0
    for c in ("Natta1P1", "Natta1P2", "Natta1P1", "Natta1P3"):
        for _ in range(4):
            seq.append((t.sample(c, rng, frame=frame), None))
            frame += 1
    write_skeleton_csv(seq_csv, seq)
    return train_csv, seq_csv


def test_train_predict_transcribe(tmp_path, skeleton_files, capsys):
    train_csv, seq_csv = skeleton_files
    model = tmp_path / "model.json"
    code, out, _ = run(["train", "--skeleton", train_csv, "--model", model], capsys)
    assert code == 0 and json.loads(out)["classes"] == {"Natta1P1": 6, "Natta1P2": 6, "Natta1P3": 6}
    code, out, _ = run(["predict", "--skeleton", train_csv, "--model", model], capsys)
    assert code == 0 and json.loads(out)["evaluation"]["accuracy"] == 1.0
    code, out, _ = run(["predict", "--skeleton", seq_csv, "--model", model], capsys)
    assert "evaluation" not in json.loads(out)
    rep = tmp_path / "r.json"
    code, _, _ = run(["transcribe", "--skeleton", seq_csv, "--model", model, "--report", rep,
                      "--out-xml", tmp_path / "s.xml"], capsys)
    assert code == 0
    report = json.loads(rep.read_text())
    assert [(p["posture_id"], p["start_frame"], p["end_frame"]) for p in report["postures"]] == [
        ("Natta1P1", 0, 3), ("Natta1P2", 4, 7), ("Natta1P1", 8, 11), ("Natta1P3", 12, 15)]


def test_train_needs_labels(tmp_path, skeleton_files, capsys):
    _, seq_csv = skeleton_files
    assert run(["train", "--skeleton", seq_csv, "--model", tmp_path / "m.json"], capsys)[0] == 2


def test_adavu_check(tmp_path, data_dir, capsys):
    code, _, _ = run(["transcribe", "--annotation", data_dir / "natta_1.csv", "--adavu", "Natta 1"], capsys)
    assert code == 0
    ann = tmp_path / "swapped.csv"
    text = (data_dir / "natta_1.csv").read_text()
    ann.write_text(text.replace("Natta1P2", "TMP").replace("Natta1P3", "Natta1P2").replace("TMP", "Natta1P3"))
    rep = tmp_path / "r.json"
    code, _, err = run(["transcribe", "--annotation", ann, "--adavu", "Natta 1", "--report", rep], capsys)
    assert code == 2 and "posture" in err
    assert len(json.loads(rep.read_text())["validation"]["mismatches"]) == 2
