import csv
import io
import json

import numpy as np
import pytest

from stemvine.archio import serialize_network
from stemvine.bounds import total_R
from stemvine.cli import main
from stemvine.evaluate import LabeledDataset, write_dataset
from stemvine.graph import IDENTITY, NormProfile, chain_network
from stemvine.io import save_weights


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_template_then_validate(tmp_path, capsys):
    path = tmp_path / "r.json"
    assert run(capsys, "template", "resnet34", "--out", str(path))[0] == 0
    assert run(capsys, "validate", str(path))[0] == 0
    assert json.loads(path.read_text())["version"] == "stemvine/1"
    assert not list(tmp_path.glob("*.tmp"))


def test_validate_reports_violations(tmp_path, capsys):
    net = chain_network([2, 3], [NormProfile(1.0, 1.0)])
    doc = json.loads(serialize_network(net))
    doc["vines"] = [{"u": 3, "v": 1, "copy": 1, "body": "identity"}]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "validate", str(path))
    assert code == 1 and "VineOrderViolation" in out


def test_usage_errors_exit_2(capsys):
    assert run(capsys, "bogus")[0] == 2
    assert run(capsys, "certify", "--arch", "x")[0] == 2
    assert run(capsys, "validate", "/nonexistent/arch.json")[0] == 2


def zero_b_setup(tmp_path):
    net = chain_network([2, 3, 2], [NormProfile(2.0, 0.0)] * 2, head=IDENTITY)
    rng = np.random.default_rng(0)
    w = {"A1": rng.standard_normal((3, 2)), "A2": rng.standard_normal((2, 3))}
    net = net.map_profiles(lambda p: p)
    (tmp_path / "arch.json").write_text(serialize_network(net.with_profiles(
        {k: NormProfile(float(np.linalg.norm(v, 2)) + 1, 0.0) for k, v in w.items()})))
    save_weights(tmp_path / "w", w, w)
    write_dataset(tmp_path / "d.svd", LabeledDataset(rng.standard_normal((10, 2)), [1, 2] * 5, 2))


def test_certify_zero_b_gives_R_zero(tmp_path, capsys):
    zero_b_setup(tmp_path)
    code, out, _ = run(capsys, "certify", "--arch", str(tmp_path / "arch.json"), "--weights", str(tmp_path / "w"),
                       "--data", str(tmp_path / "d.svd"), "--out", "-")
    assert code == 0
    assert json.loads(out)["R"] == 0.0


def test_certify_csv_to_file(tmp_path, capsys):
    zero_b_setup(tmp_path)
    dest = tmp_path / "terms.csv"
    code, _, _ = run(capsys, "certify", "--arch", str(tmp_path / "arch.json"), "--weights", str(tmp_path / "w"),
                     "--data", str(tmp_path / "d.svd"), "--format", "csv", "--out", str(dest))
    assert code == 0
    assert [r["slot"] for r in csv.DictReader(dest.open())] == ["A1", "A2"]


def test_certify_refuses_violated_profile(tmp_path, capsys):
    zero_b_setup(tmp_path)
    save_weights(tmp_path / "w", {"A1": 100 * np.ones((3, 2)), "A2": np.ones((2, 3))})
    code, _, err = run(capsys, "certify", "--arch", str(tmp_path / "arch.json"), "--weights", str(tmp_path / "w"),
                       "--data", str(tmp_path / "d.svd"))
    assert code == 1 and "exceeds" in err


def test_sweep_norms_b_scaling(tmp_path, capsys):
    net = chain_network([3, 4, 2], [NormProfile(1.5, 0.5), NormProfile(0.8, 1.2)])
    arch = tmp_path / "a.json"
    arch.write_text(serialize_network(net))
    code, out, _ = run(capsys, "sweep-norms", "--arch", str(arch), "--factors", "1,2", "--input-norm", "3")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    R1, R2 = float(rows[0]["R"]), float(rows[1]["R"])
    assert R1 == total_R(net, 3.0)
    assert R2 == pytest.approx(4 * R1, rel=1e-14)


def test_sweep_placement_and_oracle_cover(capsys):
    code, out, _ = run(capsys, "sweep-placement", "--count", "10")
    assert code == 0 and out.count("PASS") == 10
    code, out, _ = run(capsys, "oracle-cover")
    assert code == 0 and "FAIL" not in out


def test_oracle_rademacher_small(capsys):
    code, out, _ = run(capsys, "oracle-rademacher", "--trials", "200")
    assert code == 0 and "FAIL" not in out


def test_train_demo_round_trip(tmp_path, capsys):
    code, out, _ = run(capsys, "train-demo", "--epochs", "20", "--n-test", "200", "--save-dir", str(tmp_path))
    assert code == 0
    code, again, _ = run(capsys, "certify", "--arch", str(tmp_path / "arch.json"), "--weights",
                         str(tmp_path / "weights"), "--data", str(tmp_path / "train.svd"))
    assert code == 0 and again == out
