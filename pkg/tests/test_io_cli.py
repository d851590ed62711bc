import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from relph import io as rio
from relph.cli import main
from relph.geometry import LabeledPointCloud
from relph.persistence import PersistenceDiagram

finite = st.floats(-1e6, 1e6, allow_nan=False)


@given(st.lists(st.tuples(finite, finite, st.sampled_from(["T", "V", "M1"])), min_size=1, max_size=20,
                unique_by=lambda r: (r[0], r[1])))
def test_cloud_csv_roundtrip_bit_exact(rows):
    pts = np.array([(x, y) for x, y, _ in rows])
    labels = tuple(l for *_, l in rows)
    om = np.where(np.array(labels) == "M1", 0.25, np.nan)
    c = LabeledPointCloud(pts, labels, om)
    text = rio.cloud_to_csv(c)
    back = rio.parse_cloud(text)
    assert np.array_equal(back.points, c.points) and back.labels == labels
    assert rio.cloud_to_csv(back) == text
    assert "\r" not in text


def test_parse_cloud_errors():
    with pytest.raises(rio.FormatError):
        rio.parse_cloud("a,b\n1,2\n")
    with pytest.raises(rio.FormatError):
        rio.parse_cloud("x,y,label,omega\n1,2,T\n")
    with pytest.raises(rio.FormatError):
        rio.parse_cloud("x,y,label,omega\n1,oops,T,\n")


def test_features_roundtrip(tmp_path):
    X = np.array([[0.1, 1e-300], [np.pi, -2.5]])
    rio.write_features(tmp_path / "f.csv", ["a", "b"], ["u", "v"], X)
    ids, names, Y = rio.read_features(tmp_path / "f.csv")
    assert ids == ["a", "b"] and names == ["u", "v"] and np.array_equal(X, Y)


def test_json_sorted_and_diagrams(tmp_path):
    text = rio.dumps_json({"b": 1, "a": {"d": 2, "c": 3}})
    assert text.index('"a"') < text.index('"b"') and text.index('"c"') < text.index('"d"')
    assert json.loads(rio.dumps_json({"a": np.float64(np.inf)}))["a"] == "inf"
    d = {"x": PersistenceDiagram(1, [(0.0, 1.5), (0.2, np.inf)])}
    rio.write_diagrams(tmp_path / "d.json", d)
    back = rio.read_diagrams(tmp_path / "d.json")
    assert back["x"] == d["x"]


def test_atomic_write_leaves_no_temp(tmp_path):
    rio.atomic_write(tmp_path / "sub" / "a.txt", "hi\n")
    assert [p.name for p in (tmp_path / "sub").iterdir()] == ["a.txt"]


# -- CLI -----------------------------------------------------------------------------------------

@pytest.fixture(scope="module")
def clouds(tmp_path_factory):
    out = tmp_path_factory.mktemp("clouds")
    assert main(["generate", "--mode", "regime", "--regime", "escape", "--n", "3", "--out", str(out)]) == 0
    return out


def test_generate_grid_count(tmp_path):
    assert main(["generate", "--out", str(tmp_path), "--seeds", "20"]) == 0
    assert len(list(tmp_path.glob("*.csv"))) == 1620
    m = rio.read_json(tmp_path / "manifest.json")
    assert len(m["clouds"]) == 1620 and {"chi", "c_half", "seed", "regime"} <= set(m["clouds"][0])


def test_generate_single_and_relabel(tmp_path):
    assert main(["generate", "--mode", "regime", "--regime", "equilibrium", "--out", str(tmp_path / "a")]) == 0
    assert len(list((tmp_path / "a").glob("*.csv"))) == 1
    assert main(["generate", "--mode", "regime", "--regime", "equilibrium", "--relabel", "0.5",
                 "--out", str(tmp_path / "b")]) == 0
    a = rio.read_cloud(next((tmp_path / "a").glob("*.csv")))
    b = rio.read_cloud(next((tmp_path / "b").glob("*.csv")))
    assert a.labels != b.labels and np.array_equal(a.points, b.points)


def test_diagrams_dowker_pair(clouds, tmp_path):
    assert main(["diagrams", str(clouds), "--family", "dowker", "--pair", "T", "V", "--out", str(tmp_path)]) == 0
    files = sorted(tmp_path.glob("*.diagrams.json"))
    assert len(files) == 3
    assert all(sorted(rio.read_json(f)) == ["D_T_V_pd0", "D_T_V_pd1"] for f in files)


def test_diagrams_witness_v2(clouds, tmp_path):
    assert main(["diagrams", str(clouds), "--family", "witness", "--version", "2", "--out", str(tmp_path),
                 "--svg"]) == 0
    d = rio.read_json(next(tmp_path.glob("*.diagrams.json")))
    assert len(d) == 8
    assert len(list(tmp_path.glob("*.svg"))) == 3


def test_malformed_row_keep_going(clouds, tmp_path):
    src = tmp_path / "in"
    src.mkdir()
    for f in clouds.glob("*.csv"):
        (src / f.name).write_text(f.read_text())
    (src / "broken.csv").write_text("x,y,label,omega\n1,2,T\n")
    out = tmp_path / "out"
    assert main(["diagrams", str(src), "--family", "dowker", "--pair", "T", "V", "--out", str(out)]) == 0
    errs = rio.read_json(out / "errors.json")
    assert len(errs) == 1 and errs[0]["file"].endswith("broken.csv")
    assert len(list(out.glob("*.diagrams.json"))) == 3
    assert main(["diagrams", str(src), "--family", "dowker", "--pair", "T", "V", "--out", str(out),
                 "--fail-fast"]) == 1


def test_config_errors(tmp_path, capsys):
    assert main(["diagrams", str(tmp_path / "missing"), "--family", "vr", "--out", str(tmp_path)]) == 1
    assert main(["generate", "--out", str(tmp_path), "--relabel", "2"]) == 1
    assert main(["diagrams", "--family", "nope", "--out", str(tmp_path), "x"]) == 1


def test_features_column_counts(clouds, tmp_path):
    for kind, extra, ncol in [("witness", [], 12), ("witness", ["--version", "2"], 24),
                              ("simple", [], 6), ("dowker", [], 2400)]:
        out = tmp_path / f"{kind}{len(extra)}.csv"
        assert main(["features", str(clouds), "--kind", kind, "--out", str(out), *extra]) == 0
        header = out.read_text().splitlines()[0].split(",")
        assert header[0] == "id" and len(header) == ncol + 1


def test_vr_features_need_cap(clouds, tmp_path):
    assert main(["features", str(clouds), "--kind", "vr", "--out", str(tmp_path / "v.csv")]) == 1
    assert main(["features", str(clouds), "--kind", "vr", "--max-value", "8", "--out", str(tmp_path / "v.csv")]) == 0
    assert len((tmp_path / "v.csv").read_text().splitlines()[0].split(",")) == 1601


def test_seed_env_override(tmp_path, monkeypatch):
    monkeypatch.setenv("RELPH_SEED", "7")
    assert main(["generate", "--mode", "phenotype", "--n", "1", "--out", str(tmp_path / "a")]) == 0
    monkeypatch.delenv("RELPH_SEED")
    assert main(["generate", "--mode", "phenotype", "--n", "1", "--seed", "7", "--out", str(tmp_path / "b")]) == 0
    assert (tmp_path / "a" / "phenotype_s0007.csv").read_bytes() == (tmp_path / "b" / "phenotype_s0007.csv").read_bytes()


def test_idempotent_outputs(clouds, tmp_path):
    def run(out):
        main(["features", str(clouds), "--kind", "witness", "--out", str(out / "w.csv")])
        main(["diagrams", str(clouds), "--family", "witness", "--out", str(out), "--svg"])
        return {p.name: p.read_bytes() for p in sorted(out.iterdir())}
    assert run(tmp_path / "r1") == run(tmp_path / "r2")


def test_dist_and_image(clouds, tmp_path, capsys):
    main(["diagrams", str(clouds), "--family", "dowker", "--pair", "T", "V", "--out", str(tmp_path)])
    a, b = sorted(tmp_path.glob("*.diagrams.json"))[:2]
    assert main(["dist", str(a), str(b), "--key", "D_T_V_pd0", "--out", str(tmp_path / "d.json")]) == 0
    d = rio.read_json(tmp_path / "d.json")["distance"]
    assert d >= 0
    assert main(["dist", str(a), str(a), "--key", "D_T_V_pd0"]) == 0
    assert capsys.readouterr().out.strip().splitlines()[-1] == "0.0"
    assert main(["dist", str(a), str(b), "--key", "nope"]) == 1
    assert main(["image", str(a), "--key", "D_T_V_pd1", "--out", str(tmp_path / "i.csv")]) == 0
    rows = (tmp_path / "i.csv").read_text().splitlines()
    assert len(rows) == 20 and len(rows[0].split(",")) == 20


def test_cluster_and_classify(tmp_path):
    g = tmp_path / "g"
    assert main(["generate", "--out", str(g), "--seeds", "2"]) == 0
    assert main(["features", str(g), "--kind", "witness", "--empty", "saturate", "--out", str(tmp_path / "w.csv")]) == 0
    assert main(["cluster", str(tmp_path / "w.csv"), "--manifest", str(g / "manifest.json"),
                 "--out", str(tmp_path / "c.json"), "--svg-dir", str(tmp_path / "svg")]) == 0
    res = rio.read_json(tmp_path / "c.json")["clusterings"]
    assert set(res) == {"3", "4"} and len(res["3"]["cells"]) == 81
    assert len(list((tmp_path / "svg").glob("*.svg"))) == 4

    p = tmp_path / "p"
    assert main(["generate", "--mode", "phenotype", "--n", "40", "--out", str(p)]) == 0
    assert main(["features", str(p), "--kind", "simple", "--out", str(tmp_path / "s.csv")]) == 0
    assert main(["classify", str(tmp_path / "s.csv"), "--labels", str(p / "manifest.json"), "--splits", "3",
                 "--out", str(tmp_path / "r.json"), "--svg", str(tmp_path / "box.svg")]) == 0
    r = rio.read_json(tmp_path / "r.json")["models"]["s"]
    assert len(r["accuracies"]) == 3 and (tmp_path / "box.svg").exists()
