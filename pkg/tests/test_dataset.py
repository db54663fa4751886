import numpy as np
import pytest

from frnn_emotion.dataset import (DataError, TextRecord, VectorDataset, class_stats, join,
                                  load_task_tsv, load_vectors, merge, parse_label, save_vectors,
                                  write_task_tsv)

HEADER = "ID\tTweet\tAffect Dimension\tIntensity Class\n"


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


def test_load_task_file(tmp_path):
    p = write(tmp_path, "a.txt", HEADER
              + "2018-En-1\tso mad\tanger\t3: high amount of anger can be inferred\n"
              + "2018-En-2\tfine\tanger\t0: no anger can be inferred\n")
    recs = load_task_tsv(p)
    assert [r.id for r in recs] == ["2018-En-1", "2018-En-2"]
    assert [r.label for r in recs] == [3, 0]
    assert recs[0].emotion == "anger"


def test_headerless_and_bare_labels(tmp_path):
    p = write(tmp_path, "a.txt", "x1\thi\tjoy\t2\nx2\tyo\tjoy\t1\n")
    assert [r.label for r in load_task_tsv(p)] == [2, 1]


def test_unlabeled_test_file(tmp_path):
    p = write(tmp_path, "t.txt", HEADER + "x1\thi\tfear\tNONE\n")
    assert load_task_tsv(p, labeled=False)[0].label is None
    with pytest.raises(DataError, match="line 2"):
        load_task_tsv(p)


@pytest.mark.parametrize("body, match", [
    ("x1\thi\tanger\n", "malformed row at line 2"),
    ("x1\thi\tanger\t7: whatever\n", "malformed row at line 2"),
    ("x1\thi\tdisgust\t1\n", "unknown affect dimension"),
    ("x1\thi\tanger\t1\nx1\tho\tanger\t2\n", "duplicate id"),
])
def test_task_file_errors(tmp_path, body, match):
    with pytest.raises(DataError, match=match):
        load_task_tsv(write(tmp_path, "bad.txt", HEADER + body))


def test_parse_label():
    assert parse_label("2: moderate amount of joy can be inferred") == 2
    assert parse_label("0") == 0
    with pytest.raises(ValueError):
        parse_label("four")


def test_task_round_trip(tmp_path):
    recs = [TextRecord("a", "t one", "sadness", 1), TextRecord("b", "t two", "sadness", None)]
    p = tmp_path / "o.txt"
    write_task_tsv(p, recs, header=HEADER.rstrip("\n").split("\t"))
    assert load_task_tsv(p, labeled=False) == recs


def test_vectors_round_trip(tmp_path):
    vecs = {"a": np.array([0.1, -2.5, 1e-17]), "b": np.array([1 / 3, 2.0, 3.0])}
    p = tmp_path / "v.vec"
    save_vectors(p, 3, vecs)
    dim, back = load_vectors(p)
    assert dim == 3
    for k in vecs:
        np.testing.assert_array_equal(back[k], vecs[k])


@pytest.mark.parametrize("body, match", [
    ("dim 2\na\t1 2 3\n", "expected 2 floats"),
    ("dim 2\na\t1 2\na\t1 2\n", "duplicate id"),
    ("dim 2\na\t1 x\n", "non-numeric"),
    ("dims 2\n", "dim <D>"),
])
def test_vector_file_errors(tmp_path, body, match):
    with pytest.raises(DataError, match=match):
        load_vectors(write(tmp_path, "v.vec", body))


def test_join():
    recs = [TextRecord("a", "", "joy", 1), TextRecord("b", "", "joy", None)]
    ds = join(recs, {"b": np.ones(2), "a": np.array([1.0, 0.0])})
    assert ds.ids == ["a", "b"]
    assert ds.labels.tolist() == [1, -1]
    with pytest.raises(DataError, match="no vector for id a"):
        join(recs, {"b": np.ones(2)})
    with pytest.raises(DataError, match="zero vector"):
        join(recs, {"a": np.zeros(2), "b": np.ones(2)})


def test_class_stats_and_merge():
    a = VectorDataset(2, ["a", "b", "c"], np.eye(3, 2) + 1, [0, 0, 1])
    b = VectorDataset(2, ["d", "e"], np.ones((2, 2)), [2, 3])
    st = class_stats(merge(a, b))
    assert st.counts == {0: 2, 1: 1, 2: 1, 3: 1}
    assert st.ir == 2.0 and st.smallest_class == 1 and st.total == 5
    with pytest.raises(DataError, match="duplicate id"):
        merge(a, a)
    with pytest.raises(DataError, match="dimension"):
        merge(a, VectorDataset(3, ["z"], np.ones((1, 3)), [0]))


def test_dataset_shape_checked():
    with pytest.raises(DataError):
        VectorDataset(3, ["a"], np.ones((1, 2)), [0])
    ds = VectorDataset(2, ["a", "b"], [[1, 2], [3, 4]], [0, 1])
    assert [i.label for i in ds] == [0, 1]
    assert VectorDataset.from_instances(ds.instances).ids == ["a", "b"]
    assert ds.subset([1]).ids == ["b"]
