"""Task files, vector files and labeled vector datasets.

Task files are the SemEval EI-oc tab-separated files (``ID``, ``Tweet``,
``Affect Dimension``, ``Intensity Class``). Vector files are plain text::

    dim 3
    2018-En-00866<TAB>0.12 -0.5 1.0
    ...

one vector per tweet id.
"""
from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

EMOTIONS = ("anger", "joy", "sadness", "fear")
LABELS = (0, 1, 2, 3)
N_CLASSES = len(LABELS)

_LABEL_RE = re.compile(r"^\s*(\d+)\s*(?::|$)")


class DataError(ValueError):
    """Malformed or inconsistent input data."""


@dataclass(frozen=True)
class TextRecord:
    id: str
    text: str
    emotion: str
    label: int | None


@dataclass(frozen=True)
class LabeledInstance:
    id: str
    vector: np.ndarray
    label: int


@dataclass
class VectorDataset:
    """Ordered instances sharing one dimension.

    Vectors are stored as a single ``(n, dimension)`` float64 matrix.
    """

    dimension: int
    ids: list[str] = field(default_factory=list)
    vectors: np.ndarray | None = None
    labels: np.ndarray | None = None

    def __post_init__(self):
        if self.vectors is None:
            self.vectors = np.zeros((0, self.dimension))
        if self.labels is None:
            self.labels = np.zeros(0, dtype=np.int64)
        self.vectors = np.asarray(self.vectors, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.vectors.shape != (len(self.ids), self.dimension):
            raise DataError(
                f"vector matrix shape {self.vectors.shape} does not match "
                f"{len(self.ids)} ids x dimension {self.dimension}"
            )
        if self.labels.shape != (len(self.ids),):
            raise DataError("one label per instance required")

    def __len__(self):
        return len(self.ids)

    def __iter__(self):
        for i, id_ in enumerate(self.ids):
            yield LabeledInstance(id_, self.vectors[i], int(self.labels[i]))

    @property
    def instances(self) -> list[LabeledInstance]:
        return list(self)

    @classmethod
    def from_instances(cls, instances: Sequence[LabeledInstance], dimension: int | None = None):
        if dimension is None:
            if not instances:
                raise DataError("dimension required for an empty dataset")
            dimension = len(instances[0].vector)
        vectors = np.array([inst.vector for inst in instances], dtype=np.float64).reshape(
            len(instances), dimension
        )
        return cls(dimension, [inst.id for inst in instances], vectors,
                   np.array([inst.label for inst in instances], dtype=np.int64))

    def subset(self, index) -> "VectorDataset":
        index = np.asarray(index, dtype=np.int64)
        return VectorDataset(self.dimension, [self.ids[i] for i in index],
                             self.vectors[index], self.labels[index])


@dataclass(frozen=True)
class ClassStats:
    counts: dict[int, int]
    ir: float
    smallest_class: int
    total: int


def parse_label(field_text: str) -> int:
    """Leading integer of an intensity-class field, e.g. ``"2: moderate ..."`` -> 2."""
    m = _LABEL_RE.match(field_text)
    if not m:
        raise ValueError(f"unparsable label {field_text!r}")
    label = int(m.group(1))
    if label not in LABELS:
        raise ValueError(f"label {label} outside 0..3")
    return label


def _is_unlabeled(field_text: str) -> bool:
    return field_text.strip().upper() == "NONE"


def read_task_rows(path) -> tuple[list[str] | None, list[tuple[int, list[str]]]]:
    """Raw rows of a task file as ``(header, [(line number, columns), ...])``.

    A first row whose fourth column has no leading integer is the header.
    """
    with open(path, encoding="utf-8", newline="") as fh:
        lines = fh.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    header, rows = None, []
    for lineno, line in enumerate(lines, start=1):
        cols = line.rstrip("\r").split("\t")
        if len(cols) != 4:
            raise DataError(f"{path}: malformed row at line {lineno}: expected 4 columns, got {len(cols)}")
        if lineno == 1 and not _LABEL_RE.match(cols[3]) and not _is_unlabeled(cols[3]):
            header = cols
            continue
        rows.append((lineno, cols))
    return header, rows


def load_task_tsv(path, labeled: bool = True) -> list[TextRecord]:
    """Read a task file in file order.

    With ``labeled=False`` an intensity field of ``NONE`` yields ``label=None``.
    """
    records = []
    seen = set()
    for lineno, (id_, text, emotion, intensity) in read_task_rows(path)[1]:
        emotion = emotion.strip().lower()
        if emotion not in EMOTIONS:
            raise DataError(f"{path}: unknown affect dimension {emotion!r} at line {lineno}")
        if not id_:
            raise DataError(f"{path}: empty id at line {lineno}")
        if id_ in seen:
            raise DataError(f"{path}: duplicate id {id_} at line {lineno}")
        seen.add(id_)
        if not labeled and _is_unlabeled(intensity):
            label = None
        else:
            try:
                label = parse_label(intensity)
            except ValueError as exc:
                raise DataError(f"{path}: malformed row at line {lineno}: {exc}") from None
        records.append(TextRecord(id_, text, emotion, label))
    return records


def write_task_tsv(path, records: Iterable[TextRecord], header: Sequence[str] | None = None,
                   label_fields: Mapping[str, str] | None = None):
    """Write records back in task format. ``label_fields`` maps id to the
    original intensity-class text so prose labels survive a round trip."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if header:
            fh.write("\t".join(header) + "\n")
        for rec in records:
            if label_fields and rec.id in label_fields:
                lab = label_fields[rec.id]
            else:
                lab = "NONE" if rec.label is None else str(rec.label)
            fh.write(f"{rec.id}\t{rec.text}\t{rec.emotion}\t{lab}\n")


def load_vectors(path) -> tuple[int, dict[str, np.ndarray]]:
    vectors: dict[str, np.ndarray] = {}
    with open(path, encoding="utf-8") as fh:
        head = fh.readline().split()
        if len(head) != 2 or head[0] != "dim":
            raise DataError(f"{path}: first line must be 'dim <D>'")
        try:
            dim = int(head[1])
        except ValueError:
            raise DataError(f"{path}: bad dimension {head[1]!r}") from None
        if dim < 1:
            raise DataError(f"{path}: dimension must be positive")
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\r\n")
            if not line.strip():
                continue
            id_, sep, rest = line.partition("\t")
            if not sep or not id_:
                raise DataError(f"{path}: line {lineno}: expected 'id<TAB>floats'")
            tokens = rest.split()
            if len(tokens) != dim:
                raise DataError(f"{path}: line {lineno}: expected {dim} floats, got {len(tokens)}")
            try:
                vec = np.array([float(t) for t in tokens], dtype=np.float64)
            except ValueError as exc:
                raise DataError(f"{path}: line {lineno}: non-numeric token ({exc})") from None
            if id_ in vectors:
                raise DataError(f"{path}: line {lineno}: duplicate id {id_}")
            vectors[id_] = vec
    return dim, vectors


def save_vectors(path, dimension: int, vectors: Mapping[str, np.ndarray]):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"dim {dimension}\n")
        for id_, vec in vectors.items():
            if len(vec) != dimension:
                raise DataError(f"vector {id_} has length {len(vec)}, expected {dimension}")
            fh.write(id_ + "\t" + " ".join(f"{float(x):.17g}" for x in vec) + "\n")


def join(records: Sequence[TextRecord], vectors: Mapping[str, np.ndarray],
         dimension: int | None = None) -> VectorDataset:
    """Attach a vector to each record, keeping record order."""
    if dimension is None:
        if not vectors:
            raise DataError("no vectors to join")
        dimension = len(next(iter(vectors.values())))
    missing = [r.id for r in records if r.id not in vectors]
    if missing:
        shown = ", ".join(missing[:5]) + (" ..." if len(missing) > 5 else "")
        raise DataError(f"no vector for id {shown}")
    mat = np.empty((len(records), dimension), dtype=np.float64)
    for i, rec in enumerate(records):
        vec = np.asarray(vectors[rec.id], dtype=np.float64)
        if vec.shape != (dimension,):
            raise DataError(f"vector for id {rec.id} has length {vec.size}, expected {dimension}")
        if not np.any(vec):
            raise DataError(f"zero vector for id {rec.id}")
        mat[i] = vec
    labels = np.array([-1 if r.label is None else r.label for r in records], dtype=np.int64)
    return VectorDataset(dimension, [r.id for r in records], mat, labels)


def class_stats(data) -> ClassStats:
    """Class counts and imbalance ratio of a dataset or a list of records."""
    if isinstance(data, VectorDataset):
        labels = data.labels.tolist()
    else:
        labels = [r.label for r in data]
    if not labels:
        raise DataError("class_stats of an empty dataset")
    tally = Counter(labels)
    counts = {lab: tally.get(lab, 0) for lab in LABELS}
    present = [c for c in counts.values() if c > 0]
    smallest = min(present)
    return ClassStats(counts, max(present) / smallest, smallest, sum(counts.values()))


def merge(a: VectorDataset, b: VectorDataset) -> VectorDataset:
    if a.dimension != b.dimension:
        raise DataError(f"dimension mismatch: {a.dimension} vs {b.dimension}")
    shared = set(a.ids).intersection(b.ids)
    if shared:
        raise DataError(f"duplicate id {sorted(shared)[0]}")
    return VectorDataset(a.dimension, a.ids + b.ids,
                         np.vstack([a.vectors, b.vectors]),
                         np.concatenate([a.labels, b.labels]))
