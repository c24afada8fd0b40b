"""Observation matrices and CSV ingestion."""

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, NonNumericCell, ParseError, RaggedRows


@dataclass(frozen=True)
class DataMatrix:
    """Immutable N x d observations with optional true labels."""

    x: np.ndarray
    labels: np.ndarray = None
    sample_ids: tuple = None
    feature_names: tuple = None
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        x = np.array(self.x, dtype=float, copy=True)
        if x.ndim != 2:
            raise InputError("data must be a 2-d matrix, got shape %s" % (x.shape,))
        if not np.all(np.isfinite(x)):
            raise InputError("data contains NaN or infinite values")
        x.setflags(write=False)
        object.__setattr__(self, "x", x)
        if self.labels is not None:
            labels = np.asarray(self.labels)
            if labels.shape != (x.shape[0],):
                raise InputError("labels length %d does not match %d rows"
                                 % (labels.size, x.shape[0]))
            labels = labels.copy()
            labels.setflags(write=False)
            object.__setattr__(self, "labels", labels)
        if self.sample_ids is None:
            object.__setattr__(self, "sample_ids", tuple(str(i) for i in range(x.shape[0])))

    @property
    def n(self):
        return self.x.shape[0]

    @property
    def d(self):
        return self.x.shape[1]

    def standardized(self):
        """Feature-wise z-scores; constant features are centred only."""
        mean = self.x.mean(axis=0)
        sd = self.x.std(axis=0)
        sd[sd == 0] = 1.0
        return DataMatrix((self.x - mean) / sd, self.labels, self.sample_ids,
                          self.feature_names, dict(self.meta, standardized=True))


def standardize(x):
    x = np.asarray(x, dtype=float)
    sd = x.std(axis=0)
    sd[sd == 0] = 1.0
    return (x - x.mean(axis=0)) / sd


def _parse_cell(text, row, col):
    try:
        value = float(text)
    except ValueError:
        raise NonNumericCell("non-numeric cell %r at row %d, column %d" % (text, row, col),
                             row=row, col=col) from None
    if not math.isfinite(value):
        raise NonNumericCell("non-finite cell %r at row %d, column %d" % (text, row, col),
                             row=row, col=col)
    return value


def ingest_csv(path, has_header=True, label_column=None, id_column=None, standardize=False,
               delimiter=None):
    """Read a rectangular numeric table: rows are samples, columns features.

    ``label_column`` / ``id_column`` name (or, without a header, index)
    columns pulled out of the feature matrix. Rows and columns in error
    messages are 1-based file positions.
    """
    with open(path, newline="") as fh:
        sample = fh.read(4096)
        fh.seek(0)
        if delimiter is None:
            delimiter = "\t" if sample.count("\t") > sample.count(",") else ","
        rows = [r for r in csv.reader(fh, delimiter=delimiter) if r and any(c.strip() for c in r)]
    if not rows:
        raise ParseError("%s is empty" % path)
    header = None
    if has_header:
        header = [h.strip() for h in rows[0]]
        rows = rows[1:]
        start = 2
    else:
        start = 1
    width = len(header) if header is not None else len(rows[0])
    for i, r in enumerate(rows):
        if len(r) != width:
            raise RaggedRows("row %d has %d cells, expected %d" % (i + start, len(r), width),
                             row=i + start)

    def resolve(name):
        if name is None:
            return None
        if header is not None and name in header:
            return header.index(name)
        try:
            idx = int(name)
        except (TypeError, ValueError):
            raise InputError("column %r not found" % (name,)) from None
        if not 0 <= idx < width:
            raise InputError("column index %d out of range" % idx)
        return idx

    label_idx = resolve(label_column)
    id_idx = resolve(id_column)
    skip = {i for i in (label_idx, id_idx) if i is not None}
    keep = [j for j in range(width) if j not in skip]
    x = np.empty((len(rows), len(keep)))
    for i, r in enumerate(rows):
        for jj, j in enumerate(keep):
            x[i, jj] = _parse_cell(r[j].strip(), i + start, j + 1)
    labels = None
    if label_idx is not None:
        labels = np.array([r[label_idx].strip() for r in rows])
    ids = tuple(r[id_idx].strip() for r in rows) if id_idx is not None else None
    names = tuple(header[j] for j in keep) if header is not None else None
    data = DataMatrix(x, labels, ids, names, {"source": str(path)})
    return data.standardized() if standardize else data


def write_matrix_csv(path, x, header=None):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if header is not None:
            w.writerow(header)
        for row in np.asarray(x):
            w.writerow([repr_float(v) for v in row])


def repr_float(v):
    """17 significant digits: round-trips every float64."""
    return "%.17g" % float(v)
