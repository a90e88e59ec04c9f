"""Dataset loading, normalization, and fold planning.

Two on-disk formats are supported:

* Mulan-style multi-label data: an ARFF file holding all attributes plus
  an XML file naming which attributes are labels.  Attributes named in
  the XML become label columns (in XML order); everything else becomes a
  feature column in ARFF order.  Nominal feature attributes are one-hot
  encoded, except plain {0,1} ones which stay single numeric columns.
  Missing values ("?") load as NaN and are imputed later from
  training-fold column means, so no test information leaks in.
* Headerless numeric CSV for single-label data, with a configurable
  label column whose values are re-indexed to 0..C-1 in first-appearance
  order.
"""

from __future__ import annotations

import csv
import warnings
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError, DataError, ParseError, SchemaError, ShapeError
from .linalg import SeededRng, as_matrix

MULAN_XMLNS = "http://mulan.sourceforge.net/labels"

_NUMERIC_TYPES = {"numeric", "real", "integer"}


@dataclass
class MultiLabelDataset:
    """N x d features paired with an N x C binary label matrix.

    Feature entries may be NaN (missing value sentinel); label entries
    are exactly 0.0 or 1.0.
    """

    features: np.ndarray
    labels: np.ndarray
    feature_names: list[str]
    label_names: list[str]

    def __post_init__(self) -> None:
        self.features = as_matrix(self.features)
        self.labels = as_matrix(self.labels)
        if self.features.shape[0] != self.labels.shape[0]:
            raise ShapeError(
                f"feature rows {self.features.shape[0]} != label rows {self.labels.shape[0]}"
            )
        if len(self.feature_names) != self.features.shape[1]:
            raise ShapeError("feature_names length does not match feature columns")
        if len(self.label_names) != self.labels.shape[1]:
            raise ShapeError("label_names length does not match label columns")
        if np.any((self.labels != 0.0) & (self.labels != 1.0)):
            raise DataError("label entries must be exactly 0 or 1")

    @property
    def n_instances(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    @property
    def n_labels(self) -> int:
        return self.labels.shape[1]

    def subset(self, indices) -> "MultiLabelDataset":
        idx = np.asarray(indices, dtype=np.int64)
        return MultiLabelDataset(
            self.features[idx].copy(),
            self.labels[idx].copy(),
            list(self.feature_names),
            list(self.label_names),
        )


@dataclass
class SingleLabelDataset:
    """N x d features with one class index per instance.

    ``class_names[i]`` records which original label value was re-indexed
    to class i (first-appearance order).
    """

    features: np.ndarray
    class_index: np.ndarray
    class_names: list[str]

    def __post_init__(self) -> None:
        self.features = as_matrix(self.features)
        self.class_index = np.asarray(self.class_index, dtype=np.int64)
        if self.class_index.ndim != 1 or len(self.class_index) != self.features.shape[0]:
            raise ShapeError("class_index length does not match feature rows")
        c = len(self.class_names)
        if self.class_index.size and (
            self.class_index.min() < 0 or self.class_index.max() >= c
        ):
            raise DataError(f"class indices must lie in [0, {c})")

    @property
    def n_instances(self) -> int:
        return self.features.shape[0]

    @property
    def n_classes(self) -> int:
        return len(self.class_names)

    def subset(self, indices) -> "SingleLabelDataset":
        idx = np.asarray(indices, dtype=np.int64)
        return SingleLabelDataset(
            self.features[idx].copy(), self.class_index[idx].copy(), list(self.class_names)
        )


def one_hot(data: SingleLabelDataset) -> MultiLabelDataset:
    """Encode class indices as one-hot label rows (shared training path)."""
    labels = np.zeros((data.n_instances, data.n_classes), dtype=np.float64)
    labels[np.arange(data.n_instances), data.class_index] = 1.0
    names = [f"f{j}" for j in range(data.features.shape[1])]
    return MultiLabelDataset(data.features.copy(), labels, names, list(data.class_names))


@dataclass
class NormalizationParams:
    """Per-column min/max fit on training rows only.

    ``mean`` holds training-column means used to impute missing (NaN)
    cells before scaling; ``constant`` flags columns with max == min,
    which map to 0.5.
    """

    minimum: np.ndarray
    maximum: np.ndarray
    mean: np.ndarray
    constant: np.ndarray

    def __post_init__(self) -> None:
        self.minimum = np.asarray(self.minimum, dtype=np.float64)
        self.maximum = np.asarray(self.maximum, dtype=np.float64)
        self.mean = np.asarray(self.mean, dtype=np.float64)
        self.constant = np.asarray(self.constant, dtype=bool)
        if np.any(self.maximum < self.minimum):
            raise DataError("normalization max must be >= min per feature")

    @property
    def width(self) -> int:
        return self.minimum.shape[0]


def fit_normalizer(train_features: np.ndarray) -> NormalizationParams:
    """Per-column min, max, and mean over the training rows, ignoring NaN."""
    x = as_matrix(train_features)
    if x.shape[0] < 1:
        raise DataError("cannot fit a normalizer on zero rows")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        mn = np.nanmin(x, axis=0)
        mx = np.nanmax(x, axis=0)
        mean = np.nanmean(x, axis=0)
    # All-NaN columns carry no information; pin them to the constant path.
    dead = ~np.isfinite(mn)
    mn[dead] = 0.0
    mx[dead] = 0.0
    mean[dead] = 0.0
    return NormalizationParams(mn, mx, mean, mx == mn)


def apply_normalizer(features: np.ndarray, params: NormalizationParams) -> np.ndarray:
    """Scale to [0, 1] with clamping; NaN cells imputed from training means."""
    x = as_matrix(features).copy()
    if x.shape[1] != params.width:
        raise ShapeError(f"feature width {x.shape[1]} != normalizer width {params.width}")
    miss = np.isnan(x)
    if miss.any():
        x[miss] = np.broadcast_to(params.mean, x.shape)[miss]
    span = np.where(params.constant, 1.0, params.maximum - params.minimum)
    out = (x - params.minimum) / span
    out[:, params.constant] = 0.5
    np.clip(out, 0.0, 1.0, out=out)
    return out


@dataclass
class FoldPlan:
    """Assignment of each instance to exactly one of k folds."""

    k: int
    assignments: np.ndarray
    seed: int

    def test_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignments == fold)

    def train_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignments != fold)


def make_folds(n: int, k: int, seed: int) -> FoldPlan:
    """Seeded shuffle of 0..n-1 dealt round-robin into k folds.

    Fold sizes differ by at most one; the same (n, k, seed) always
    produces the same assignment.
    """
    if k < 2:
        raise ConfigError(f"need at least 2 folds, got k={k}")
    if n < k:
        raise ConfigError(f"cannot split {n} instances into {k} folds")
    perm = SeededRng(seed).permutation(n)
    assignments = np.empty(n, dtype=np.int64)
    assignments[perm] = np.arange(n, dtype=np.int64) % k
    return FoldPlan(k, assignments, seed)


def split_indices(n: int, train_fraction: float, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Seeded (train, test) index split with the given training fraction."""
    if not 0.0 < train_fraction < 1.0:
        raise ConfigError(f"train_fraction must lie in (0, 1), got {train_fraction}")
    if n < 2:
        raise ConfigError("need at least 2 instances to split")
    cut = min(max(int(round(train_fraction * n)), 1), n - 1)
    perm = SeededRng(seed).permutation(n)
    return perm[:cut], perm[cut:]


# ---------------------------------------------------------------------------
# Mulan ARFF + XML
# ---------------------------------------------------------------------------


def _read_label_xml(xml_path) -> list[str]:
    try:
        tree = ET.parse(xml_path)
    except ET.ParseError as exc:
        raise ParseError(f"{xml_path}: invalid XML: {exc}") from exc
    names: list[str] = []
    for el in tree.getroot().iter():
        if el.tag.rsplit("}", 1)[-1] == "label":
            name = el.attrib.get("name")
            if name is None:
                raise SchemaError(f"{xml_path}: <label> element without a name attribute")
            names.append(name)
    if not names:
        raise SchemaError(f"{xml_path}: no <label> entries found")
    if len(set(names)) != len(names):
        raise SchemaError(f"{xml_path}: duplicate label names")
    return names


def _parse_attribute(line: str, lineno: int, path) -> tuple[str, str]:
    body = line[len("@attribute") :].strip()
    if body[:1] in ("'", '"'):
        quote = body[0]
        end = body.find(quote, 1)
        if end < 0:
            raise ParseError(f"{path}:{lineno}: unterminated quoted attribute name")
        return body[1:end], body[end + 1 :].strip()
    parts = body.split(None, 1)
    if len(parts) != 2:
        raise ParseError(f"{path}:{lineno}: attribute declaration needs a name and a type")
    return parts[0], parts[1].strip()


def _split_data_line(line: str) -> list[str]:
    return [tok.strip() for tok in next(csv.reader([line], quotechar="'", skipinitialspace=True))]


def _read_arff(arff_path) -> tuple[list[tuple[str, list[str] | None]], list[tuple[int, list[str]]]]:
    """Return (attributes, data rows).

    Each attribute is (name, categories); categories is None for numeric
    attributes.  Data rows keep their source line number for error
    reporting.
    """
    path = Path(arff_path)
    attrs: list[tuple[str, list[str] | None]] = []
    rows: list[tuple[int, list[str]]] = []
    in_data = False
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        if not in_data:
            low = line.lower()
            if low.startswith("@relation"):
                continue
            if low.startswith("@data"):
                in_data = True
                continue
            if low.startswith("@attribute"):
                name, kind = _parse_attribute(line, lineno, path)
                if kind.startswith("{"):
                    cats = [c.strip().strip("'\"") for c in kind.strip("{} \t").split(",")]
                    if not cats or any(not c for c in cats):
                        raise ParseError(f"{path}:{lineno}: empty nominal category")
                    attrs.append((name, cats))
                elif kind.lower().split()[0] in _NUMERIC_TYPES:
                    attrs.append((name, None))
                else:
                    raise ParseError(f"{path}:{lineno}: unsupported attribute type {kind!r}")
                continue
            raise ParseError(f"{path}:{lineno}: unexpected header line {line!r}")
        if line.startswith("{"):
            raise ParseError(f"{path}:{lineno}: sparse ARFF rows are not supported")
        rows.append((lineno, _split_data_line(line)))
    if not in_data:
        raise ParseError(f"{path}: missing @data section")
    if not attrs:
        raise ParseError(f"{path}: no @attribute declarations")
    return attrs, rows


def _parse_binary(token: str, lineno: int, attr: str, path) -> float:
    try:
        value = float(token)
    except ValueError:
        raise DataError(
            f"{path}:{lineno}: non-binary value {token!r} in label column {attr!r}"
        ) from None
    if value not in (0.0, 1.0):
        raise DataError(f"{path}:{lineno}: non-binary value {token!r} in label column {attr!r}")
    return value


def load_mulan(arff_path, xml_path) -> MultiLabelDataset:
    """Load a Mulan-format dataset (ARFF attributes + XML label list)."""
    label_names = _read_label_xml(xml_path)
    attrs, rows = _read_arff(arff_path)
    path = Path(arff_path)

    attr_names = [name for name, _ in attrs]
    missing = [name for name in label_names if name not in attr_names]
    if missing:
        raise SchemaError(f"{xml_path}: labels {missing} not present in {path.name}")
    label_set = set(label_names)

    # Column plan for the feature side, in ARFF attribute order.
    feature_names: list[str] = []
    plans: list[tuple[str, str, list[str] | None, int]] = []  # (kind, name, cats, out_col)
    label_pos: dict[str, int] = {}
    for pos, (name, cats) in enumerate(attrs):
        if name in label_set:
            label_pos[name] = pos
            plans.append(("label", name, None, -1))
        elif cats is None:
            plans.append(("numeric", name, None, len(feature_names)))
            feature_names.append(name)
        elif sorted(cats) == ["0", "1"]:
            plans.append(("binary", name, None, len(feature_names)))
            feature_names.append(name)
        else:
            plans.append(("onehot", name, cats, len(feature_names)))
            feature_names.extend(f"{name}={c}" for c in cats)

    n = len(rows)
    features = np.full((n, len(feature_names)), np.nan, dtype=np.float64)
    labels = np.zeros((n, len(label_names)), dtype=np.float64)
    label_col = {name: j for j, name in enumerate(label_names)}

    for i, (lineno, values) in enumerate(rows):
        if len(values) != len(attrs):
            raise ParseError(
                f"{path}:{lineno}: expected {len(attrs)} values, got {len(values)}"
            )
        for (kind, name, cats, col), token in zip(plans, values):
            if kind == "label":
                if token == "?":
                    raise DataError(f"{path}:{lineno}: missing value in label column {name!r}")
                labels[i, label_col[name]] = _parse_binary(token, lineno, name, path)
            elif token == "?":
                continue  # leave the NaN sentinel in place
            elif kind == "onehot":
                if token not in cats:
                    raise ParseError(
                        f"{path}:{lineno}: value {token!r} not among categories of {name!r}"
                    )
                features[i, col : col + len(cats)] = 0.0
                features[i, col + cats.index(token)] = 1.0
            else:
                try:
                    features[i, col] = float(token)
                except ValueError:
                    raise ParseError(
                        f"{path}:{lineno}: non-numeric value {token!r} in column {name!r}"
                    ) from None

    return MultiLabelDataset(features, labels, feature_names, label_names)


def _quote_name(name: str) -> str:
    if any(ch in name for ch in " ,%{}"):
        return f"'{name}'"
    return name


def write_mulan(data: MultiLabelDataset, arff_path, xml_path, relation: str = "dataset") -> None:
    """Write a dataset back out as ARFF + XML; reloading round-trips exactly."""
    lines = [f"@relation {_quote_name(relation)}", ""]
    for name in data.feature_names:
        lines.append(f"@attribute {_quote_name(name)} numeric")
    for name in data.label_names:
        lines.append(f"@attribute {_quote_name(name)} {{0,1}}")
    lines.append("")
    lines.append("@data")
    for i in range(data.n_instances):
        cells = ["?" if np.isnan(v) else repr(float(v)) for v in data.features[i]]
        cells.extend(str(int(v)) for v in data.labels[i])
        lines.append(",".join(cells))
    Path(arff_path).write_text("\n".join(lines) + "\n")

    root = ET.Element("labels", xmlns=MULAN_XMLNS)
    for name in data.label_names:
        ET.SubElement(root, "label", name=name)
    ET.ElementTree(root).write(xml_path, encoding="utf-8", xml_declaration=True)


# ---------------------------------------------------------------------------
# Single-label CSV
# ---------------------------------------------------------------------------


def load_csv_single_label(path, label_column: int = -1, delimiter: str = ",") -> SingleLabelDataset:
    """Load a headerless numeric CSV with one class column.

    Class values (any strings) are re-indexed to 0..C-1 in order of first
    appearance; the mapping is kept in ``class_names``.
    """
    path = Path(path)
    with path.open(newline="") as fh:
        rows = [(i, row) for i, row in enumerate(csv.reader(fh, delimiter=delimiter), start=1) if row]
    if not rows:
        raise DataError(f"{path}: no data rows")
    width = len(rows[0][1])
    for lineno, row in rows:
        if len(row) != width:
            raise ParseError(f"{path}:{lineno}: expected {width} fields, got {len(row)}")
    col = label_column if label_column >= 0 else width + label_column
    if not 0 <= col < width:
        raise ConfigError(f"label column {label_column} out of range for width {width}")

    class_ids: dict[str, int] = {}
    features = np.empty((len(rows), width - 1), dtype=np.float64)
    class_index = np.empty(len(rows), dtype=np.int64)
    for i, (lineno, row) in enumerate(rows):
        key = row[col].strip()
        class_index[i] = class_ids.setdefault(key, len(class_ids))
        j = 0
        for c, token in enumerate(row):
            if c == col:
                continue
            try:
                features[i, j] = float(token)
            except ValueError:
                raise DataError(
                    f"{path}:{lineno}: non-numeric feature value {token.strip()!r}"
                ) from None
            j += 1
    return SingleLabelDataset(features, class_index, list(class_ids))
