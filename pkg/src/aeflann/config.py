"""Flat key=value run configuration.

Every key has a documented default; unknown keys are rejected so typos
fail loudly.  Lines starting with '#' and blank lines are ignored.

Keys and defaults::

    # dataset
    arff =                  # ARFF path (multi-label, with xml)
    xml =                   # XML label list path
    csv =                   # CSV path (single-label)
    label_column = -1       # CSV class column (negative counts from the end)
    mode = multi_label      # multi_label | single_label
    dataset_name =          # defaults to the data file stem

    # model
    p = 5                   # basis terms per feature (odd)
    use_autoencoder = true  # false = functional-link ablation
    learning_rate = 0.1     # output-layer learning rate
    epochs = 500            # output-layer epochs
    ae_learning_rate = 0.1
    ae_epochs = 300
    hidden_fraction = 0.2   # bottleneck width as a fraction of d * p
    init_scale = 0.5        # uniform init range for all weights
    threshold = 0.5         # multi-label decision threshold

    # harness
    k = 5                   # folds for the cv command
    seed = 0
    out_dir = results
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path

from .autoencoder import AeTrainConfig
from .classifier import LabelMode, TrainConfig
from .datasets import MultiLabelDataset, SingleLabelDataset, load_csv_single_label, load_mulan
from .errors import ConfigError
from .expansion import ExpansionConfig
from .linalg import derive_seed

_TRUE = {"true", "1", "yes", "on"}
_FALSE = {"false", "0", "no", "off"}


@dataclass
class RunConfig:
    arff: str = ""
    xml: str = ""
    csv: str = ""
    label_column: int = -1
    mode: str = "multi_label"
    dataset_name: str = ""
    p: int = 5
    use_autoencoder: bool = True
    learning_rate: float = 0.1
    epochs: int = 500
    ae_learning_rate: float = 0.1
    ae_epochs: int = 300
    hidden_fraction: float = 0.2
    init_scale: float = 0.5
    threshold: float = 0.5
    k: int = 5
    seed: int = 0
    out_dir: str = "results"

    def __post_init__(self) -> None:
        if self.mode not in (LabelMode.MULTI_LABEL.value, LabelMode.SINGLE_LABEL.value):
            raise ConfigError(f"mode must be multi_label or single_label, got {self.mode!r}")

    def expansion(self) -> ExpansionConfig:
        return ExpansionConfig(p=self.p)

    def train_config(self) -> TrainConfig:
        return TrainConfig(
            mu=self.learning_rate,
            epochs=self.epochs,
            seed=self.seed,
            init_scale=self.init_scale,
            ae=AeTrainConfig(
                learning_rate=self.ae_learning_rate,
                epochs=self.ae_epochs,
                hidden_fraction=self.hidden_fraction,
                init_scale=self.init_scale,
                # distinct stream from the output layer even with one root seed
                seed=derive_seed(self.seed, 1),
            ),
        )

    def resolved_dataset_name(self) -> str:
        if self.dataset_name:
            return self.dataset_name
        source = self.arff or self.csv
        return Path(source).stem if source else "dataset"


def _convert(key: str, raw: str, target_type: type):
    raw = raw.strip()
    try:
        if target_type is bool:
            low = raw.lower()
            if low in _TRUE:
                return True
            if low in _FALSE:
                return False
            raise ValueError(f"not a boolean: {raw!r}")
        return target_type(raw)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key!r}: {exc}") from exc


def parse_run_config(path, overrides: dict | None = None) -> RunConfig:
    """Parse a key=value config file, then apply command-line overrides."""
    path = Path(path)
    field_types = {f.name: f.type for f in fields(RunConfig)}
    # dataclass field annotations are strings under `from __future__ import annotations`
    py_types = {"str": str, "int": int, "float": float, "bool": bool}
    values: dict = {}
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value, got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in field_types:
            raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
        values[key] = _convert(key, value, py_types[str(field_types[key])])
    if overrides:
        values.update(overrides)
    return RunConfig(**values)


def load_dataset(config: RunConfig) -> MultiLabelDataset | SingleLabelDataset:
    """Load whichever dataset the config points at, validating the combination."""
    if config.arff and config.csv:
        raise ConfigError("configure either arff+xml or csv, not both")
    if config.arff:
        if not config.xml:
            raise ConfigError("arff datasets also need an xml label list")
        return load_mulan(config.arff, config.xml)
    if config.csv:
        return load_csv_single_label(config.csv, config.label_column)
    raise ConfigError("no dataset configured: set arff+xml or csv")
