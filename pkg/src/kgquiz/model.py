"""Binary logistic-regression difficulty classifier.

The model learns P(difficulty = easy) over feature vectors, standardized
with z-scores fit on the training data.  Training is deterministic:
full-batch gradient descent from zero weights (see ``_kernels``), so
identical data and config give bit-identical weights.

Model files are JSON with fields ``weights``, ``bias``, ``groups``,
``standardization`` and ``config``; serialization round-trips exactly.
Training data files are TSV rows
``label<TAB>answer_entity<TAB>comma-separated question entities``.
"""

import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import _kernels
from ._io import atomic_write
from .errors import DimensionMismatch, MalformedLine, SingleClassData, UnknownEntity
from .features import ALL_GROUPS, FeatureTables, QuestionInstance, extract_features
from .kg import KnowledgeGraph

EASY = "easy"
HARD = "hard"
LABELS = (EASY, HARD)


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.1
    epochs: int = 1000
    l2: float = 0.01
    tolerance: float = 1e-6
    seed: int = 42

    def __post_init__(self):
        for name in ("learning_rate", "epochs", "l2", "tolerance"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


class DifficultyModel:
    """Trained weights plus the standardization fit on the training data.

    Zero-variance feature slots get a standard deviation of 1, so after
    centering they contribute a constant that the bias absorbs.
    """

    def __init__(self, weights, bias: float, feature_groups, mean, std,
                 config: TrainConfig | None = None):
        self.weights = np.asarray(weights, dtype=np.float64)
        self.bias = float(bias)
        self.feature_groups = tuple(feature_groups) if feature_groups is not None else None
        self.mean = np.asarray(mean, dtype=np.float64)
        self.std = np.asarray(std, dtype=np.float64)
        self.config = config or TrainConfig()

    def predict_p_easy(self, fv) -> float:
        """sigmoid(w . standardize(fv) + b)."""
        fv = np.asarray(fv, dtype=np.float64)
        if fv.shape != self.weights.shape:
            raise DimensionMismatch(
                f"feature vector has {fv.shape[0]} slots, model expects {self.weights.shape[0]}"
            )
        z = float(self.weights @ ((fv - self.mean) / self.std) + self.bias)
        if z >= 0:
            return 1.0 / (1.0 + np.exp(-z))
        ez = np.exp(z)
        return ez / (1.0 + ez)

    def save(self, path: str | Path) -> None:
        payload = {
            "weights": self.weights.tolist(),
            "bias": self.bias,
            "groups": list(self.feature_groups) if self.feature_groups is not None else None,
            "standardization": {"mean": self.mean.tolist(), "std": self.std.tolist()},
            "config": asdict(self.config),
        }
        atomic_write(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "DifficultyModel":
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
        return cls(
            weights=payload["weights"],
            bias=payload["bias"],
            feature_groups=payload["groups"],
            mean=payload["standardization"]["mean"],
            std=payload["standardization"]["std"],
            config=TrainConfig(**payload["config"]),
        )


def train(data, config: TrainConfig | None = None, groups=ALL_GROUPS) -> DifficultyModel:
    """Fit the classifier on (feature_vector, label) pairs.

    Requires at least two examples covering both labels and a uniform vector
    length.  ``groups`` is metadata recording which feature groups produced
    the vectors; pass None for raw (non-layout) vectors.
    """
    config = config or TrainConfig()
    if len(data) < 2:
        raise SingleClassData("need at least 2 training examples")
    labels = {label for _, label in data}
    if labels != set(LABELS):
        raise SingleClassData(f"training data must contain both labels, got {sorted(labels)}")
    lengths = {len(fv) for fv, _ in data}
    if len(lengths) != 1:
        raise DimensionMismatch(f"mixed feature vector lengths: {sorted(lengths)}")

    X = np.array([fv for fv, _ in data], dtype=np.float64)
    y = np.array([1.0 if label == EASY else 0.0 for _, label in data])
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    std[std == 0.0] = 1.0
    Xs = (X - mean) / std

    w, b, _ = _kernels.logreg_fit(
        Xs, y, config.learning_rate, config.epochs, config.l2, config.tolerance
    )
    return DifficultyModel(w, b, groups, mean, std, config)


def classify(model: DifficultyModel, inst: QuestionInstance, tables: FeatureTables) -> str:
    """Label an instance: easy iff P(easy) > 0.5, hard otherwise (ties hard)."""
    fv = extract_features(inst, tables.salience, tables.links, tables.kg,
                          model.feature_groups or ALL_GROUPS)
    return EASY if model.predict_p_easy(fv) > 0.5 else HARD


def load_training_data(path: str | Path, kg: KnowledgeGraph) -> list[QuestionInstance]:
    """Read labeled instances, validating labels and entity membership."""
    instances = []
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) != 3:
                raise MalformedLine(line_no, "expected label<TAB>answer<TAB>entity,entity,...")
            label, answer, raw_entities = cols
            if label not in LABELS:
                raise MalformedLine(line_no, f"label must be easy or hard, got {label!r}")
            entities = tuple(e for e in raw_entities.split(",") if e)
            for e in (answer, *entities):
                if e not in kg.entities:
                    raise UnknownEntity(f"{e} (line {line_no})")
            instances.append(QuestionInstance(entities, answer, label=label))
    return instances


def build_dataset(instances, tables: FeatureTables, groups=ALL_GROUPS):
    """Extract one (vector, label) pair per labeled instance."""
    return [
        (extract_features(inst, tables.salience, tables.links, tables.kg, groups), inst.label)
        for inst in instances
    ]
