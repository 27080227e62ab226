"""Evaluation harness: cross-validation, feature ablation, and agreement
statistics (Kendall's tau-b, Fleiss' kappa, Cohen's kappa)."""

import math
from dataclasses import dataclass
from random import Random

import numpy as np

from . import _kernels
from .errors import (
    AllTied,
    LengthMismatch,
    PerfectExpectedAgreement,
    RaggedMatrix,
    TooFewExamples,
)
from .features import ALL_GROUPS, COH, SAL, TYPE, group_slot_indices
from .model import EASY, TrainConfig, train


def _folds(n: int, k: int, seed: int) -> list[list[int]]:
    """Seeded shuffle, then k near-equal contiguous chunks (disjoint, covering)."""
    idx = list(range(n))
    Random(seed).shuffle(idx)
    base, extra = divmod(n, k)
    folds, start = [], 0
    for f in range(k):
        size = base + (1 if f < extra else 0)
        folds.append(idx[start:start + size])
        start += size
    return folds


def _mask_data(data, groups):
    if groups is None:
        return data
    cols = group_slot_indices(groups)
    return [(np.asarray(fv)[cols], label) for fv, label in data]


def kfold_cv(data, k: int, seed: int, groups=None,
             config: TrainConfig | None = None) -> tuple[list[float], float]:
    """k-fold cross-validation accuracy of the difficulty classifier.

    ``data`` is a list of (feature_vector, label) pairs.  When ``groups`` is
    given the vectors must be in the full 30-slot layout and are masked down
    to the enabled groups; with ``groups=None`` vectors are used as-is.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    if len(data) < k:
        raise TooFewExamples(f"{len(data)} examples cannot fill {k} folds")
    data = _mask_data(data, groups)
    folds = _folds(len(data), k, seed)
    accuracies = []
    for f in range(k):
        test_idx = set(folds[f])
        train_rows = [data[i] for i in range(len(data)) if i not in test_idx]
        model = train(train_rows, config=config, groups=groups)
        correct = 0
        for i in folds[f]:
            fv, label = data[i]
            predicted = EASY if model.predict_p_easy(fv) > 0.5 else "hard"
            correct += predicted == label
        accuracies.append(correct / len(folds[f]))
    return accuracies, sum(accuracies) / len(accuracies)


def _majority_cv(data, k: int, seed: int) -> float:
    """Baseline for the all-features-off row: predict the training majority."""
    folds = _folds(len(data), k, seed)
    accuracies = []
    for f in range(k):
        test_idx = set(folds[f])
        train_labels = [data[i][1] for i in range(len(data)) if i not in test_idx]
        majority = max(sorted(set(train_labels)), key=train_labels.count)
        correct = sum(1 for i in folds[f] if data[i][1] == majority)
        accuracies.append(correct / len(folds[f]))
    return sum(accuracies) / len(accuracies)


@dataclass(frozen=True)
class AblationRow:
    sal: bool
    coh: bool
    type_: bool
    accuracy: float


def ablation(data, k: int, seed: int, config: TrainConfig | None = None) -> list[AblationRow]:
    """Cross-validated accuracy for all 8 feature-group combinations.

    ``data`` must carry full-layout vectors.  Rows come back in descending
    accuracy order; the row with every group disabled uses the
    majority-class baseline (about 50% on balanced labels).
    """
    if len(data) < k:
        raise TooFewExamples(f"{len(data)} examples cannot fill {k} folds")
    rows = []
    for sal in (True, False):
        for coh in (True, False):
            for typ in (True, False):
                groups = tuple(
                    g for g, on in ((SAL, sal), (COH, coh), (TYPE, typ)) if on
                )
                if groups:
                    _, acc = kfold_cv(data, k, seed, groups=groups, config=config)
                else:
                    acc = _majority_cv(data, k, seed)
                rows.append(AblationRow(sal, coh, typ, acc))
    rows.sort(key=lambda r: (-r.accuracy, not r.sal, not r.coh, not r.type_))
    return rows


def kendall_tau(rank_a, rank_b) -> float:
    """Kendall's tau-b over two equal-length rankings (ties tolerated).

    tau-b = (C - D) / sqrt((C + D + Ta)(C + D + Tb)) over item pairs, where
    Ta/Tb count pairs tied in only one ranking.  Raises AllTied when either
    ranking is constant (undefined denominator).
    """
    if len(rank_a) != len(rank_b):
        raise LengthMismatch(f"{len(rank_a)} vs {len(rank_b)} items")
    if len(rank_a) < 2:
        raise ValueError("need at least 2 items")
    a = np.asarray(rank_a, dtype=np.float64)
    b = np.asarray(rank_b, dtype=np.float64)
    concordant, discordant, tied_a, tied_b = _kernels.tau_counts(a, b)
    d1 = concordant + discordant + tied_a
    d2 = concordant + discordant + tied_b
    if d1 == 0 or d2 == 0:
        raise AllTied("a ranking with all items tied has no defined tau")
    return (concordant - discordant) / math.sqrt(d1 * d2)


def fleiss_kappa(counts) -> float:
    """Fleiss' kappa from an items x categories count matrix.

    Every row must sum to the same number of raters n >= 2.
    """
    m = np.asarray(counts, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise RaggedMatrix("counts must be a 2-D items x categories matrix")
    row_sums = m.sum(axis=1)
    if not np.all(row_sums == row_sums[0]):
        raise RaggedMatrix("rows must all sum to the same rater count")
    n = row_sums[0]
    if n < 2:
        raise RaggedMatrix("need at least 2 raters per item")
    p_cat = m.sum(axis=0) / m.sum()
    p_items = ((m * m).sum(axis=1) - n) / (n * (n - 1))
    p_bar = float(p_items.mean())
    p_exp = float(p_cat @ p_cat)
    if p_exp == 1.0:
        raise PerfectExpectedAgreement("every rating is in one category")
    return (p_bar - p_exp) / (1.0 - p_exp)


def cohen_kappa(labels_a, labels_b) -> float:
    """Cohen's kappa between two raters' label sequences."""
    if len(labels_a) != len(labels_b):
        raise LengthMismatch(f"{len(labels_a)} vs {len(labels_b)} labels")
    if len(labels_a) < 1:
        raise ValueError("need at least 1 labeled item")
    n = len(labels_a)
    categories = sorted(set(labels_a) | set(labels_b))
    p_obs = sum(1 for x, y in zip(labels_a, labels_b) if x == y) / n
    count_a = {c: 0 for c in categories}
    count_b = {c: 0 for c in categories}
    for x in labels_a:
        count_a[x] += 1
    for y in labels_b:
        count_b[y] += 1
    p_exp = sum((count_a[c] / n) * (count_b[c] / n) for c in categories)
    if p_exp == 1.0:
        raise PerfectExpectedAgreement("both raters are constant on one category")
    return (p_obs - p_exp) / (1.0 - p_exp)


def weighted_mean(values, weights) -> float:
    """Weighted average, e.g. per-user tau values weighted by participation."""
    if len(values) != len(weights):
        raise LengthMismatch(f"{len(values)} values vs {len(weights)} weights")
    total = float(sum(weights))
    if total <= 0:
        raise ValueError("weights must sum to a positive value")
    return float(sum(v * w for v, w in zip(values, weights)) / total)
