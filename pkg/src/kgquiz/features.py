"""Entity salience, pairwise coherence, and the difficulty feature vector.

Salience is an entity's share of all in-links in a link graph; coherence is
the Jaccard overlap of two entities' in-link sets.  The full feature layout
has 30 slots in three groups:

* SAL (0-5): answer salience, then min/max over question entities, sum and
  mean over question+answer, mean over question entities; all six are
  log-transformed with a 1e-9 floor.
* TYPE (6-21 and 26-29): min/max/sum/mean of salience per coarse type over
  question+answer (raw), plus a one-hot of the answer's coarse type.
* COH (22-25): min/sum/mean of pairwise coherence over question+answer, and
  the mean over pairs containing the answer.

Disabling a group removes its slots; extraction with a subset of groups
equals slicing the full vector, so ablation can mask precomputed vectors.
"""

import math
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path

import numpy as np

from .errors import EmptyGraph, EmptyQuestionEntities, MalformedLine
from .kg import COARSE_LABELS, KnowledgeGraph

SAL = "SAL"
COH = "COH"
TYPE = "TYPE"
ALL_GROUPS = (SAL, COH, TYPE)

LOG_FLOOR = 1e-9

FEATURE_NAMES = (
    "sal_answer", "sal_min_q", "sal_max_q", "sal_sum", "sal_mean", "sal_mean_q",
    *(f"sal_{label}_{stat}" for label in COARSE_LABELS for stat in ("min", "max", "sum", "mean")),
    "coh_min", "coh_sum", "coh_mean", "coh_mean_answer_pairs",
    *(f"answer_is_{label}" for label in COARSE_LABELS),
)

_GROUP_SLOTS = {
    SAL: tuple(range(0, 6)),
    TYPE: tuple(range(6, 22)) + tuple(range(26, 30)),
    COH: tuple(range(22, 26)),
}


def group_slot_indices(groups) -> list[int]:
    """Slot indices of the full layout kept when only ``groups`` are enabled."""
    enabled = set(groups)
    unknown = enabled - set(ALL_GROUPS)
    if unknown:
        raise ValueError(f"unknown feature groups: {sorted(unknown)}")
    keep = set()
    for g in enabled:
        keep.update(_GROUP_SLOTS[g])
    return sorted(keep)


def feature_names(groups=ALL_GROUPS) -> list[str]:
    return [FEATURE_NAMES[i] for i in group_slot_indices(groups)]


class LinkGraph:
    """Directed link structure with an in-link index.  Self-loops are dropped."""

    def __init__(self, edges):
        self.edges: set[tuple[str, str]] = {
            (s, t) for s, t in (tuple(e) for e in edges) if s != t
        }
        self.in_links: dict[str, set[str]] = {}
        for s, t in self.edges:
            self.in_links.setdefault(t, set()).add(s)
        self.total_edges = len(self.edges)

    def in_set(self, e: str) -> set[str]:
        return self.in_links.get(e, set())

    @classmethod
    def load(cls, path: str | Path) -> "LinkGraph":
        edges = []
        with open(path, encoding="utf-8") as fh:
            for line_no, raw in enumerate(fh, start=1):
                line = raw.rstrip("\n")
                if not line.strip() or line.startswith("#"):
                    continue
                cols = line.split("\t")
                if len(cols) != 2 or not all(cols):
                    raise MalformedLine(line_no, "expected source<TAB>target")
                edges.append((cols[0], cols[1]))
        return cls(edges)


class SalienceTable:
    """Normalized in-link share per entity; absent entities score 0."""

    def __init__(self, scores: dict[str, float]):
        self.scores = scores

    def phi(self, e: str) -> float:
        return self.scores.get(e, 0.0)

    def to_tsv(self, path: str | Path) -> None:
        from ._io import atomic_write
        atomic_write(path, "".join(f"{e}\t{self.scores[e]}\n" for e in sorted(self.scores)))

    @classmethod
    def from_tsv(cls, path: str | Path) -> "SalienceTable":
        scores = {}
        with open(path, encoding="utf-8") as fh:
            for line_no, raw in enumerate(fh, start=1):
                line = raw.rstrip("\n")
                if not line.strip():
                    continue
                cols = line.split("\t")
                if len(cols) != 2:
                    raise MalformedLine(line_no, "expected entity<TAB>salience")
                scores[cols[0]] = float(cols[1])
        return cls(scores)


def build_salience(links: LinkGraph) -> SalienceTable:
    """Salience = indegree / total edge count.  Raises on an empty graph."""
    if links.total_edges == 0:
        raise EmptyGraph("link graph has no edges")
    return SalienceTable(
        {e: len(srcs) / links.total_edges for e, srcs in links.in_links.items()}
    )


def coherence(e1: str, e2: str, links: LinkGraph) -> float:
    """Jaccard overlap of in-link sets; 0 when the union is empty."""
    a, b = links.in_set(e1), links.in_set(e2)
    union = len(a | b)
    if union == 0:
        return 0.0
    return len(a & b) / union


@dataclass(frozen=True)
class QuestionInstance:
    """Entities shown in a question plus the answer entity.

    The entity list is deduplicated (first occurrence wins) and must not
    contain the answer.
    """

    question_entities: tuple[str, ...]
    answer: str
    label: str | None = None

    def __post_init__(self):
        deduped = tuple(dict.fromkeys(self.question_entities))
        object.__setattr__(self, "question_entities", deduped)
        if not deduped:
            raise EmptyQuestionEntities("question has no entities")
        if self.answer in deduped:
            raise ValueError(f"answer {self.answer!r} appears among question entities")


@dataclass(frozen=True)
class FeatureTables:
    """Immutable bundle handed to feature extraction and classification."""

    salience: SalienceTable
    links: LinkGraph
    kg: KnowledgeGraph


def _stats(values: list[float]) -> list[float]:
    if not values:
        return [0.0, 0.0, 0.0, 0.0]
    return [min(values), max(values), sum(values), sum(values) / len(values)]


def extract_features(inst: QuestionInstance, salience: SalienceTable, links: LinkGraph,
                     kg: KnowledgeGraph, groups=ALL_GROUPS) -> np.ndarray:
    """Build the feature vector for one instance with the given groups enabled.

    Pure and order-free: entities are processed in sorted order, so permuting
    ``question_entities`` yields a bit-identical vector.
    """
    q_ents = sorted(inst.question_entities)
    all_ents = sorted(set(q_ents) | {inst.answer})

    phi_q = [salience.phi(e) for e in q_ents]
    phi_all = [salience.phi(e) for e in all_ents]
    sal_raw = [
        salience.phi(inst.answer),
        min(phi_q),
        max(phi_q),
        sum(phi_all),
        sum(phi_all) / len(phi_all),
        sum(phi_q) / len(phi_q),
    ]
    sal = [math.log(v + LOG_FLOOR) for v in sal_raw]

    coarse = {e: kg.coarse_type(e) for e in all_ents}
    type_slots: list[float] = []
    for label in COARSE_LABELS:
        type_slots.extend(_stats([salience.phi(e) for e in all_ents if coarse[e] == label]))

    pair_values = []
    answer_pair_values = []
    for a, b in combinations(all_ents, 2):
        c = coherence(a, b, links)
        pair_values.append(c)
        if inst.answer in (a, b):
            answer_pair_values.append(c)
    coh = [
        min(pair_values),
        sum(pair_values),
        sum(pair_values) / len(pair_values),
        sum(answer_pair_values) / len(answer_pair_values),
    ]

    one_hot = [1.0 if coarse[inst.answer] == label else 0.0 for label in COARSE_LABELS]

    full = np.array(sal + type_slots + coh + one_hot, dtype=np.float64)
    return full[group_slot_indices(groups)]


def dump_features(rows, path: str | Path, groups=ALL_GROUPS) -> None:
    """Write vectors as TSV with a header naming each slot (debug aid).

    ``rows`` yields (identifier, vector) pairs.
    """
    from ._io import atomic_write
    header = "id\t" + "\t".join(feature_names(groups))
    lines = [header]
    for ident, vec in rows:
        lines.append(ident + "\t" + "\t".join(str(float(v)) for v in vec))
    atomic_write(path, "\n".join(lines) + "\n")
