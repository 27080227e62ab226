"""In-memory knowledge graph with a subClassOf type hierarchy and an
evaluator for single-variable triple-pattern queries.

The graph is immutable after construction; every read (type closure, query
evaluation, coarse typing) is pure and safe to call from parallel contexts.

File format: UTF-8 TSV with three columns ``subject<TAB>predicate<TAB>object``.
Lines starting with ``#`` and blank lines are ignored.  The predicates
``type`` and ``subClassOf`` are reserved: they feed the type system and never
appear as ordinary predicates in instance patterns.
"""

from dataclasses import dataclass, field
from pathlib import Path

from ._io import atomic_write
from .errors import (
    CyclicHierarchy,
    EmptyTopic,
    MalformedLine,
    UnknownEntity,
    UnknownType,
)

TYPE_PRED = "type"
SUBCLASS_PRED = "subClassOf"
VAR = "?x"

PERSON = "person"
LOCATION = "location"
ORGANIZATION = "organization"
OTHER = "other"
COARSE_LABELS = (PERSON, LOCATION, ORGANIZATION, OTHER)

DEFAULT_COARSE_ROOTS = {PERSON: "person", LOCATION: "location", ORGANIZATION: "organization"}


def is_var(term: str) -> bool:
    return term.startswith("?")


@dataclass(frozen=True)
class TriplePattern:
    """One subject-predicate-object template with exactly one variable.

    ``kind`` is derived: TYPE when the predicate is ``type``; otherwise PO
    when the subject is the variable (``?x p o``) and SP when the object is
    (``s p ?x``).  Ground patterns (no variable) and two-variable patterns
    are rejected; the variable never sits in the predicate position.
    """

    subject: str
    predicate: str
    object: str

    def __post_init__(self):
        if is_var(self.predicate):
            raise ValueError("variable not allowed in predicate position")
        n_vars = int(is_var(self.subject)) + int(is_var(self.object))
        if n_vars == 0:
            raise ValueError("ground pattern (no variable) is not allowed")
        if n_vars == 2:
            raise ValueError("pattern may contain only one variable")

    @property
    def kind(self) -> str:
        if self.predicate == TYPE_PRED:
            return "TYPE"
        return "PO" if is_var(self.subject) else "SP"

    @property
    def variable(self) -> str:
        return self.subject if is_var(self.subject) else self.object

    @property
    def ground_term(self) -> str:
        """The non-variable subject/object term (the type id for TYPE)."""
        return self.object if is_var(self.subject) else self.subject

    def as_triple(self) -> tuple[str, str, str]:
        return (self.subject, self.predicate, self.object)


@dataclass(frozen=True)
class Query:
    """A conjunction of triple patterns sharing one answer variable."""

    patterns: tuple[TriplePattern, ...]
    variable: str = VAR

    def __post_init__(self):
        if not self.patterns:
            raise ValueError("query needs at least one pattern")
        for p in self.patterns:
            if p.variable != self.variable:
                raise ValueError(
                    f"pattern variable {p.variable!r} differs from query variable {self.variable!r}"
                )

    @property
    def type_patterns(self) -> tuple[TriplePattern, ...]:
        return tuple(p for p in self.patterns if p.kind == "TYPE")

    @property
    def instance_patterns(self) -> tuple[TriplePattern, ...]:
        return tuple(p for p in self.patterns if p.kind != "TYPE")

    def question_entities(self) -> tuple[str, ...]:
        """Ground terms of the instance patterns, deduplicated in order."""
        return tuple(dict.fromkeys(p.ground_term for p in self.instance_patterns))


@dataclass(frozen=True)
class Topic:
    """A named, non-empty set of entities that answers are drawn from."""

    name: str
    members: frozenset[str]


class KnowledgeGraph:
    """Fact store with per-position indexes and a DAG type hierarchy.

    ``coarse_roots`` maps the coarse labels person/location/organization to
    the type ids that anchor them in this graph's hierarchy.
    """

    def __init__(self, facts, coarse_roots: dict[str, str] | None = None):
        self.all_facts: frozenset[tuple[str, str, str]] = frozenset(tuple(f) for f in facts)
        self.coarse_roots = dict(DEFAULT_COARSE_ROOTS if coarse_roots is None else coarse_roots)

        self.direct_types: dict[str, set[str]] = {}
        self.supertypes: dict[str, set[str]] = {}
        self.subtypes: dict[str, set[str]] = {}
        self.instance_facts: set[tuple[str, str, str]] = set()
        self.types: set[str] = set()
        entities: set[str] = set()

        for s, p, o in self.all_facts:
            if p == SUBCLASS_PRED:
                self.supertypes.setdefault(s, set()).add(o)
                self.subtypes.setdefault(o, set()).add(s)
                self.types.update((s, o))
            elif p == TYPE_PRED:
                self.direct_types.setdefault(s, set()).add(o)
                self.types.add(o)
                entities.add(s)
            else:
                self.instance_facts.add((s, p, o))
                entities.add(s)
        self.entities: set[str] = entities

        self._check_acyclic()

        self.predicates: set[str] = set()
        self.by_subject: dict[str, set[tuple[str, str, str]]] = {}
        self.by_object: dict[str, set[tuple[str, str, str]]] = {}
        self.by_pred_object: dict[tuple[str, str], set[str]] = {}
        self.by_subject_pred: dict[tuple[str, str], set[str]] = {}
        self.direct_instances: dict[str, set[str]] = {}
        for s, t in ((s, t) for s, ts in self.direct_types.items() for t in ts):
            self.direct_instances.setdefault(t, set()).add(s)
        for fact in self.instance_facts:
            s, p, o = fact
            self.predicates.add(p)
            self.by_subject.setdefault(s, set()).add(fact)
            self.by_object.setdefault(o, set()).add(fact)
            self.by_pred_object.setdefault((p, o), set()).add(s)
            self.by_subject_pred.setdefault((s, p), set()).add(o)

        self._ancestors: dict[str, frozenset[str]] = {}
        self._descendants: dict[str, frozenset[str]] = {}
        self._instances: dict[str, frozenset[str]] = {}
        self._depth: dict[str, int] = {}

    def _check_acyclic(self):
        # Kahn's algorithm over subClassOf; leftovers mean a cycle.
        out_deg = {t: len(self.supertypes.get(t, ())) for t in self.types}
        queue = [t for t, d in out_deg.items() if d == 0]
        seen = 0
        while queue:
            t = queue.pop()
            seen += 1
            for child in self.subtypes.get(t, ()):
                out_deg[child] -= 1
                if out_deg[child] == 0:
                    queue.append(child)
        if seen != len(self.types):
            stuck = sorted(t for t, d in out_deg.items() if d > 0)
            raise CyclicHierarchy(f"subClassOf cycle involving: {', '.join(stuck)}")

    # --- type system ---------------------------------------------------

    def ancestors(self, t: str) -> frozenset[str]:
        """Reflexive-transitive supertype closure of ``t``."""
        if t not in self.types:
            raise UnknownType(t)
        cached = self._ancestors.get(t)
        if cached is None:
            closure = {t}
            stack = list(self.supertypes.get(t, ()))
            while stack:
                cur = stack.pop()
                if cur not in closure:
                    closure.add(cur)
                    stack.extend(self.supertypes.get(cur, ()))
            cached = self._ancestors[t] = frozenset(closure)
        return cached

    def descendants(self, t: str) -> frozenset[str]:
        """Reflexive-transitive subtype closure of ``t``."""
        if t not in self.types:
            raise UnknownType(t)
        cached = self._descendants.get(t)
        if cached is None:
            closure = {t}
            stack = list(self.subtypes.get(t, ()))
            while stack:
                cur = stack.pop()
                if cur not in closure:
                    closure.add(cur)
                    stack.extend(self.subtypes.get(cur, ()))
            cached = self._descendants[t] = frozenset(closure)
        return cached

    def is_subtype(self, t1: str, t2: str) -> bool:
        """True iff ``t1`` equals or reaches ``t2`` via subClassOf edges."""
        if t2 not in self.types:
            raise UnknownType(t2)
        return t2 in self.ancestors(t1)

    def type_depth(self, t: str) -> int:
        """Longest subClassOf path from ``t`` up to a hierarchy root."""
        if t not in self.types:
            raise UnknownType(t)
        cached = self._depth.get(t)
        if cached is None:
            supers = self.supertypes.get(t, ())
            cached = 0 if not supers else 1 + max(self.type_depth(s) for s in supers)
            self._depth[t] = cached
        return cached

    def entity_types(self, e: str) -> frozenset[str]:
        """All types of ``e``, transitive over subClassOf."""
        if e not in self.entities:
            raise UnknownEntity(e)
        out: set[str] = set()
        for t in self.direct_types.get(e, ()):
            out.update(self.ancestors(t))
        return frozenset(out)

    def instances_of(self, t: str) -> frozenset[str]:
        """Entities whose transitive type set contains ``t``."""
        cached = self._instances.get(t)
        if cached is None:
            members: set[str] = set()
            for sub in self.descendants(t):
                members.update(self.direct_instances.get(sub, ()))
            cached = self._instances[t] = frozenset(members)
        return cached

    def coarse_type(self, e: str) -> str:
        """Coarse label of ``e``: person > location > organization, else other."""
        ets = self.entity_types(e)
        for label in (PERSON, LOCATION, ORGANIZATION):
            if self.coarse_roots.get(label) in ets:
                return label
        return OTHER

    def coarse_type_of_type(self, t: str) -> str:
        """Coarse label a type falls under, with the same priority order."""
        anc = self.ancestors(t)
        for label in (PERSON, LOCATION, ORGANIZATION):
            if self.coarse_roots.get(label) in anc:
                return label
        return OTHER

    # --- query evaluation ------------------------------------------------

    def pattern_candidates(self, pattern: TriplePattern) -> set[str]:
        """Bindings of the pattern's variable that turn it into a fact.

        TYPE patterns use transitive membership.  Unknown ids simply yield
        the empty set; evaluation never raises.
        """
        if pattern.kind == "TYPE":
            if is_var(pattern.subject):
                t = pattern.object
                return set(self.instances_of(t)) if t in self.types else set()
            s = pattern.subject
            return set(self.entity_types(s)) if s in self.entities else set()
        if is_var(pattern.subject):
            return set(self.by_pred_object.get((pattern.predicate, pattern.object), ()))
        return set(self.by_subject_pred.get((pattern.subject, pattern.predicate), ()))

    def evaluate(self, query: Query) -> set[str]:
        """All entities that satisfy every pattern when bound to the variable."""
        candidate_sets = sorted(
            (self.pattern_candidates(p) for p in query.patterns), key=len
        )
        result = candidate_sets[0]
        for s in candidate_sets[1:]:
            result &= s
            if not result:
                return set()
        return result & self.entities


def _parse_tsv_rows(path: str | Path):
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            yield line_no, line


def load_kg(path: str | Path, coarse_roots: dict[str, str] | None = None) -> KnowledgeGraph:
    """Load a knowledge graph from a 3-column TSV file.

    ``type`` and ``subClassOf`` rows are routed to the type system; every
    other row becomes an instance fact.  Raises :class:`MalformedLine` on a
    row without exactly three non-empty columns and :class:`CyclicHierarchy`
    when the subClassOf edges do not form a DAG.
    """
    facts = []
    for line_no, line in _parse_tsv_rows(path):
        cols = line.split("\t")
        if len(cols) != 3:
            raise MalformedLine(line_no, f"expected 3 tab-separated columns, got {len(cols)}")
        if not all(cols):
            raise MalformedLine(line_no, "empty column")
        facts.append(tuple(cols))
    return KnowledgeGraph(facts, coarse_roots=coarse_roots)


def save_kg(kg: KnowledgeGraph, path: str | Path) -> None:
    """Serialize the full fact set back to TSV (sorted, round-trip safe)."""
    lines = ["\t".join(f) for f in sorted(kg.all_facts)]
    atomic_write(path, "\n".join(lines) + "\n" if lines else "")


def load_topic(path: str | Path, kg: KnowledgeGraph, name: str | None = None) -> Topic:
    """Load a topic (one entity id per line) and validate its members."""
    members = set()
    for line_no, line in _parse_tsv_rows(path):
        entity = line.strip()
        if entity not in kg.entities:
            raise UnknownEntity(f"{entity} (line {line_no})")
        members.add(entity)
    if not members:
        raise EmptyTopic(str(path))
    return Topic(name=name or Path(path).stem, members=frozenset(members))
