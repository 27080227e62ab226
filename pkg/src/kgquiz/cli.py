"""Command-line entry point: one executable, one subcommand per stage.

All randomness in a run flows from a single ``--seed`` (default 42), so any
subcommand re-run with the same inputs and seed writes byte-identical
output.  Output files are written atomically (temp file + rename).

Exit codes: 0 on success, 1 on a domain error (message on stderr), 2 on a
usage error.
"""

import argparse
import json
import sys
from pathlib import Path
from random import Random

from ._io import atomic_write
from .corpus import (
    EntityLexicon,
    PredicateLexicon,
    TypeLexicon,
    TypeSalienceTable,
    load_corpus,
    mine_predicate_phrases,
    mine_surface_forms,
    mine_type_salience,
)
from .errors import KGQuizError
from .evalstats import ablation, kfold_cv
from .features import (
    ALL_GROUPS,
    FeatureTables,
    LinkGraph,
    build_salience,
    dump_features,
    extract_features,
)
from .generate import GenConfig, generate_query, question_from_record, question_record
from .kg import DEFAULT_COARSE_ROOTS, LOCATION, ORGANIZATION, PERSON, load_kg, load_topic
from .mcq import build_mcq, mcq_record
from .model import (
    DifficultyModel,
    TrainConfig,
    build_dataset,
    load_training_data,
    train,
)
from .verbalize import VerbalizationBundle

LEXICON_FILES = {
    "type_salience": "type_salience.tsv",
    "pred_lex": "pred_lex.tsv",
    "surface": "surface.tsv",
    "type_lexicon": "type_lexicon.tsv",
}


def _groups_arg(text: str):
    groups = tuple(g.strip() for g in text.split(",") if g.strip())
    bad = [g for g in groups if g not in ALL_GROUPS]
    if bad:
        raise argparse.ArgumentTypeError(
            f"unknown feature groups {bad}; choose from {','.join(ALL_GROUPS)}"
        )
    return groups


def _add_kg_args(sub):
    sub.add_argument("--kg", required=True, help="knowledge graph TSV (subject/predicate/object)")
    sub.add_argument("--person-root", default=DEFAULT_COARSE_ROOTS[PERSON],
                     help="type id anchoring the coarse person type")
    sub.add_argument("--location-root", default=DEFAULT_COARSE_ROOTS[LOCATION],
                     help="type id anchoring the coarse location type")
    sub.add_argument("--org-root", default=DEFAULT_COARSE_ROOTS[ORGANIZATION],
                     help="type id anchoring the coarse organization type")


def _load_kg(args):
    return load_kg(args.kg, coarse_roots={
        PERSON: args.person_root,
        LOCATION: args.location_root,
        ORGANIZATION: args.org_root,
    })


def _load_bundle(lexicon_dir: str, kg) -> tuple[VerbalizationBundle, TypeSalienceTable]:
    d = Path(lexicon_dir)
    bundle = VerbalizationBundle(
        entity_lex=EntityLexicon.from_tsv(d / LEXICON_FILES["surface"]),
        pred_lex=PredicateLexicon.from_tsv(d / LEXICON_FILES["pred_lex"]),
        type_lex=TypeLexicon.from_tsv(d / LEXICON_FILES["type_lexicon"], kg),
    )
    return bundle, TypeSalienceTable.from_tsv(d / LEXICON_FILES["type_salience"])


def _write_jsonl(path: str, records) -> None:
    atomic_write(path, "".join(json.dumps(r, sort_keys=True) + "\n" for r in records))


# --- subcommand handlers -----------------------------------------------------

def _cmd_mine_types(args) -> int:
    kg = _load_kg(args)
    sentences = load_corpus(args.corpus)
    lexicon = TypeLexicon.from_tsv(args.type_lexicon, kg)
    mine_type_salience(sentences, kg, lexicon).to_tsv(args.out)
    return 0


def _cmd_mine_predicates(args) -> int:
    kg = _load_kg(args)
    sentences = load_corpus(args.corpus)
    mine_predicate_phrases(sentences, kg, max_gap=args.max_gap).to_tsv(args.out)
    return 0


def _cmd_mine_surface(args) -> int:
    mine_surface_forms(load_corpus(args.corpus)).to_tsv(args.out)
    return 0


def _cmd_salience(args) -> int:
    build_salience(LinkGraph.load(args.links)).to_tsv(args.out)
    return 0


def _tables(args, kg) -> FeatureTables:
    links = LinkGraph.load(args.links)
    return FeatureTables(salience=build_salience(links), links=links, kg=kg)


def _cmd_train(args) -> int:
    kg = _load_kg(args)
    tables = _tables(args, kg)
    instances = load_training_data(args.data, kg)
    data = build_dataset(instances, tables, groups=args.groups)
    config = TrainConfig(learning_rate=args.lr, epochs=args.epochs, l2=args.l2,
                         tolerance=args.tol, seed=args.seed)
    model = train(data, config=config, groups=args.groups)
    model.save(args.out)
    if args.dump_features:
        rows = [
            (f"{inst.answer}|{','.join(inst.question_entities)}", fv)
            for inst, (fv, _) in zip(instances, data)
        ]
        dump_features(rows, args.dump_features, groups=args.groups)
    return 0


def _cmd_generate(args) -> int:
    kg = _load_kg(args)
    tables = _tables(args, kg)
    bundle, type_salience = _load_bundle(args.lexicons, kg)
    topic = load_topic(args.topic, kg)
    model = DifficultyModel.load(args.model)
    config = GenConfig(seed=args.seed, stopword_path=args.stopwords)
    rng = Random(args.seed)
    records = []
    for _ in range(args.n):
        question = generate_query(kg, topic, bundle, type_salience, tables, model, config, rng)
        records.append(question_record(question, args.seed))
    _write_jsonl(args.out, records)
    return 0


def _cmd_mcq(args) -> int:
    kg = _load_kg(args)
    tables = _tables(args, kg)
    model = DifficultyModel.load(args.model)
    rng = Random(args.seed)
    records = []
    skipped = 0
    with open(args.questions, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            question = question_from_record(json.loads(line))
            try:
                mcq = build_mcq(question, kg, model, tables, k=args.choices,
                                target=args.target, alpha=args.alpha, rng=rng)
            except KGQuizError as exc:
                skipped += 1
                print(f"skipping {question.answer}: {exc}", file=sys.stderr)
                continue
            records.append(mcq_record(mcq, args.seed))
    _write_jsonl(args.out, records)
    if skipped:
        print(f"{skipped} question(s) had no usable distractors", file=sys.stderr)
    return 0


def _eval_dataset(args):
    kg = _load_kg(args)
    tables = _tables(args, kg)
    instances = load_training_data(args.data, kg)
    return build_dataset(instances, tables, groups=ALL_GROUPS)


def _emit_table(text: str, out: str | None) -> None:
    if out:
        atomic_write(out, text)
    else:
        sys.stdout.write(text)


def _cmd_eval_cv(args) -> int:
    data = _eval_dataset(args)
    accuracies, mean = kfold_cv(data, args.k, args.seed, groups=args.groups)
    lines = ["fold\taccuracy"]
    lines += [f"{i}\t{acc}" for i, acc in enumerate(accuracies)]
    lines.append(f"mean\t{mean}")
    _emit_table("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_eval_ablation(args) -> int:
    data = _eval_dataset(args)
    rows = ablation(data, args.k, args.seed)
    lines = ["SAL\tCOH\tTYPE\tAccuracy"]
    for r in rows:
        lines.append("\t".join([
            "yes" if r.sal else "no",
            "yes" if r.coh else "no",
            "yes" if r.type_ else "no",
            str(r.accuracy),
        ]))
    _emit_table("\n".join(lines) + "\n", args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kgquiz",
        description="Generate quiz-style knowledge questions from a knowledge graph.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("mine-types", help="mine type salience from an annotated corpus")
    _add_kg_args(p)
    p.add_argument("--corpus", required=True)
    p.add_argument("--type-lexicon", required=True, help="TSV lemma<TAB>TypeId")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_mine_types)

    p = subs.add_parser("mine-predicates", help="mine predicate paraphrases (distant supervision)")
    _add_kg_args(p)
    p.add_argument("--corpus", required=True)
    p.add_argument("--max-gap", type=int, default=6, help="max words between mentions")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_mine_predicates)

    p = subs.add_parser("mine-surface", help="count entity surface forms")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_mine_surface)

    p = subs.add_parser("salience", help="compute entity salience from a link graph")
    p.add_argument("--links", required=True, help="TSV source<TAB>target")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_salience)

    p = subs.add_parser("train", help="train the difficulty classifier")
    _add_kg_args(p)
    p.add_argument("--links", required=True)
    p.add_argument("--data", required=True,
                   help="TSV label<TAB>answer<TAB>entity,entity,...")
    p.add_argument("--groups", type=_groups_arg, default=ALL_GROUPS,
                   help="comma-separated feature groups (SAL,COH,TYPE)")
    p.add_argument("--lr", type=float, default=0.1)
    p.add_argument("--epochs", type=int, default=1000)
    p.add_argument("--l2", type=float, default=0.01)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--dump-features", default=None, help="optional feature-matrix TSV")
    p.add_argument("--out", required=True, help="model JSON path")
    p.set_defaults(func=_cmd_train)

    p = subs.add_parser("generate", help="generate unique-answer questions for a topic")
    _add_kg_args(p)
    p.add_argument("--links", required=True)
    p.add_argument("--topic", required=True, help="one entity id per line")
    p.add_argument("--model", required=True)
    p.add_argument("--lexicons", required=True,
                   help="directory holding " + ", ".join(sorted(LEXICON_FILES.values())))
    p.add_argument("--stopwords", default=None, help="stopword file (default: packaged list)")
    p.add_argument("--n", type=int, default=5, help="number of questions")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", required=True, help="JSON-lines output")
    p.set_defaults(func=_cmd_generate)

    p = subs.add_parser("mcq", help="extend generated questions with distractors")
    _add_kg_args(p)
    p.add_argument("--links", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--questions", required=True, help="JSON-lines from `generate`")
    p.add_argument("--alpha", type=int, default=10, help="max relaxation distance")
    p.add_argument("--choices", type=int, default=3, help="answer options per question")
    p.add_argument("--target", choices=("easy", "hard"), default="hard")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_mcq)

    p = subs.add_parser("eval", help="evaluation harness")
    eval_subs = p.add_subparsers(dest="eval_command", required=True)

    q = eval_subs.add_parser("cv", help="k-fold cross-validation accuracy")
    _add_kg_args(q)
    q.add_argument("--links", required=True)
    q.add_argument("--data", required=True)
    q.add_argument("--k", type=int, default=10)
    q.add_argument("--seed", type=int, default=42)
    q.add_argument("--groups", type=_groups_arg, default=ALL_GROUPS)
    q.add_argument("--out", default=None, help="TSV output (default stdout)")
    q.set_defaults(func=_cmd_eval_cv)

    q = eval_subs.add_parser("ablation", help="accuracy for all 8 feature-group subsets")
    _add_kg_args(q)
    q.add_argument("--links", required=True)
    q.add_argument("--data", required=True)
    q.add_argument("--k", type=int, default=10)
    q.add_argument("--seed", type=int, default=42)
    q.add_argument("--out", default=None, help="TSV output (default stdout)")
    q.set_defaults(func=_cmd_eval_ablation)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except KGQuizError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
