"""kgquiz: quiz-style knowledge questions from a knowledge graph.

Pipeline stages: load a KG, mine verbalization lexicons and type salience
from an annotated corpus, compute entity salience/coherence from a link
graph, train a logistic-regression difficulty classifier, generate
unique-answer triple-pattern queries, verbalize them, and optionally attach
multiple-choice distractors with quantified confusability.
"""

from . import errors
from .corpus import (
    EntityLexicon,
    Mention,
    PredicateLexicon,
    TypeLexicon,
    TypeSalienceTable,
    disambiguate_type,
    load_corpus,
    mine_predicate_phrases,
    mine_surface_forms,
    mine_type_salience,
    npmi,
    parse_corpus_line,
)
from .evalstats import (
    AblationRow,
    ablation,
    cohen_kappa,
    fleiss_kappa,
    kendall_tau,
    kfold_cv,
    weighted_mean,
)
from .features import (
    ALL_GROUPS,
    FeatureTables,
    LinkGraph,
    QuestionInstance,
    SalienceTable,
    build_salience,
    coherence,
    extract_features,
    feature_names,
)
from .generate import (
    GenConfig,
    GeneratedQuestion,
    generate_query,
    is_redundant_type,
    load_stopwords,
    select_answer_type,
    surface_overlap,
)
from .kg import (
    KnowledgeGraph,
    Query,
    Topic,
    TriplePattern,
    VAR,
    load_kg,
    load_topic,
    save_kg,
)
from .mcq import (
    MCQ,
    RelaxedQuery,
    build_mcq,
    candidate_distractors,
    confusability,
    mcq_difficulty,
    relax,
    set_confusability,
)
from .model import (
    DifficultyModel,
    TrainConfig,
    build_dataset,
    classify,
    load_training_data,
    train,
)
from .verbalize import VerbalizationBundle, verbalize_query, verbalize_triple

__version__ = "0.1.0"
