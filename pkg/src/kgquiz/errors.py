"""Domain exceptions shared across the package.

The CLI maps any :class:`KGQuizError` to exit code 1; anything else is a bug.
"""


class KGQuizError(Exception):
    """Base class for all domain errors raised by kgquiz."""


# --- knowledge graph -------------------------------------------------------

class MalformedLine(KGQuizError):
    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no


class CyclicHierarchy(KGQuizError):
    pass


class UnknownType(KGQuizError):
    pass


class UnknownEntity(KGQuizError):
    pass


class EmptyTopic(KGQuizError):
    pass


# --- corpus mining ---------------------------------------------------------

class UnbalancedBracket(KGQuizError):
    def __init__(self, position: int, reason: str = "unbalanced bracket"):
        super().__init__(f"{reason} at column {position}")
        self.position = position


class EmptyEntityId(KGQuizError):
    pass


class EmptySurface(KGQuizError):
    pass


# --- features and link graph -----------------------------------------------

class EmptyGraph(KGQuizError):
    pass


class EmptyQuestionEntities(KGQuizError):
    pass


# --- difficulty model ------------------------------------------------------

class SingleClassData(KGQuizError):
    pass


class DimensionMismatch(KGQuizError):
    pass


# --- question generation ---------------------------------------------------

class NoSalientType(KGQuizError):
    pass


class QueryGenerationFailed(KGQuizError):
    pass


class MissingLexiconEntry(KGQuizError):
    def __init__(self, item: str):
        super().__init__(f"no verbalization available for {item!r}")
        self.item = item


# --- multiple choice -------------------------------------------------------

class NoAdmissibleRelaxation(KGQuizError):
    pass


class NoCandidates(KGQuizError):
    pass


class InsufficientCandidates(KGQuizError):
    def __init__(self, found: int, needed: int):
        super().__init__(f"need {needed} distractor candidates, found {found}")
        self.found = found
        self.needed = needed


class EmptyDistractorSet(KGQuizError):
    pass


# --- evaluation harness ----------------------------------------------------

class TooFewExamples(KGQuizError):
    pass


class LengthMismatch(KGQuizError):
    pass


class AllTied(KGQuizError):
    pass


class RaggedMatrix(KGQuizError):
    pass


class PerfectExpectedAgreement(KGQuizError):
    pass
