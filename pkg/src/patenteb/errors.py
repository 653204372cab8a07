"""Exception hierarchy shared across the toolkit."""


class PatentebError(Exception):
    """Base class for all toolkit errors."""


# --- corpus ---------------------------------------------------------------

class MissingFile(PatentebError):
    pass


class SchemaMismatch(PatentebError):
    """Corpus file does not match the documented column layout.

    The message names the offending column.
    """


class DuplicateFamilyId(PatentebError):
    pass


class EmptyText(PatentebError):
    """All retained sections of an assembled text are empty."""


# --- domains --------------------------------------------------------------

class NoIpcCodes(PatentebError):
    pass


class EmptyIpcSet(PatentebError):
    pass


class StratumTooSmall(PatentebError):
    """A stratum is too small to honor all three splits."""


# --- fragments ------------------------------------------------------------

class FragmentIsWholeText(PatentebError):
    """Fragment removal would empty the target text."""


# --- taskgen --------------------------------------------------------------

class NoEligibleCandidates(PatentebError):
    pass


class InsufficientPositives(PatentebError):
    """Corpus cannot reach the requested positive rate at the requested size."""


class DomainTooSmall(PatentebError):
    pass


class IoError(PatentebError):
    pass


# --- embed_io -------------------------------------------------------------

class UnknownTaskRole(PatentebError):
    pass


class ProviderUnreachable(PatentebError):
    pass


class DimensionMismatch(PatentebError):
    pass


class MissingEmbedding(PatentebError):
    pass


class CorruptFile(PatentebError):
    pass


# --- metrics --------------------------------------------------------------

class EmptyRelevantSet(PatentebError):
    pass


class DegenerateInput(PatentebError):
    """A correlation input vector is constant."""


class ClassMissingFromSubset(PatentebError):
    pass


class LengthMismatch(PatentebError):
    pass


class TooFewPoints(PatentebError):
    pass


class WrongTaskCount(PatentebError):
    pass


# --- losses ---------------------------------------------------------------

class BatchTooSmall(PatentebError):
    pass


class NoValidAnchors(PatentebError):
    pass


# --- distill --------------------------------------------------------------

class UnknownStudent(PatentebError):
    pass


class InsufficientData(PatentebError):
    pass


class DimMismatch(PatentebError):
    pass


class ShapeMismatch(PatentebError):
    pass


# --- ablate ---------------------------------------------------------------

class BadDimension(PatentebError):
    pass


class ProviderLacksLayerCap(PatentebError):
    pass
