"""Exception hierarchy shared by every stage of the pipeline."""


class HybridSumError(Exception):
    """Base class for all errors raised by hybridsum."""


# corpus
class MissingRoot(HybridSumError):
    pass


class EmptyCluster(HybridSumError):
    pass


class NoReference(HybridSumError):
    pass


class CorpusEncodingError(HybridSumError):
    pass


class CorpusFormatError(HybridSumError):
    pass


# preprocess
class EmptyAfterPreprocess(HybridSumError):
    pass


# embed
class EmbeddingError(HybridSumError):
    pass


class ProviderFailure(EmbeddingError):
    pass


class ZeroVector(EmbeddingError):
    pass


class DimMismatch(EmbeddingError):
    pass


class MissingKey(EmbeddingError):
    pass


class EmptyTokens(EmbeddingError):
    pass


# extract
class ZeroNorm(HybridSumError):
    pass


class LengthMismatch(HybridSumError):
    pass


class AlphaOutOfRange(HybridSumError, ValueError):
    pass


class KTooLarge(HybridSumError, ValueError):
    pass


# abstract
class InvalidPromptSpec(HybridSumError, ValueError):
    pass


class EmptyExtract(HybridSumError):
    pass


class EndpointUnreachable(HybridSumError):
    pass


class BadResponse(HybridSumError):
    pass


class RetriesExhausted(HybridSumError):
    pass


# rouge / harness
class EmptyReference(HybridSumError):
    pass


class DuplicateAlpha(HybridSumError, ValueError):
    pass


class ConfigError(HybridSumError, ValueError):
    pass
