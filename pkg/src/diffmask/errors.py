"""Exception hierarchy.

``DataError`` subclasses signal bad input content, ``IoError`` unreadable
files, ``ConfigError`` invalid settings. The CLI maps them to exit codes
3, 2 and 1 respectively.
"""


class DiffmaskError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(DiffmaskError):
    def __init__(self, errors):
        if isinstance(errors, str):
            errors = [errors]
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


class IoError(DiffmaskError, OSError):
    pass


class DataError(DiffmaskError):
    pass


# corpus_io
class EmptyDocument(DataError):
    pass


class EmptyCorpus(DataError):
    pass


class InvalidGrouping(DataError):
    pass


class InvalidVectors(DataError):
    pass


# background
class ParseError(DataError):
    def __init__(self, line, message="malformed line"):
        self.line = line
        super().__init__(f"line {line}: {message}")


class EmptyBackground(DataError):
    pass


# tficf
class InsufficientSeeds(DataError):
    def __init__(self, found, k):
        self.found = found
        self.k = k
        super().__init__(f"only {found} eligible seed words, {k} requested")


# embeddings
class EmptyEmbeddings(DataError):
    pass


class DimError(DataError):
    pass


# masker
class NoSeeds(DataError):
    pass


class DegenerateAttention(DataError):
    pass


class LengthError(DataError):
    pass


class SpanError(DataError):
    pass


class NoVocabulary(DataError):
    pass


# analysis
class UnknownDocument(DataError):
    pass


class NotNearestNeighbor(DataError):
    pass


class DegenerateSeries(DataError):
    pass


class EmptyPlans(DataError):
    pass
