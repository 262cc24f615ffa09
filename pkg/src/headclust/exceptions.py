"""Exception types raised across the pipeline."""


class HeadclustError(Exception):
    """Base class for data-level failures (bad input files, empty spaces...)."""


class SchemaError(HeadclustError):
    """A required column is missing from an input file."""


class DataError(HeadclustError, ValueError):
    """Input data violates a precondition (undated document, empty feature space...)."""


class FormatError(HeadclustError, ValueError):
    """A serialized artifact (dictionary TSV, matrix file) could not be parsed."""
