"""Exception hierarchy shared by the pipeline.

The CLI maps these to exit codes: DataError -> 3, NumericError -> 4.
"""


class PipelineError(Exception):
    """Base class for pipeline failures."""


class DataError(PipelineError):
    """Malformed, missing, or inconsistent input data."""


class NumericError(PipelineError):
    """A numeric procedure cannot produce a valid result."""
