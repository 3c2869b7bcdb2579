"""Exception hierarchy shared by the library and the CLI.

Each class carries a short machine-readable ``code`` and the process exit
code the CLI maps it to.  Input/format problems exit 2, dimensionality
mismatches exit 3, paired-shape mismatches exit 4 and statistical
underflow (too few usable records) exits 5.
"""


class XManifoldError(Exception):
    """Base class for all library errors."""

    code = "error"
    exit_code = 1


class InputError(XManifoldError):
    """Missing, empty or unreadable input."""

    code = "bad_input"
    exit_code = 2


class BadMagicError(InputError):
    code = "bad_magic"


class TruncatedFileError(InputError):
    code = "truncated"


class UnsupportedDtypeError(InputError):
    code = "bad_dtype"


class NonFiniteValueError(InputError):
    code = "non_finite"


class FormatError(InputError):
    """Malformed text input (CSV and config files)."""

    code = "bad_format"


class DimensionError(XManifoldError):
    """Feature dimensionality incompatible with the requested operation."""

    code = "dim_mismatch"
    exit_code = 3


class ShapeMismatchError(XManifoldError):
    """Paired point sets with incompatible row counts."""

    code = "shape_mismatch"
    exit_code = 4


class InsufficientDataError(XManifoldError):
    """Not enough usable records for a statistic."""

    code = "insufficient_data"
    exit_code = 5
