"""Exception types shared across the package."""


class SawError(Exception):
    """Base class for all package-specific errors."""


class ExactnessError(SawError):
    """An exact-arithmetic internal invariant failed (non-exact division,
    broken incidence conservation, counter overflow).  Results produced
    after such a failure cannot be trusted, so this is always fatal."""


class StoreMismatchError(SawError):
    """Counter stores are incompatible (different length, bound, symmetry
    mode, or partition), or a shared key disagrees on orbit size."""


class SeriesError(SawError):
    """Malformed series CSV data or a missing table row."""
