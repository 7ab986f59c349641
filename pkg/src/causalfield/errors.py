"""Exception types shared across the package.

Every failure mode that callers are expected to handle gets its own class,
so scripts can distinguish a structural rejection (not a factor, not
standard) from a genuine numerical inconsistency.
"""


class CausalFieldError(Exception):
    """Base class for all package errors."""


class ModelError(CausalFieldError):
    """Invalid lattice specification or model mismatch between operands."""


class GridError(CausalFieldError):
    """Incompatible sampling grids, missing margin, or malformed support."""


class CausalOrderError(CausalFieldError):
    """Operands are not causally ordered the way the operation requires."""


class NonStandard(CausalFieldError):
    """Real subspace fails the standardness rank conditions (L meets iL)."""


class NotAFactor(CausalFieldError):
    """Subspace has a nontrivial centre, e.g. the fixed-point set of
    conjugation where the modular operator is the identity; no cutting
    projection exists there."""


class ConsistencyError(CausalFieldError):
    """An identity that holds by theorem failed beyond tolerance.

    This always signals an implementation or conditioning bug, never bad
    user input, so it is kept separate from the structural errors above.
    """


class RegionExhausted(CausalFieldError):
    """A shrinking region became empty before the sweep finished."""


class SchemaError(CausalFieldError):
    """Configuration file failed validation against the published schema."""
