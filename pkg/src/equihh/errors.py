"""Error hierarchy shared across the package.

Mathematical check failures are report content, not exceptions; exceptions
are reserved for malformed or impossible requests.
"""


class EquihhError(Exception):
    """Base class for all package errors."""


class FieldMismatchError(EquihhError):
    """Scalars from incompatible fields were mixed (e.g. two cyclotomic orders)."""


class DivisionError(EquihhError):
    """Inversion of zero."""


class StructureError(EquihhError):
    """A functor, transformation or document references things that do not exist
    or has the wrong shape."""


class WindowError(EquihhError):
    """A degree outside the stored window was requested."""


class CapacityError(EquihhError):
    """A hull cap is too small for a requested direct sum."""


class EmptyCategoryError(EquihhError):
    """An additive hull with cap 0 was requested."""


class TruncationError(EquihhError):
    """A computation needed chains outside a truncated window."""


class InputError(EquihhError):
    """A document failed to parse; carries a location string."""

    def __init__(self, message, location=None):
        self.location = location
        if location:
            message = f"{location}: {message}"
        super().__init__(message)
