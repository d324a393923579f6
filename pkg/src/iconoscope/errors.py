"""Exception hierarchy shared across the engine."""


class IconoscopeError(Exception):
    """Base class for all engine errors."""


class EmptyMaskError(IconoscopeError):
    """A mask operation required at least one set pixel."""


class DimensionMismatchError(IconoscopeError):
    """Masks with different dimensions were combined."""


class DatabaseError(IconoscopeError):
    """Base class for association-database failures."""


class ParseError(DatabaseError):
    """A document could not be parsed at all."""


class SchemaError(DatabaseError):
    """A document parsed but is missing required structure."""


class ValidationError(DatabaseError):
    """A document parsed but violates a content invariant."""


class ProviderUnavailableError(IconoscopeError):
    """A perception provider could not be reached or started."""


class ProtocolError(IconoscopeError):
    """A provider response violates the wire protocol."""


class ImageUnreadableError(IconoscopeError):
    """An image file could not be opened or decoded."""


class IdMismatchError(IconoscopeError):
    """A reading was compared against ground truth for a different image."""


class MissingTruthError(IconoscopeError):
    """A reading or manifest entry has no ground-truth record."""


class ManifestError(IconoscopeError):
    """A corpus manifest or ground-truth file is unusable."""
