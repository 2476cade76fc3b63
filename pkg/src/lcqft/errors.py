class LcqftError(Exception):
    """Base class for all errors raised by this package."""


class SiteError(LcqftError, IndexError):
    pass


class SpacetimeMismatch(LcqftError, ValueError):
    pass


class InvalidSpacetime(LcqftError, ValueError):
    pass


class NotAdmissible(LcqftError, ValueError):
    pass


class CausallyRelatedImages(LcqftError, ValueError):
    """The images of two embeddings are causally related, so they cannot be glued."""


class SlabTooThin(LcqftError, ValueError):
    pass


class WrongComponentCount(LcqftError, ValueError):
    pass


class PerturbationNotBetweenSlabs(LcqftError, ValueError):
    pass


class UnsupportedPerturbationType(LcqftError, NotImplementedError):
    pass


class ModelMismatch(LcqftError, ValueError):
    pass


class TruncationError(LcqftError, ValueError):
    pass


class CategoryMismatch(LcqftError, ValueError):
    pass


class AnsatzTooSmall(LcqftError, ValueError):
    pass


class ConfigParse(LcqftError, ValueError):
    pass


class SchemaViolation(LcqftError, ValueError):
    pass
