"""Exception hierarchy shared by all modules."""


class SelfRocketError(Exception):
    """Base class for every error raised by this package."""


class FormatError(SelfRocketError, ValueError):
    pass


class ParseError(SelfRocketError, ValueError):
    pass


class EmptyInputError(SelfRocketError, ValueError):
    pass


class StratificationError(SelfRocketError, ValueError):
    pass


class ShapeError(SelfRocketError, ValueError):
    pass


class SeriesTooShortError(ShapeError):
    pass


class DegenerateLabelError(SelfRocketError, ValueError):
    pass


class InputError(SelfRocketError, ValueError):
    pass


class ConfigError(SelfRocketError, ValueError):
    pass


class IntegrityError(SelfRocketError):
    """Model file is truncated or fails its checksum."""


class IncompatibleVersionError(SelfRocketError):
    pass


class StageError(SelfRocketError):
    """Wraps a failure inside one stage of the fitting pipeline."""

    def __init__(self, stage, cause):
        self.stage = stage
        self.cause = cause
        super().__init__(f"[{stage}] {type(cause).__name__}: {cause}")
