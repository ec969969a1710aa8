"""Exceptions raised by odontpy.

Every error the package raises on purpose derives from OdontError so callers
(and the command line) can tell them apart from programming errors.
"""


class OdontError(Exception):
    pass


class DimensionError(OdontError, ValueError):
    pass


class NumericError(OdontError, ArithmeticError):
    pass


class EmptyMaskError(OdontError):
    pass


class InvalidClassError(OdontError, ValueError):
    pass


class LabelError(OdontError, ValueError):
    pass


class MeshError(OdontError):
    pass


class MeshParseError(MeshError):
    def __init__(self, line_number, message):
        self.line_number = line_number
        super().__init__('line {}: {}'.format(line_number, message))


class CheckpointError(OdontError):
    pass


class CheckpointFormatError(CheckpointError):
    pass


class CheckpointCRCError(CheckpointError):
    pass


class CheckpointVersionError(CheckpointError):
    pass


class CheckpointTruncatedError(CheckpointError):
    pass


class ConfigError(OdontError, ValueError):
    pass


class DatasetError(OdontError):
    pass


class PatchError(DatasetError, ValueError):
    """Malformed patch file or patch pixels outside [0, 1]."""
