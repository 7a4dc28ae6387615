from webwilss.exceptions import ConfigurationError, DataError, NumericalError


class ClassSetMismatchError(DataError):
    pass


class ShapeMismatchError(DataError):
    pass


class InvalidMapError(DataError):
    pass


class MapFormatError(DataError):
    pass


class InvalidWeightsError(ConfigurationError):
    pass


class NonFiniteLossError(NumericalError):
    pass
