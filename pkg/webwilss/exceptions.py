class CuratorError(Exception):
    """Root of every error raised by the curator apps"""
    exit_code = 2


class ConfigurationError(CuratorError):
    exit_code = 1


class DataError(CuratorError):
    exit_code = 2


class NumericalError(CuratorError):
    exit_code = 3
