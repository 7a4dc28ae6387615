from webwilss.exceptions import ConfigurationError, DataError


class SemfilterError(DataError):
    pass


class WordnetParseError(SemfilterError):
    def __init__(self, message: str, path=None, line: int | None = None):
        self.path = path
        self.line = line
        where = ':'.join(str(p) for p in (path, line) if p is not None)
        super().__init__(f'{where}: {message}' if where else message)


class HypernymCycleError(SemfilterError):
    pass


class UnknownLemmaError(SemfilterError):
    pass


class InvalidFilterConfigError(ConfigurationError):
    pass


class TaggerUnavailableError(ConfigurationError):
    pass
