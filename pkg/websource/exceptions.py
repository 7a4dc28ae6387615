from webwilss.exceptions import ConfigurationError, DataError


class WebsourceError(DataError):
    pass


class MalformedManifestError(WebsourceError):
    def __init__(self, message: str, path=None, line: int | None = None):
        self.path = path
        self.line = line
        where = ':'.join(str(p) for p in (path, line) if p is not None)
        super().__init__(f'{where}: {message}' if where else message)


class BackendUnavailableError(WebsourceError):
    pass


class MissingCaptionError(WebsourceError):
    pass


class CaptionServiceError(WebsourceError):
    pass


class EmptyMemoryError(WebsourceError):
    pass


class InvalidBudgetError(ConfigurationError):
    pass


class CaptionServiceNotConfiguredError(ConfigurationError):
    pass
