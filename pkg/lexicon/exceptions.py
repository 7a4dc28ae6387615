from webwilss.exceptions import ConfigurationError, DataError


class LexiconError(DataError):
    pass


class LexiconParseError(LexiconError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f'line {line}: {message}'
        super().__init__(message)


class DuplicateFormError(LexiconError):
    pass


class EmptyWordSetError(LexiconError):
    pass


class UnknownClassError(ConfigurationError):
    pass


class InvalidLabelError(DataError):
    pass
