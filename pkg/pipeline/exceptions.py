from webwilss.exceptions import ConfigurationError, DataError, NumericalError


class PlanError(ConfigurationError):
    def __init__(self, message: str, path=None, line: int | None = None):
        self.path = path
        self.line = line
        where = ':'.join(str(p) for p in (path, line) if p is not None)
        super().__init__(f'{where}: {message}' if where else message)


class NoSurvivorsError(DataError):
    def __init__(self, class_name: str):
        self.class_name = class_name
        super().__init__(f'no crawled record survived for class `{class_name}`')


class TrainingManifestError(DataError):
    pass


class ReportError(DataError):
    pass


class ToyModelError(DataError):
    pass


class MissingDiscriminatorError(ConfigurationError):
    pass


class EmptyCorpusError(DataError):
    pass


class ToyDivergenceError(NumericalError):
    def __init__(self, epoch: int, detail: str = ''):
        self.epoch = epoch
        super().__init__(f'toy training diverged at epoch {epoch}'
                         + (f': {detail}' if detail else ''))


class DatasetSourceError(ConfigurationError):
    pass
