from webwilss.exceptions import ConfigurationError, DataError, NumericalError


class InvalidLayerDimsError(ConfigurationError):
    pass


class InvalidTrainConfigError(ConfigurationError):
    pass


class DimensionMismatchError(DataError):
    pass


class EmptyClassError(DataError):
    pass


class CheckpointError(DataError):
    pass


class DivergenceError(NumericalError):
    def __init__(self, epoch: int, loss: float):
        self.epoch = epoch
        self.loss = loss
        super().__init__(f'non-finite loss {loss} at epoch {epoch}')
