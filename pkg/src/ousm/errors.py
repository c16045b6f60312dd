"""Exception types shared across the package."""


class InvalidArgument(ValueError):
    """A parameter violates the documented precondition."""


class InvalidData(ValueError):
    """Input data is malformed (non-finite values, inconsistent lengths)."""


class TrainingDiverged(RuntimeError):
    """A loss or gradient became non-finite during training."""

    def __init__(self, message, epoch=None):
        super().__init__(message)
        self.epoch = epoch
