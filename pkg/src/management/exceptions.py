class UnmixError(Exception):
    exit_code: int = 1

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


class ConfigError(UnmixError, ValueError):
    exit_code = 2


class DataError(UnmixError, ValueError):
    exit_code = 3


class TrainingDivergenceError(UnmixError):
    exit_code = 4

    def __init__(self, term: str, value: float, epoch: int | None = None, batch: int | None = None):
        where = ""
        if epoch is not None:
            where = f" at epoch {epoch}" + (f", batch {batch}" if batch is not None else "")
        super().__init__(f"Loss term '{term}' is non-finite ({value}){where}")
        self.term = term
        self.value = value


class CheckpointError(UnmixError):
    exit_code = 5
