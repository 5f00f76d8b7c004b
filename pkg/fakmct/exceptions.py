class InputError(Exception):
    pass


class WorkloadFormatError(InputError):
    pass


class InvalidParameters(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class AlgorithmError(Exception):
    pass


class CategoryCapacityExceeded(AlgorithmError):
    pass


class EmptyCellError(AlgorithmError):
    pass


class FixtureMismatch(Exception):
    pass
