class EcotradeError(ValueError):
    """Base class for all domain errors raised by this package."""


class ParseError(EcotradeError):
    def __init__(self, message: str, line: int, source: str | None = None):
        self.line = line
        self.source = source
        where = f"{source}:{line}" if source else f"line {line}"
        super().__init__(f"{where}: {message}")


class EmptyYearError(EcotradeError):
    pass


class DegenerateYearError(EcotradeError):
    pass


class NothingToAnalyzeError(EcotradeError):
    pass


class IsoclineUndefinedError(EcotradeError):
    pass
