class CocycleLabError(Exception):
    """Base class; ``kind`` is the name reported by the CLI."""

    @property
    def kind(self) -> str:
        return type(self).__name__


class UnsupportedFamily(CocycleLabError):
    pass


class CapExceeded(CocycleLabError):
    pass


class NotFiniteIndex(CocycleLabError):
    pass


class InvalidGroup(CocycleLabError):
    pass


class RelatorViolation(CocycleLabError):
    def __init__(self, message, relator=None, residual=None):
        super().__init__(message)
        self.relator = relator
        self.residual = residual


class NoCertificate(CocycleLabError):
    pass


class NoConvergence(CocycleLabError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class NotDirect(CocycleLabError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class BudgetExceeded(CocycleLabError):
    pass


class NormPreconditionFailed(CocycleLabError):
    pass


class PreconditionFailed(CocycleLabError):
    pass


class HypothesisFailed(CocycleLabError):
    def __init__(self, message, check=None):
        super().__init__(message)
        self.check = check


class SchemaError(CocycleLabError):
    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(f"{p}: {m}" for p, m in self.errors))
