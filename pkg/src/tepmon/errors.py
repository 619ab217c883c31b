"""Exception types shared across the package."""


class TepmonError(Exception):
    """Base class for all package errors."""


class MissingFile(TepmonError):
    pass


class MalformedRow(TepmonError):
    def __init__(self, line: int, reason: str):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")


class EmptySeries(TepmonError):
    pass


class InsufficientData(TepmonError):
    pass


class AllColumnsDegenerate(TepmonError):
    pass


class ConvergenceFailure(TepmonError):
    pass


class DegenerateSpectrum(TepmonError):
    pass


class InsufficientSamples(TepmonError):
    pass


class SchemaMismatch(TepmonError):
    pass


class CorruptDocument(TepmonError):
    pass


class NonFiniteInput(TepmonError):
    pass


class DomainError(TepmonError):
    pass


class OutOfOrderSample(TepmonError):
    pass


class MissingDataset(TepmonError):
    def __init__(self, fault_id: int):
        self.fault_id = fault_id
        super().__init__(f"no dataset for fault {fault_id}")


class UnknownFault(TepmonError):
    pass


class MissingCorpus(TepmonError):
    pass


class WrongArity(TepmonError):
    pass


class BackendUnavailable(TepmonError):
    pass


class ContextOverflow(TepmonError):
    pass
