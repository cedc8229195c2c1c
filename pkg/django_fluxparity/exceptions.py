from enum import Enum


class ErrorType(Enum):
    CONFIGURATION = 1
    INVARIANT_VIOLATION = 2
    NON_CONVERGENCE = 3


class FluxParityError(Exception):
    error_type = None

    def __init__(self, reason=None, source_error=None, code=-1, **extras):
        self.code = self.error_type.value if self.error_type else code
        self.reason = reason
        self.extras = extras

        if source_error and not reason:
            self.reason = str(source_error)
        self.source_error = source_error

    def payload(self) -> dict:
        """
        Machine-readable form of the error, as written to stderr by the
        management command.
        """
        payload = {
            'error': self.error_type.name.lower() if self.error_type else 'error',
            'code': self.code,
            'message': self.reason,
        }
        payload.update(self.extras)
        return payload

    def __str__(self) -> str:
        return self.reason or ''


class ConfigurationError(FluxParityError):
    error_type = ErrorType.CONFIGURATION

    def __init__(self, reason=None, field=None, **kwargs):
        super().__init__(reason, field=field, **kwargs)
        self.field = field


class InvariantViolation(FluxParityError):
    error_type = ErrorType.INVARIANT_VIOLATION


class ConvergenceError(FluxParityError):
    error_type = ErrorType.NON_CONVERGENCE

    def __init__(self, reason=None, drift=None, **kwargs):
        super().__init__(reason, drift=drift, **kwargs)
        self.drift = drift
