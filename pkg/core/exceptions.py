# core/exceptions.py

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_USAGE = 2
EXIT_SCHEMA = 3
EXIT_CAP = 4
EXIT_INVARIANT = 5
EXIT_PIPELINE = 6

EXIT_CODES_HELP = (
    'Коды выхода: 0 успех; 1 непредвиденная ошибка; 2 неверные аргументы; '
    '3 нарушение JSON-схемы; 4 превышен лимит перебора; '
    '5 нарушено инвариантное свойство; 6 проверка конвейера не пройдена.'
)


class SimplicialError(Exception):
    """Базовая ошибка движка"""

    exit_code = EXIT_UNEXPECTED
    kind = 'error'

    def __init__(self, message, **details):
        super().__init__(message)
        self.message = message
        self.details = details

    def as_report(self):
        report = {'error': self.kind, 'message': self.message}
        if self.details:
            report['details'] = self.details
        return report


class SchemaError(SimplicialError):
    exit_code = EXIT_SCHEMA
    kind = 'schema_violation'


class EnumerationCapExceeded(SimplicialError):
    """Перебор превысил настроенный лимит"""

    exit_code = EXIT_CAP
    kind = 'cap_exceeded'

    def __init__(self, what, cap, level=None):
        message = f'{what}: перебор превысил лимит {cap}'
        if level is not None:
            message += f' на уровне {level}'
        super().__init__(message, what=what, cap=cap, level=level)
        self.cap = cap
        self.level = level


class InvariantViolation(SimplicialError):
    exit_code = EXIT_INVARIANT
    kind = 'invariant_violation'


class SimplicialIdentityError(InvariantViolation):
    kind = 'simplicial_identity'


class DanglingReferenceError(InvariantViolation):
    kind = 'dangling_reference'


class TruncationError(InvariantViolation):
    kind = 'truncation'


class FunctorialityError(InvariantViolation):
    kind = 'functoriality'


class PosetError(InvariantViolation):
    kind = 'poset'


class CategoryError(InvariantViolation):
    kind = 'category'


class CoverComplexError(InvariantViolation):
    kind = 'cover_complex'


class ChainComplexError(InvariantViolation):
    kind = 'chain_complex'


class IndexOutOfRangeError(InvariantViolation):
    kind = 'index_out_of_range'


class NonMonotoneError(InvariantViolation):
    kind = 'non_monotone'


class PipelineFailure(SimplicialError):
    """Конвейер отработал, но одна из проверок не прошла"""

    exit_code = EXIT_PIPELINE
    kind = 'pipeline_failure'
