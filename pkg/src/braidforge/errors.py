"""Exception hierarchy. Validation errors map to CLI exit 2, computation
failures to exit 3."""


class BraidforgeError(Exception):
    pass


class ValidationError(BraidforgeError):
    pass


class GraphFormatError(ValidationError):
    pass


class SubdivisionError(ValidationError):
    pass


class MatchingError(ValidationError):
    pass


class ComputationError(BraidforgeError):
    pass


class RewriteLimitError(ComputationError):
    pass


class PhysicalSolveError(ComputationError):
    def __init__(self, message, unsolved=(), suggestions=()):
        super().__init__(message)
        self.unsolved = tuple(unsolved)
        self.suggestions = tuple(suggestions)


class NoRepresentationFound(ComputationError):
    pass
