"""Exception hierarchy shared by all modules."""


class IsynthError(Exception):
    """Base class of all errors raised by the package."""


class InputError(IsynthError):
    """Malformed user input (formulas, files, assignments)."""


class ResourceLimit(IsynthError):
    """A configured size or time budget was exhausted."""


class ParseError(InputError):
    def __init__(self, message, line=1, column=1, expected=()):
        self.line = line
        self.column = column
        self.expected = tuple(sorted(expected))
        text = f'{line}:{column}: {message}'
        if self.expected:
            text += ' (expected one of: ' + ' '.join(self.expected) + ')'
        super().__init__(text)


class UnknownAtom(InputError):
    pass


class FormatError(InputError):
    pass


class EmptyTraceError(IsynthError):
    pass


class ManagerMismatch(IsynthError):
    pass


class NonPropositional(IsynthError):
    pass


class DfaTooLarge(ResourceLimit):
    pass


class Timeout(ResourceLimit):
    pass


class StepLimit(ResourceLimit):
    pass


class OutOfRegion(IsynthError):
    pass


class AlternationError(IsynthError):
    pass
