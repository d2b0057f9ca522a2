"""Exception hierarchy shared by every module.

CLI exit codes hang off the class: parse errors exit 2, contract
violations 3, depth-limited verdicts 4.
"""


class BexpError(Exception):
    exit_code = 3


class ParseError(BexpError, ValueError):
    exit_code = 2

    def __init__(self, message, text=None, position=None):
        self.text = text
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class ContractViolation(BexpError):
    exit_code = 3


class BumpOutOfRange(ContractViolation):
    pass


class NotAdmissible(ContractViolation):
    pass


class BaseOutOfRange(ContractViolation):
    pass


class OutOfDomain(ContractViolation):
    pass


class ZeroInput(ContractViolation):
    pass


class NoRootFound(ContractViolation):
    pass


class SignContractViolated(ContractViolation):
    pass


class NotInAPrime(ContractViolation):
    pass


class ResidualTooLarge(ContractViolation):
    pass


class PrefixMismatch(ContractViolation):
    pass


class LadderNotMonotone(ContractViolation):
    pass


class LengthGuard(ContractViolation):
    pass


class GoldenRatioExcluded(ContractViolation):
    """The generalized golden ratio never carries a two-expansion point."""


class UndecidedAtDepth(BexpError):
    exit_code = 4
