"""Exception hierarchy.

Contract violations (bad inputs, broken preconditions) map to CLI exit code 2,
budget exhaustion to exit code 3.
"""


class ChuError(Exception):
    """Base class for every error raised by the library."""

    exit_code = 1


class ContractViolation(ChuError):
    exit_code = 2


class FormatError(ContractViolation):
    pass


class AlphabetMismatch(ContractViolation):
    pass


class CompositionMismatch(ContractViolation):
    pass


class CategoryMembershipViolated(ContractViolation):
    pass


class ForwardNotInjective(ContractViolation):
    pass


class NotMonic(ContractViolation):
    pass


class NotMonicInIC(NotMonic):
    pass


class NotStronglyFinite(ContractViolation):
    pass


class EmptyApexAttributes(ContractViolation):
    pass


class InvalidLeg(ContractViolation):
    pass


class InvalidCocone(ContractViolation):
    pass


class NotBiextensionalChain(ContractViolation):
    pass


class NotStrictlyIncreasing(ContractViolation):
    pass


class WindowExhausted(ContractViolation):
    pass


class BudgetExceeded(ChuError):
    exit_code = 3
