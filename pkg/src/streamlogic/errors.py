"""Exception hierarchy shared by every module.

Each exception carries a stable ``code`` string so callers (and the CLI)
can dispatch on the failure kind without matching on messages.
"""


class StreamLogicError(Exception):
    code = "ERROR"

    def __init__(self, message="", **details):
        super().__init__(message or self.code)
        self.details = details


class DegenerateDivisor(StreamLogicError):
    code = "DEGENERATE_DIVISOR"


class EndpointRoot(StreamLogicError):
    code = "ENDPOINT_ROOT"


class UnboundVariable(StreamLogicError):
    code = "UNBOUND_VARIABLE"


class DivByZero(StreamLogicError, ZeroDivisionError):
    code = "DIV_BY_ZERO"


class NotAPowerSeries(StreamLogicError):
    code = "NOT_A_POWER_SERIES"


class InsufficientOrder(StreamLogicError):
    code = "INSUFFICIENT_ORDER"


class NoRealRoot(StreamLogicError):
    code = "NO_REAL_ROOT"


class IrrationalHead(StreamLogicError):
    code = "IRRATIONAL_HEAD"


class ParseError(StreamLogicError):
    code = "PARSE_ERROR"

    def __init__(self, message, line=1, column=1):
        super().__init__(f"{message} (line {line}, column {column})",
                         line=line, column=column)
        self.line = line
        self.column = column


class UnknownIdentifier(ParseError):
    code = "UNKNOWN_IDENTIFIER"


class UnsupportedFragment(StreamLogicError):
    code = "UNSUPPORTED_FRAGMENT"


class BudgetExceeded(StreamLogicError):
    code = "BUDGET_EXCEEDED"


class NotGround(StreamLogicError):
    code = "NOT_GROUND"


class NotASentence(StreamLogicError):
    code = "NOT_A_SENTENCE"


class CircuitError(StreamLogicError):
    code = "CIRCUIT_ERROR"


class AlgebraicLoop(CircuitError):
    code = "ALGEBRAIC_LOOP"


class NotCausal(CircuitError):
    code = "NOT_CAUSAL"


class ArityMismatch(CircuitError):
    code = "ARITY_MISMATCH"
