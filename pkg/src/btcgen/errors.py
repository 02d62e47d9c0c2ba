"""Exception hierarchy. Every error carries a short machine-readable ``code``."""

from __future__ import annotations


class BTCError(Exception):
    code = "error"


class InvalidLabelError(BTCError, ValueError):
    code = "invalid-label"


class InvalidNodeError(BTCError, KeyError):
    code = "invalid-node"

    def __str__(self) -> str:  # KeyError quotes its argument otherwise
        return str(self.args[0]) if self.args else self.code


class NotADagError(BTCError):
    code = "not-a-dag"


class EmptyNetworkError(BTCError):
    code = "empty-network"


class NoParentError(BTCError):
    code = "no-parent"


class InvalidLeafError(BTCError, ValueError):
    code = "invalid-leaf"


class CannotReduceError(BTCError):
    code = "cannot-reduce"


class InvalidLabelingError(BTCError, ValueError):
    code = "invalid-labeling"


class InvalidPairMemberError(BTCError, ValueError):
    code = "invalid-pair-member"


class InfeasiblePairError(BTCError, ValueError):
    code = "infeasible"


class LabelClashError(BTCError, ValueError):
    code = "label-clash"


class InsufficientSamplesError(BTCError, ValueError):
    code = "insufficient-samples"


class TooLargeError(BTCError):
    code = "too-large"


class NotBTCError(BTCError):
    """Raised when a parsed document is well formed but not a BTC network."""

    code = "not-btc"

    def __init__(self, report):
        self.report = report
        rules = ", ".join(sorted({rule for rule, _ in report.violations}))
        super().__init__(f"not a BTC network: {rules}")


class ParseError(BTCError, ValueError):
    code = "syntax-error"

    def __init__(self, message: str, line: int, column: int):
        self.line = line
        self.column = column
        super().__init__(f"{message} (line {line}, column {column})")
