"""Exception hierarchy.

Every error carries a short machine-readable ``reason`` slug that the CLI
copies into its JSON error payloads.
"""


class RuledSurfError(Exception):
    reason = "error"

    def __init__(self, message="", *, position=None, reason=None):
        super().__init__(message)
        self.position = position
        if reason is not None:
            self.reason = reason

    def to_dict(self):
        d = {"error": type(self).__name__, "reason": self.reason, "message": str(self)}
        if self.position is not None:
            d["position"] = self.position
        return d


# jets
class JetError(RuledSurfError):
    reason = "jet-error"


class DivisionBySingularJet(JetError):
    reason = "division-by-singular-jet"


class SqrtOfNonpositive(JetError):
    reason = "sqrt-of-nonpositive"


class OrderExceeded(JetError):
    reason = "order-exceeded"


class NormalizeZeroVector(JetError):
    reason = "normalize-zero-vector"


# expressions
class ExpressionError(RuledSurfError):
    reason = "expression-error"


class LexError(ExpressionError):
    reason = "lex-error"


class ParseError(ExpressionError):
    reason = "parse-error"

    def __init__(self, message="", *, position=None, expected=None):
        super().__init__(message, position=position)
        self.expected = expected

    def to_dict(self):
        d = super().to_dict()
        if self.expected is not None:
            d["expected"] = self.expected
        return d


class EvalDomainError(ExpressionError):
    reason = "eval-domain-error"


# analysis
class AnalysisError(RuledSurfError):
    reason = "analysis-error"


class DegenerateDirector(AnalysisError):
    reason = "degenerate-director"


class NotFiniteMultiplicity(AnalysisError):
    reason = "cylinder-up-to-order-N"


class FrameUndefined(AnalysisError):
    """The director derivative vanishes at a point other than the germ point."""

    reason = "frame-undefined-off-germ"


class StrictionUndefined(AnalysisError):
    reason = "striction-undefined"


class NotAFrontal(AnalysisError):
    reason = "not-a-frontal"


class NormalUndefined(AnalysisError):
    reason = "normal-undefined"


class SingularPointGiven(AnalysisError):
    reason = "singular-point-given"


class UnstableEstimate(AnalysisError):
    reason = "unstable-estimate"


# input / output
class SceneError(RuledSurfError):
    reason = "invalid-scene"


class UnknownExample(SceneError):
    reason = "unknown-example"


class InvalidResolution(SceneError):
    reason = "invalid-resolution"
