"""Exception hierarchy. Every domain failure derives from ParamodError."""


class ParamodError(ValueError):
    """Base class for domain errors; the CLI maps these to exit code 1."""

    kind = "domain-error"

    def to_json(self):
        return {"type": self.kind, "message": str(self)}


class InvalidInputError(ParamodError):
    kind = "invalid-input"


class InvalidPolarizationError(ParamodError):
    kind = "invalid-polarization"


class NotPrimitiveError(InvalidInputError):
    kind = "not-primitive"


class NotUnimodularError(ParamodError):
    kind = "not-unimodular"


class RankError(ParamodError):
    kind = "rank"


class IsotropyError(ParamodError):
    kind = "isotropy"

    def __init__(self, i, j, value):
        super().__init__(f"rows {i} and {j} pair to {value}, not 0")
        self.pair = (i, j)
        self.value = value

    def to_json(self):
        out = super().to_json()
        out.update(pair=list(self.pair), value=self.value)
        return out


class InfeasibleTupleError(ParamodError):
    kind = "infeasible-tuple"


class InvalidProductError(ParamodError):
    kind = "invalid-product"


class UnsupportedPolarizationError(ParamodError):
    kind = "unsupported-polarization"


class MembershipError(ParamodError):
    kind = "not-a-member"


class InvariantBreach(ParamodError):
    """An internal step produced a value the construction rules out."""

    kind = "invariant-breach"

    def __init__(self, message, tape=None):
        super().__init__(message)
        self.tape = tape

    def to_json(self):
        out = super().to_json()
        if self.tape is not None:
            out["tape"] = self.tape.to_json()
        return out
