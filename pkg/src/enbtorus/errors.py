"""Exception hierarchy shared by all modules."""


class TorusError(ValueError):
    """Base class for validation errors (CLI exit code 1)."""


class InvalidArgument(TorusError):
    pass


class NotSquarefree(TorusError):
    pass


class NotPrime(TorusError):
    pass


class ZeroElement(TorusError):
    pass


class DenominatorNotOne(TorusError):
    pass


class NotInSubfield(TorusError):
    pass


class NotDivisor(TorusError):
    pass


# --- elliptic normal basis construction ---

class NoCurveFound(TorusError):
    pass


class HasseInfeasible(TorusError):
    pass


class DegenerateTriple(TorusError):
    pass


class NotABasis(TorusError):
    pass


class NormalityFailed(TorusError):
    pass


# --- torus parameters and maps ---

class NotSquarefreeOdd(TorusError):
    pass


class NotPrimeQ(TorusError):
    pass


class CongruenceViolation(TorusError):
    def __init__(self, e, f, g):
        super().__init__(
            f"gcd(Phi_{e}(q), Phi_{f}(q)) = {g} > 1: U_d != 1 for d = lcm({e}, {f})")
        self.e, self.f, self.gcd = e, f, g


class LemmaTwoViolation(TorusError):
    pass


class NNotInvertible(TorusError):
    pass


class NotInTorus(TorusError):
    def __init__(self, index, msg=None):
        super().__init__(msg or f"component {index} is not in its torus")
        self.index = index


# --- key exchange ---

class MalformedStream(TorusError):
    pass


class ZeroComponentEncountered(TorusError):
    def __init__(self, index):
        super().__init__(f"chained state S_{index} has a zero subfield component; "
                         "retry with a fresh seed_aux")
        self.index = index
