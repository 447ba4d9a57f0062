"""Exception hierarchy for hnnkit.

Every domain failure raises a subclass of HnnkitError so callers (and the
CLI) can map failure kinds to exit codes without string matching.
"""


class HnnkitError(Exception):
    """Base class for all hnnkit domain errors."""


class ParseError(HnnkitError):
    """Malformed group spec, element list, map or report text."""


class NotAssociative(HnnkitError):
    """Multiplication table fails associativity; carries one failing triple."""

    def __init__(self, a: int, b: int, c: int):
        self.triple = (a, b, c)
        super().__init__(f"table is not associative: (a,b,c)=({a},{b},{c}) "
                         f"has (a*b)*c != a*(b*c)")


class NoIdentity(HnnkitError):
    """Multiplication table has no two-sided identity."""


class NoInverse(HnnkitError):
    """Some element has no two-sided inverse."""

    def __init__(self, x: int):
        self.element = x
        super().__init__(f"element {x} has no two-sided inverse")


class UnknownName(HnnkitError):
    """named_group family name is not in the catalog."""


class BadParams(HnnkitError):
    """named_group parameters are invalid for the requested family."""


class CapExceeded(HnnkitError):
    """An enumeration precondition cap (group order, Aut size, probe order)
    was exceeded.  Raise rather than silently truncating."""


class NotASubgroup(HnnkitError):
    """Element set is not a subgroup of the stated parent group."""


class NotConjugate(HnnkitError):
    """normalize_hnn was asked to rewrite a pair whose associated subgroups
    are not conjugate in the base."""


class AlphaDoesNotPreserveH(HnnkitError):
    """gamma_action was given an automorphism with alpha(H) != H."""


class EmptyIsoSet(HnnkitError):
    """The two associated subgroups admit no isomorphism at all."""


class BaseMismatch(HnnkitError):
    """hnn_isomorphic needs both inputs to share one base group (equal
    multiplication tables); rebasing is out of scope."""


class HypothesisNotVerified(HnnkitError):
    """A closed form or certificate rule was requested but its hypotheses do
    not hold for the given input."""


class InfiniteBaseUnsupported(HnnkitError):
    """k-invariant machinery only answers for finite base groups."""
