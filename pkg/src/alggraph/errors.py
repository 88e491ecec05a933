"""Exception types shared across the package."""


class AlgGraphError(Exception):
    """Base class for all package errors."""


class MalformedTable(AlgGraphError):
    """An operation table has the wrong length or an out-of-range value."""


class NonIdempotent(AlgGraphError):
    """An operation violates f(x,...,x) = x; carries the witness point."""

    def __init__(self, op_name, witness):
        self.op_name = op_name
        self.witness = witness
        super().__init__(f"operation {op_name!r} is not idempotent at x={witness}")


class NotACongruence(AlgGraphError):
    """A partition is not compatible with some operation."""

    def __init__(self, op_name, args_a, args_b):
        self.op_name = op_name
        self.witness = (args_a, args_b)
        super().__init__(
            f"partition not compatible with {op_name!r} on {args_a} vs {args_b}"
        )


class SignatureMismatch(AlgGraphError):
    """Factors of a product disagree on operation names or arities."""


class NotSubdirect(AlgGraphError):
    """A relation does not project onto a full factor."""

    def __init__(self, coordinate):
        self.coordinate = coordinate
        super().__init__(f"relation is not subdirect in coordinate {coordinate}")


class CapExceeded(AlgGraphError):
    """A configured size cap was hit; carries which cap and the limit."""

    def __init__(self, what, limit):
        self.what = what
        self.limit = limit
        super().__init__(f"cap exceeded: {what} > {limit}")


class CloneTruncated(AlgGraphError):
    """A clone-quantified check needed a complete fragment but got a truncated one."""


class NotFoundWithinCap(AlgGraphError):
    """Operation search ended without a witness.

    `exhausted` distinguishes a genuinely exhausted (complete) search, which
    contradicts an existence theorem and is reported with high severity, from a
    cap hit.
    """

    def __init__(self, what, exhausted):
        self.what = what
        self.exhausted = exhausted
        kind = "exhausted search (high severity)" if exhausted else "cap hit"
        super().__init__(f"no {what} found: {kind}")


class SearchExhausted(AlgGraphError):
    """An exhaustive search guaranteed to succeed by a theorem found nothing."""


class FilterStarvation(AlgGraphError):
    """Random generation rejected too many candidates for the requested filters."""

    def __init__(self, accepted, attempts, filters):
        self.accepted = accepted
        self.attempts = attempts
        self.filters = filters
        rate = accepted / attempts if attempts else 0.0
        super().__init__(
            f"filter starvation: {accepted}/{attempts} accepted "
            f"(rate {rate:.4f}) for filters {filters}"
        )
