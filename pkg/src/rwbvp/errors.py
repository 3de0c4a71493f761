class WalkTruncatedError(RuntimeError):
    """A walk was still inside the domain after ``max_steps`` steps.

    ``partial`` holds whatever was produced (a :class:`WalkOutcome` or a
    :class:`WalkBatch`).  Usually a sign that ``h`` is too small for the domain.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class SingularFitError(ValueError):
    pass


class BracketError(ValueError):
    pass
