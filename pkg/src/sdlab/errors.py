class BudgetExceeded(RuntimeError):
    """A search hit its state or time budget.

    ``lower`` and ``upper`` are the best bounds proven before stopping
    (``None`` when nothing is known).
    """

    def __init__(self, msg="search budget exceeded", lower=None, upper=None, states=0):
        super().__init__(msg)
        self.lower = lower
        self.upper = upper
        self.states = states

    def __str__(self):
        base = super().__str__()
        return f"{base} (proven bounds: lower={self.lower}, upper={self.upper}, states={self.states})"


class ProtocolError(ValueError):
    """A scripted move violated the learning protocol."""


class UnsupportedError(ValueError):
    """The measure is not defined for this kind of class."""
