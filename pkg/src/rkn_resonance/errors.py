"""Exception types raised by the analysis routines."""


class RknError(Exception):
    """Base class for all errors raised by this package."""


class CatalogError(RknError, KeyError):
    """Unknown method name."""

    def __init__(self, name, valid):
        self.name = name
        self.valid = tuple(valid)
        super().__init__(f"unknown method {name!r}; valid names: {', '.join(self.valid)}")

    def __str__(self):
        return self.args[0]


class TableauError(RknError, ValueError):
    """Malformed tableau (dimensions, non-finite entries, bad file)."""


class SingularMatrixError(RknError, ArithmeticError):
    """Stage matrix singular at step size ``h``."""

    def __init__(self, h, detail=""):
        self.h = h
        msg = f"singular stage matrix at h={h!r}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class PoleError(RknError, ArithmeticError):
    """Stability function evaluated at a pole."""

    def __init__(self, z):
        self.z = z
        super().__init__(f"stability function has a pole at z={z!r}")


class NoUnitModulusAngle(RknError, ValueError):
    """The transition matrix does not have unit-modulus eigenvalues (damped method)."""


class OutOfRangeError(RknError, ValueError):
    """Real eigenvalues: step size beyond the oscillatory range."""


class NoWedgeError(RknError, ValueError):
    """No first-order instability wedge (complex or degenerate roots)."""


class UnsupportedMethodError(RknError, ValueError):
    """The strained-parameter analysis assumptions fail for this method."""


class DegenerateTrajectoryError(RknError, ValueError):
    """Trajectory unusable for growth fitting."""
