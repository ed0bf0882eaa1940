"""Exception types shared across the package."""

import numpy as np


class DomainError(ValueError):
    """An input lies outside the region where a quantity is defined."""


class ConfigError(ValueError):
    """A configuration document is malformed or inconsistent."""


class NotPositiveDefinite(np.linalg.LinAlgError):
    """``lambda * I_n + X X^T`` is not positive definite beyond tolerance.

    The offending smallest eigenvalue is kept on ``min_eigenvalue``.
    """

    def __init__(self, min_eigenvalue, tolerance):
        self.min_eigenvalue = float(min_eigenvalue)
        self.tolerance = float(tolerance)
        super().__init__(
            f"regularized Gram matrix is not positive definite: smallest "
            f"eigenvalue {self.min_eigenvalue:.6g} <= tolerance {self.tolerance:.3g} "
            f"(lambda too negative for this design)"
        )
