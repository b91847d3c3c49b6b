"""
Numerical tolerances shared by the core modules.

``CHOI_DYNAMICS_TOL`` overrides the PSD tolerance for the whole process.
"""

import os

from loguru import logger

from .errors import ValidationError

ENV_TOL = "CHOI_DYNAMICS_TOL"

PSD_TOL = 1e-9          # relative to max(1, ||M||_max)
RANK_TOL = 1e-10        # relative to sigma_max * max(rows, cols)
CUET_TOL = 1e-10
UNITARY_TOL = 1e-12
HERMITIAN_TOL = 1e-9
BISECTION_XTOL = 1e-13
PSD_SHIFT_EPS = 1e-6    # shift used when making CUET members positive
MARGIN_REL = 1e-6       # margin above a0 in PPT construction


def default_tolerance() -> float:
    """Return the PSD tolerance, honouring the environment override."""
    raw = os.environ.get(ENV_TOL)
    if raw is None or raw.strip() == "":
        return PSD_TOL
    try:
        value = float(raw)
    except ValueError as e:
        logger.error(f"Invalid {ENV_TOL}={raw!r}")
        raise ValidationError(f"{ENV_TOL} must be a positive real, got {raw!r}") from e
    if not value > 0:
        raise ValidationError(f"{ENV_TOL} must be a positive real, got {raw!r}")
    logger.debug(f"Tolerance overridden from environment: {value}")
    return value
