# config.py
"""
Application configuration settings.
"""
import logging
import os
from typing import Dict, Optional, Tuple


def _env_int(name: str) -> Optional[int]:
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return None
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"{name} must be an integer, got {raw!r}") from None


class Config:
    """
    Configuration class for the Frobenius Workbench.

    This class holds the evaluation limits, fuzzing defaults, runtime
    self-check thresholds and logging settings used across the services.
    """

    # Evaluation Configuration
    DEFAULT_MAX_WIDTH: int = 4
    """Default cap on the number of wires at any diagram interface."""

    MAX_WIDTH_ENV: str = "FROB_MAX_WIDTH"
    """Environment variable overriding the evaluation width cap."""

    LARGE_ALGEBRA_DIM: int = 20
    """Algebras above this dimension get `LARGE_ALGEBRA_MAX_WIDTH`."""

    LARGE_ALGEBRA_MAX_WIDTH: int = 2
    """Width cap for large algebras (27-dimensional u_q(sl2) at n=3)."""

    IDENTITY_MAX_WIDTH: int = 3
    """Width needed by the three-legged identities of the identity suite."""

    SELF_CHECK_MAX_DIM: int = 64
    """Dimension above which O(N^3) runtime cross-checks are skipped."""

    MAX_CYCLOTOMIC_ORDER: int = 12
    """Largest n accepted for the cyclotomic field Q(zeta_n)."""

    # Series Configuration
    DEFAULT_TERMS: int = 6
    """Number of F-dimensions reported by default."""

    SERIES_CHECK_TERMS: int = 11
    """Closed forms are checked against dim_0 .. dim_10."""

    # Spider Fuzz Configuration
    SPIDER_COUNT: int = 200
    """Number of random diagrams per fuzz run."""

    SPIDER_MAX_GENERATORS: int = 8
    """Maximum number of non-identity generators in a random diagram."""

    SPIDER_SEED: int = 0
    """Default seed of the fuzz run."""

    SPIDER_MAX_RETRIES: int = 1000
    """Rejection cap per sampled diagram."""

    SPIDER_MUL_COMUL_BIAS: float = 0.6
    """Probability mass given to Mul/Comul when sampling a generator."""

    # CLI Configuration
    BUILTIN_NAMES: Dict[str, str] = {
        "matrix:d": "matrix algebra M_d with the trace form",
        "blocks:d1+d2+...": "semisimple sum of matrix blocks, special symmetric form",
        "group:s3": "group algebra of S3 with the delta_e form",
        "group:cyclic:n": "group algebra of Z/n with the delta_e form",
        "uqsl2:n": "reduced quantum group u_q(sl2) at a primitive n-th root, integral form",
        "taft:n": "Taft algebra generated by K, F, integral form",
    }
    """Builtin name patterns accepted by `--builtin`."""

    REPORT_FORMATS: Tuple[str, ...] = ("json", "text", "xlsx")
    """Supported report output formats."""

    EXIT_OK: int = 0
    EXIT_CHECK_FAILED: int = 1
    EXIT_USAGE: int = 2
    EXIT_DEGENERATE: int = 3

    # Logging Configuration
    LOG_LEVEL: str = os.getenv("FROB_LOG_LEVEL", "WARNING").upper()
    """Logging level name, fetched from environment variables."""

    LOG_FORMAT: str = "%(asctime)s %(levelname)s %(name)s: %(message)s"
    """Format string handed to logging.basicConfig."""

    @classmethod
    def max_width(cls) -> int:
        """Width cap honouring the `FROB_MAX_WIDTH` override."""
        override = _env_int(cls.MAX_WIDTH_ENV)
        return override if override is not None else cls.DEFAULT_MAX_WIDTH

    @classmethod
    def width_for_dimension(cls, dim: int) -> int:
        """Width cap for an algebra of the given dimension."""
        width = cls.max_width()
        if dim > cls.LARGE_ALGEBRA_DIM and _env_int(cls.MAX_WIDTH_ENV) is None:
            width = min(width, cls.LARGE_ALGEBRA_MAX_WIDTH)
        return width

    @classmethod
    def validate(cls) -> None:
        """
        Validates that essential configuration variables are sensible.

        Raises:
            ValueError: If the width cap is not positive, the log level is
                        unknown, or the cyclotomic bound is below 2.
        """
        if cls.max_width() < 1:
            raise ValueError(f"{cls.MAX_WIDTH_ENV} must be at least 1")
        if not isinstance(logging.getLevelName(cls.LOG_LEVEL), int):
            raise ValueError(f"Unknown log level {cls.LOG_LEVEL!r}")
        if cls.MAX_CYCLOTOMIC_ORDER < 2:
            raise ValueError("MAX_CYCLOTOMIC_ORDER must be at least 2")
        if not 0.0 < cls.SPIDER_MUL_COMUL_BIAS < 1.0:
            raise ValueError("SPIDER_MUL_COMUL_BIAS must lie strictly between 0 and 1")


# Instantiate for easy access
CONFIG: Config = Config()
"""An instance of the Config class for easy access to configuration settings."""

VERSION: str = "1.0.0"
"""Current version of the application."""

APP_NAME: str = "FWB"
"""Short name of the application."""

EXE_NAME: str = "fwb"
"""Name of the executable file."""
