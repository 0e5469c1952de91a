"""Configuration module for the multipole Mermin-Wagner toolkit.

This module defines application settings using Pydantic's settings management.
It loads environment variables via ``python-dotenv`` to simplify local development.
"""

from pathlib import Path

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict
from dotenv import load_dotenv


load_dotenv(override=True)


class Settings(BaseSettings):
    """
    Settings class for the toolkit.

    Numerical ceilings and tolerances shared by every module. Each field can be
    overridden through an environment variable with the ``MWMW_`` prefix.

    Parameters
    ----------
    THREADS : int, default=1
        Worker threads used by the CLI runners when ``--threads`` is not given.
    DENSE_LIMIT : int, default=4096
        Largest Hilbert-space dimension handled with dense matrices.
    SPARSE_LIMIT : int, default=1048576
        Largest dimension handled by the sparse exact path of ``compute_Dm``.
    MAX_POINTS : int, default=5000000
        Largest lattice that may be enumerated.
    HERMITIAN_TOL : float, default=1e-12
        Relative tolerance for self-adjointness checks.
    UNITARY_TOL : float, default=1e-10
        Absolute tolerance for unitarity checks.
    LOG_FLOOR : float, default=1e-300
        Eigenvalue floor used before taking matrix logarithms.
    NORM_TOL : float, default=1e-8
        Tolerance of the iterative norm solver.
    LOG_FILE : Path, default="mwmw.log"
        File receiving CLI logs.
    LOG_LEVEL : str, default="INFO"
        Logging level of the CLI.

    Returns
    -------
    Settings
        A validated settings object.

    See Also
    --------
    BaseSettings : Pydantic settings base class for environment variable loading.

    Examples
    --------
    >>> from mwmw.configs.settings import Settings
    >>> settings = Settings()
    >>> settings.DENSE_LIMIT
    4096
    """

    model_config = SettingsConfigDict(env_prefix="MWMW_", extra="ignore")

    THREADS: int = Field(default=1, ge=1, description="Worker threads for CLI runners")
    DENSE_LIMIT: int = Field(default=4096, ge=2, description="Largest dense Hilbert-space dimension")
    SPARSE_LIMIT: int = Field(default=2**20, ge=2, description="Largest dimension of the sparse exact D_m path")
    MAX_POINTS: int = Field(default=5_000_000, ge=1, description="Largest lattice that may be enumerated")
    HERMITIAN_TOL: float = Field(default=1e-12, gt=0, description="Relative tolerance for self-adjointness")
    UNITARY_TOL: float = Field(default=1e-10, gt=0, description="Tolerance for unitarity checks")
    LOG_FLOOR: float = Field(default=1e-300, gt=0, description="Eigenvalue floor before matrix logarithms")
    NORM_TOL: float = Field(default=1e-8, gt=0, description="Tolerance of the iterative norm solver")
    LOG_FILE: Path = Field(default=Path("mwmw.log"), description="File receiving CLI logs")
    LOG_LEVEL: str = Field(default="INFO", description="Logging level of the CLI")


# Create a global instance of the settings
app_config = Settings()
