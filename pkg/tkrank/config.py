import logging
import os
from typing import Literal, Optional

import dotenv
from pydantic import BaseModel, Field, field_validator

from tkrank.algebra.field import DEFAULT_MODULUS, is_prime

logger = logging.getLogger(__name__)

_ENV_LOADED = False


# load .env overrides (modulus, seed, output dir) before any config is built
def load_environment_variables() -> None:
    global _ENV_LOADED
    if not _ENV_LOADED:
        dotenv.load_dotenv()
        _ENV_LOADED = True
        logger.debug("Environment variables loaded.")


def default_output_dir() -> str:
    load_environment_variables()
    return os.getenv("TKRANK_OUTPUT_DIR", "tkrank_outputs")


def default_log_level() -> str:
    load_environment_variables()
    return os.getenv("TKRANK_LOG_LEVEL", "WARNING").upper()


def _env_int(name: str) -> Optional[int]:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return None
    try:
        return int(raw, 0)
    except ValueError:
        raise ValueError(f"{name} must be an integer, got {raw!r}")


class RunConfig(BaseModel):
    """Validated settings for one command-line run."""
    seed: Optional[int] = Field(default=None, description="Seed for every random stream; None draws from entropy.")
    modulus: int = Field(default=DEFAULT_MODULUS, description="Prime modulus p >= 5 of the working field.")
    lam: float = Field(default=5.0, description="Amplification factor: the tensor solver runs ceil(lam / p) trials.")
    k: int = Field(default=1, description="Block parameter of the base tensor T_k.")
    solver: Literal["brute", "wht", "tensor"] = Field(default="wht", description="Tripartition decider.")
    threads: int = Field(default=1, description="Worker threads for independent trials.")
    max_n: int = Field(default=8, description="Largest tripartition block size the Fourier solver accepts.")
    max_entries: int = Field(default=10**7, description="Largest dense expansion any tensor operation may build.")
    input_path: Optional[str] = Field(default=None, description="Instance or decomposition file to read.")
    output_path: Optional[str] = Field(default=None, description="Where to write the produced artifact.")

    @field_validator("modulus")
    @classmethod
    def _check_modulus(cls, p: int) -> int:
        if p < 5 or not is_prime(p):
            raise ValueError(f"modulus must be a prime >= 5, got {p}")
        return p

    @field_validator("lam")
    @classmethod
    def _check_lam(cls, lam: float) -> float:
        if lam <= 0:
            raise ValueError("lambda must be positive")
        return lam

    @field_validator("k", "threads", "max_n", "max_entries")
    @classmethod
    def _check_positive(cls, value: int) -> int:
        if value < 1:
            raise ValueError("must be at least 1")
        return value

    @classmethod
    def from_env(cls, **overrides) -> "RunConfig":
        """Environment defaults, then explicit (non-None) overrides on top."""
        load_environment_variables()
        values = {}
        modulus = _env_int("TKRANK_MODULUS")
        if modulus is not None:
            values["modulus"] = modulus
        seed = _env_int("TKRANK_SEED")
        if seed is not None:
            values["seed"] = seed
        values.update({key: value for key, value in overrides.items() if value is not None})
        return cls(**values)
