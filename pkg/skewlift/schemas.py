"""
Schema definitions for the skewlift workbench.
Contains Pydantic models used for configuration and instance generation.
"""

import os
from functools import lru_cache
from typing import Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field, model_validator


class WorkbenchConfig(BaseModel):
    """
    Size caps and oracle budgets shared by every construction and check.

    Ground sets above ``ground_cap`` and product spaces above ``product_cap``
    are rejected at construction time so that power-set oracles stay feasible.
    """

    ground_cap: int = Field(
        16, ge=1, le=24, description="Maximum number of points of a ground set"
    )
    product_cap: int = Field(
        64, ge=1, le=256, description="Maximum number of (x, y) pairs of a product"
    )
    exhaustive_cap: int = Field(
        12,
        ge=0,
        le=16,
        description="Atom count up to which oracles enumerate every measurable set",
    )
    sample_count: int = Field(
        10000, ge=1, description="Sampled measurable sets above the exhaustive cap"
    )
    oracle_limit: int = Field(
        4096,
        ge=1,
        description="Candidate assignments tried by the brute-force splitting oracle",
    )

    @classmethod
    def from_env(cls) -> "WorkbenchConfig":
        """
        Build the configuration from ``SKEWLIFT_*`` environment variables,
        reading a ``.env`` file first when one exists.
        """
        load_dotenv()
        overrides = {}
        for field_name in ("ground_cap", "product_cap", "exhaustive_cap",
                           "sample_count", "oracle_limit"):
            variable = f"SKEWLIFT_{field_name.upper()}"
            raw = os.environ.get(variable)
            if raw is None or raw.strip() == "":
                continue
            try:
                overrides[field_name] = int(raw)
            except ValueError:
                raise ValueError(f"{variable} must be an integer, got '{raw}'")
        return cls(**overrides)


@lru_cache(maxsize=1)
def default_config() -> WorkbenchConfig:
    """Process-wide configuration; call ``default_config.cache_clear()`` after
    changing the environment."""
    return WorkbenchConfig.from_env()


class InstanceSpec(BaseModel):
    """
    Parameters of one seeded random instance.

    The rates are probabilities: ``null_rate`` for zeroing a point weight of
    P or Q, ``coarse_b_rate`` / ``coarse_a_rate`` for merging neighbouring
    atoms of 𝔅 / 𝔄 below the power set.
    """

    seed: int = Field(0, ge=0, description="Seed of every random draw")
    size_x: int = Field(3, ge=1, description="Number of points of X")
    size_y: int = Field(2, ge=1, description="Number of points of Y")
    null_rate: float = Field(0.0, ge=0.0, le=1.0, description="Null-point injection rate")
    coarse_b_rate: float = Field(0.0, ge=0.0, le=1.0, description="𝔅 coarsening rate")
    coarse_a_rate: float = Field(0.0, ge=0.0, le=1.0, description="𝔄 coarsening rate")
    gens_length: Optional[int] = Field(
        None, ge=0, description="Number of random generators of 𝔠 before completion"
    )

    @model_validator(mode="after")
    def validate_sizes(self):
        config = default_config()
        if self.size_x > config.ground_cap:
            raise ValueError(
                f"size_x ({self.size_x}) exceeds the ground cap ({config.ground_cap})"
            )
        if self.size_y > config.ground_cap:
            raise ValueError(
                f"size_y ({self.size_y}) exceeds the ground cap ({config.ground_cap})"
            )
        if self.size_x * self.size_y > config.product_cap:
            raise ValueError(
                f"|X×Y| = {self.size_x * self.size_y} exceeds the product cap "
                f"({config.product_cap})"
            )
        return self
