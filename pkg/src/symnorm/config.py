"""Enumeration caps and process-wide limits."""

import logging
import os
from functools import lru_cache

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .exceptions import JobError

logger = logging.getLogger(__name__)

ENV_VAR = "SYMNORM_CAP"


class Limits(BaseModel):
    """Caps guarding every exhaustive enumeration.

    Attributes:
        weyl_order: Largest Weyl group generated by breadth-first closure.
        vertex_rank: Largest ambient rank for subset-solve vertex enumeration.
        box_points: Largest lattice box scanned by point enumeration.
        max_workers: Worker processes used by batch runs.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    weyl_order: int = Field(default=10**6, gt=0)
    vertex_rank: int = Field(default=5, gt=0)
    box_points: int = Field(default=2_000_000, gt=0)
    max_workers: int = Field(default=1, gt=0)

    @classmethod
    def from_env(cls, value: str | None = None) -> "Limits":
        """Build limits from the SYMNORM_CAP environment variable.

        Args:
            value: Override for the variable's contents. Reads the environment if None.

        Returns:
            The configured Limits.

        Raises:
            JobError: If the value cannot be parsed.
        """
        raw = os.environ.get(ENV_VAR) if value is None else value
        if raw is None or not raw.strip():
            return cls()

        raw = raw.strip()
        fields: dict[str, int] = {}
        try:
            if "=" not in raw:
                count = int(raw)
                fields = {"weyl_order": count, "box_points": count}
            else:
                for item in raw.split(","):
                    name, _, number = item.partition("=")
                    fields[name.strip()] = int(number)
            limits = cls(**fields)
        except (ValueError, ValidationError) as e:
            raise JobError(f"Malformed {ENV_VAR} value '{raw}': {e}") from e
        logger.info("Limits from %s: %s", ENV_VAR, limits)
        return limits


@lru_cache(maxsize=1)
def get_limits() -> Limits:
    """Process-wide limits, read from the environment once."""
    return Limits.from_env()
