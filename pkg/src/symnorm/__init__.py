from importlib import metadata

__version__ = metadata.version(__name__)


from .codec import render, run, run_batch  # noqa: F401
from .registry import registry  # noqa: F401

__all__ = ["render", "run", "run_batch", "registry"]
