import inspect
from collections.abc import Callable
from dataclasses import dataclass, field

from symnorm.exceptions import RegistryError


@dataclass
class SplitterSpec:
    """Specification for a splitter function.

    Attributes:
        splitter: The splitter function. It takes (h, k, m) and returns a SplitWitness.
        families: Fan families the splitter handles. ``rank2`` stands for every
            rank-2 fan proper over the quadrant.
        name: The algorithm name. Set automatically by the `register` decorator.
        same_bundle: Whether the splitter only handles k = h.
    """

    splitter: Callable
    families: tuple[str, ...]
    name: str
    same_bundle: bool = False

    def __post_init__(self):
        """Ensure that the splitter is Callable and handles at least one family."""
        if not callable(self.splitter):
            raise RegistryError(f"Splitter '{self.splitter}' is not Callable.")
        if not self.families:
            raise RegistryError(
                f"Splitter '{self.name}' must handle at least one fan family."
            )


@dataclass
class SplitterRegistry:
    """Registry for splitter functions."""

    registry: dict[str, SplitterSpec] = field(default_factory=dict)

    def register(self, spec: SplitterSpec) -> None:
        """Register a new splitter. Algorithm names are unique.

        Args:
            spec: SplitterSpec holding the splitter function and its families.
        """
        if spec.name in self.registry:
            raise RegistryError(f"Duplicate splitter registered for '{spec.name}'.")
        self.registry[spec.name] = spec

    def get(self, name: str) -> SplitterSpec:
        """Get the splitter registered under an algorithm name."""
        try:
            return self.registry[name]
        except KeyError:
            raise RegistryError(
                f"No splitter registered for '{name}'. Known: {self.supported()}"
            ) from None

    def for_families(self, families: list[str]) -> list[SplitterSpec]:
        """Splitters handling any of the given families, in registration order.

        Args:
            families: Family names, e.g. from ``catalog.identify``.

        Returns:
            List of SplitterSpec objects.
        """
        return [
            spec
            for spec in self.registry.values()
            if set(spec.families) & set(families)
        ]

    def supported(self) -> list[str]:
        """Get all registered algorithm names."""
        return list(self.registry.keys())


registry = SplitterRegistry()


def register(*, families: tuple[str, ...], same_bundle: bool = False):
    """Decorator to register a function in the splitter registry.

    The algorithm name is the name of the module the function lives in.

    Args:
        families: Fan families the splitter handles.
        same_bundle: True if the splitter requires k = h.

    Example:
        ```python
        @register(families=("chain",), same_bundle=True)
        def split_chain_blowup(h, k, m):
            ...
        ```
    """

    def decorator(func):
        module = inspect.getmodule(func).__name__
        name = module.split(".")[-1]
        registry.register(
            SplitterSpec(
                splitter=func,
                families=tuple(families),
                name=name,
                same_bundle=same_bundle,
            )
        )
        return func

    return decorator
