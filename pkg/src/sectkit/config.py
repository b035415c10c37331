"""Global defaults for truncation, homology depth and enumeration caps."""

from dataclasses import dataclass

#: Default truncation level for simplicial replacements and extensions.
DEFAULT_TRUNCATION = 3

#: Default homology depth for contractibility diagnostics.
DEFAULT_DEPTH = 3

#: Any exhaustive enumeration above this many candidates fails loudly.
DEFAULT_CAP = 50_000


@dataclass(frozen=True)
class Config:
    """Bundle of the three knobs every command accepts."""

    truncation: int = DEFAULT_TRUNCATION
    depth: int = DEFAULT_DEPTH
    cap: int = DEFAULT_CAP
