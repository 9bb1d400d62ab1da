"""Exact GL(3) long-Weyl-element Kloosterman sums, their global decomposition,
bilinear-form experiments and the associated archimedean kernels."""

from .cyclo import CycloValue
from .decomp import enumerate_tuples, s_long_decomposed, verify_decomposition
from .gl3 import s_long_bruteforce, s_tilde
from .kloosterman import kloosterman_direct, kloosterman_fast, ramanujan

__version__ = "0.1.0"

__all__ = [
    "CycloValue",
    "enumerate_tuples",
    "s_long_decomposed",
    "verify_decomposition",
    "s_long_bruteforce",
    "s_tilde",
    "kloosterman_direct",
    "kloosterman_fast",
    "ramanujan",
]
