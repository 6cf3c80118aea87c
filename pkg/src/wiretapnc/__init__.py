"""Secure network coding against wiretappers of unknown location.

Exact max-flow and cut-set bounds, LP-based achievable secrecy rates
for key-cancelation and local-key strategies, explicit linear codes over
prime fields with rank and exhaustive secrecy checks, a Shannon-type
entropy LP prover and clique-based hardness reductions.

Set ``WIRETAPNC_JIT=0`` to use the pure-numpy kernels instead of numba.
"""

from .flow import cut_set_bound, max_flow
from .network import (EnumerationTooLarge, ExplicitWiretap, Link, Network, NetworkError, UniformWiretap,
                      fixture, parse_network)
from .strategies import best_achievable, global_key_rate, strategy1_rate, strategy2_rate

__version__ = "0.1.0"

__all__ = [
    "EnumerationTooLarge", "ExplicitWiretap", "Link", "Network", "NetworkError", "UniformWiretap",
    "best_achievable", "cut_set_bound", "fixture", "global_key_rate", "max_flow", "parse_network",
    "strategy1_rate", "strategy2_rate",
]
