"""Ergodic limits of discrete Markov chains.

Exact Cesaro limits, averaged occupation laws, pathwise ergodic laws, and a
seeded Monte Carlo engine for verifying them.
"""

from ._ergode import Chain, ErgodeError, __version__, canonical_json, family_simulate

__all__ = ["Chain", "ErgodeError", "__version__", "canonical_json", "family_simulate"]
