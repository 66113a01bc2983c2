"""Finite, machine-checkable ingredients of the k!/k^k density bound for tents.

Modules: :mod:`~tentdensity.threshold` (t(k) against ceil(k/e)),
:mod:`~tentdensity.partition` (the k!-block multiset partition),
:mod:`~tentdensity.inequality` (product inequality, exact and numerical),
:mod:`~tentdensity.hypergraph` (tents, hosts, homomorphisms) and
:mod:`~tentdensity.entropy` (ratio sequences and the density functional).
"""

__version__ = "0.1.0"
