"""Exact Stanley-Reisner computations for simplicial pseudo-manifolds.

Mixed-volume functionals, pairing ranks and characteristic-2 quadratic forms,
together with checkers for the derivative identities behind anisotropy.
"""
from .complex import SimplicialComplex, compute_orientation, load_complex
from .fields import QQ, BinaryExtField, PrimeField, field_from_spec
from .mixed_volume import MixedVolume, MixedVolumeConfig, build_mixed_volume
from .poly import MultiPoly, PolyRing
from .ratfunc import FactoredFrac, RatFunc

__all__ = [
    "QQ", "BinaryExtField", "FactoredFrac", "MixedVolume", "MixedVolumeConfig", "MultiPoly", "PolyRing",
    "PrimeField", "RatFunc", "SimplicialComplex", "build_mixed_volume", "compute_orientation",
    "field_from_spec", "load_complex",
]
