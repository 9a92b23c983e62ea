"""Lattice point search on LLL-reduced bases."""

from .search import (
    ClosestSet,
    EnumerationCapExceeded,
    PhaseReport,
    RelevantVectorSet,
    ShortestVectors,
    ThetaImage,
    closest_points,
    default_phase_points,
    enumerate_ball,
    facet_certificate,
    minimal_vectors,
    phase_condition_i,
    prepare,
    relevant_vectors,
    shortest_vectors,
    theta_image,
    verify_automorphism,
)

__all__ = [
    "ClosestSet",
    "EnumerationCapExceeded",
    "PhaseReport",
    "RelevantVectorSet",
    "ShortestVectors",
    "ThetaImage",
    "closest_points",
    "default_phase_points",
    "enumerate_ball",
    "facet_certificate",
    "minimal_vectors",
    "phase_condition_i",
    "prepare",
    "relevant_vectors",
    "shortest_vectors",
    "theta_image",
    "verify_automorphism",
]
