"""Exact doubling metric on open sets, doubling-measure certificates and related checks."""

from .core import (
    INFINITE,
    CertificateError,
    DistanceResult,
    DomainError,
    RepresentationError,
    ResourceError,
    SimilarityMap,
    cutoff_bound,
    directed_distance,
    doubling_distance,
    iterate_predecessor,
)
from .finite import FiniteSpace, PointSet
from .measures import BernoulliWeights, PiecewiseDensity, PointWeights
from .realline import ClosedSet, IntervalSet
from .symbolic import CylinderSet, PermutationSpec

__version__ = "0.1.0"

__all__ = [
    "INFINITE",
    "BernoulliWeights",
    "CertificateError",
    "ClosedSet",
    "CylinderSet",
    "DistanceResult",
    "DomainError",
    "FiniteSpace",
    "IntervalSet",
    "PermutationSpec",
    "PiecewiseDensity",
    "PointSet",
    "PointWeights",
    "RepresentationError",
    "ResourceError",
    "SimilarityMap",
    "cutoff_bound",
    "directed_distance",
    "doubling_distance",
    "iterate_predecessor",
]
