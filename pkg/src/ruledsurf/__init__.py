"""Singularity analysis of ruled surfaces ``F(x, t) = gamma(x) + t * xi(x)``."""

from .frame import SurfaceSpec, compute_frame, multiplicities
from .jets import Jet, Vec3Jet
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "Jet", "SurfaceSpec", "Vec3Jet", "compute_frame", "multiplicities"]
