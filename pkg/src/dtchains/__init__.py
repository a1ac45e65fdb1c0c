"""Triangle chains and twist dynamics on compact relative character varieties.

The package realizes the compact (Deroin-Tholozan) components of relative
PSL(2,R) character varieties of punctured spheres as executable objects:
hyperbolic triangle chains, action-angle coordinates, Hamiltonian flows,
Dehn twists, and a set of reproducible numerical experiments on top.
"""

__version__ = "0.1.0"

from . import chain, cli, dynamics, experiments, hyperbolic, rep, surface, verify
from .chain import ActionAngleCoords, AngleVector, build_chain, extract_coords, moment_map
from .dynamics import dehn_twist, flow, undegenerate_twist
from .rep import Representation, angle_function, chain_to_rep, fingerprint, rep_to_chain

__all__ = [
    "__version__",
    "ActionAngleCoords",
    "AngleVector",
    "Representation",
    "angle_function",
    "build_chain",
    "chain",
    "chain_to_rep",
    "cli",
    "dehn_twist",
    "dynamics",
    "experiments",
    "extract_coords",
    "fingerprint",
    "flow",
    "hyperbolic",
    "moment_map",
    "rep",
    "rep_to_chain",
    "surface",
    "undegenerate_twist",
    "verify",
]
