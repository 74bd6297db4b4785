"""Exact lattice point counting on products of hyperbolic planes.

PSL_2(Z) acting on H and Hilbert modular groups PSL_2(O_F) acting on H^2,
with the Selberg transform machinery used to predict the counts.
"""

from .errors import HypLatticeError, NumericError, ValidationError
from .field import FieldSpec, RingElement
from .geometry import GroupElement, dist_from_u, multipoint, u_from_dist, u_invariant
from .lab import covolume
from .orbit import (BoxSpec, CountResult, StripSpec, count_box, count_hypercube, count_strip,
                    enumerate_box_orbit, naive_oracle)

__version__ = "0.1.0"
