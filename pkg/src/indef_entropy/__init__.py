"""Indefinite block-Toeplitz interpolation, entropy functionals and Szego limits.

Library layout:

- ``toeplitz``: structured triples, displacement identity, inertia, Y matrix
- ``parameters``: Herglotz / contraction parameters, Cayley maps, pair rotation
- ``frame``: the 2p x 2p frame, linear fractional solutions, omega_star
- ``caratheodory``: Taylor extraction and block Toeplitz extensions
- ``entropy``: Poisson-kernel entropies, q-functions, disk zeros, identities
- ``szego``: determinant-ratio sequences and limit predictions
- ``scenario`` / ``cli``: seeded experiment harness and the command line
"""

__version__ = "0.1.0"

from .errors import IndefEntropyError
from .parameters import ContractionSpec, HerglotzSpec
from .toeplitz import ToeplitzSpec, build_structured_triple
from .frame import SolutionHandle

__all__ = [
    "__version__",
    "IndefEntropyError",
    "ContractionSpec",
    "HerglotzSpec",
    "ToeplitzSpec",
    "build_structured_triple",
    "SolutionHandle",
]
