"""Moments and one-level density of Hecke L-functions over Q(i).

Library + CLI for desk-scale numerical study of the family of Hecke
L-functions attached to odd primitive characters mod q in Z[i]:

  * exact Z[i] arithmetic and multiplicative functions  (zi_arith)
  * the unit group (O_K/(q))^* and its characters       (residue_chars)
  * the lifted Hecke character mod (1+i)^3 q, Gauss sums (hecke_lift)
  * smoothing kernels V, W by Mellin contour quadrature  (analytic_kernels)
  * central values L(1/2) via the approximate functional
    equation, cross-checked against |L|^2 = 2A           (l_values)
  * moment / non-vanishing / one-level-density sweeps     (experiments)
  * reproducible CSV/JSON sweeps and a verification suite (cli)
"""

from .zi_arith import GaussInt, Factorization, factor, norm, primary_decompose
from .residue_chars import Modulus, Character, build_modulus, characters, psi, psi_star

__all__ = [
    "GaussInt", "Factorization", "factor", "norm", "primary_decompose",
    "Modulus", "Character", "build_modulus", "characters", "psi", "psi_star",
]

__version__ = "0.1.0"
