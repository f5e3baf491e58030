"""
From momentum profiles to a photon density matrix
=================================================

Two electron-hole pairs with Lorentzian momentum profiles, centered
d apart. We compute the four overlaps, build the spin matrix and map it
to photon polarizations.
"""

import numpy as np

from pauliphoton import MomentumProfile, overlap_quad, assemble_density_matrix
from pauliphoton import normalize, map_to_polarization, concurrence, negativity

delta, d = 2.0, 2.0
pk = MomentumProfile.lorentzian(delta, -d / 2)
pkp = MomentumProfile.lorentzian(delta, d / 2)

# holes default to the mirrored electron profiles
q = overlap_quad(pk, pkp)
print("L =", q.L, " M =", q.M, " M/L =", q.M / q.L)

# same numbers straight from adaptive quadrature
print("quadrature:", overlap_quad(pk, pkp, method="quad"))

spin = normalize(assemble_density_matrix(q))
np.set_printoptions(precision=4, suppress=True)
print(spin.entries.real)

photon = map_to_polarization(spin)
print(photon.entries.real)
print("concurrence", concurrence(photon), " negativity", negativity(photon))
