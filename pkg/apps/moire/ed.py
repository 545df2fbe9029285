# -*- encoding: utf-8 -*-
"""
Copyright (c) 2019 - present AppSeed.us

Exact diagonalization of the flat-band interacting Hamiltonian on tiny grids.

Fermionic modes are (band, k) with index band * N_k + k; occupation
bitstrings put mode 0 in the most significant bit and carry a Jordan-Wigner
parity string over the lower modes.
"""

import logging
from dataclasses import dataclass
from functools   import cached_property, reduce

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg

from .common import CapacityError, COMMON, InputError
from .conf   import setting
from .hf     import band_sets, v_hat

logger = logging.getLogger(__name__)

SIGMA   = sp.csr_matrix(np.array([[0.0, 1.0], [0.0, 0.0]]))
SIGMA_Z = sp.csr_matrix(np.diag([1.0, -1.0]))
ID2     = sp.identity(2, format='csr')

def jordan_wigner(j, L):
    """Annihilation operator of mode j among L modes."""
    ops = [SIGMA_Z] * j + [SIGMA] + [ID2] * (L - j - 1)
    return reduce(lambda a, b: sp.kron(a, b, format='csr'), ops).astype(complex)

@dataclass(eq=False)
class FockSpace:
    n_bands : int
    n_k     : int

    def __post_init__(self):
        cap = setting('ED_MAX_MODES')
        if self.n_modes > cap:
            raise CapacityError('%d modes exceed the cap of %d' % (self.n_modes, cap))

    @property
    def n_modes(self):
        return self.n_bands * self.n_k

    @property
    def dim(self):
        return 2 ** self.n_modes

    def mode(self, band, ik):
        return band * self.n_k + ik

    @cached_property
    def annihilators(self):
        return [jordan_wigner(j, self.n_modes) for j in range(self.n_modes)]

    def c(self, band, ik):
        return self.annihilators[self.mode(band, ik)]

    def cdag(self, band, ik):
        return self.annihilators[self.mode(band, ik)].conj().T.tocsr()

    @cached_property
    def occupations(self):
        """(dim, n_modes) 0/1 occupation table."""
        idx = np.arange(self.dim)
        return (idx[:, None] >> (self.n_modes - 1 - np.arange(self.n_modes))[None, :]) & 1

    @cached_property
    def particle_number(self):
        return self.occupations.sum(axis=1)

    def number_operator(self, ik=None):
        modes = range(self.n_modes) if ik is None else [self.mode(b, ik) for b in range(self.n_bands)]
        return sp.diags(self.occupations[:, list(modes)].sum(axis=1).astype(complex), format='csr')

    def basis_state(self, modes):
        """Occupation basis vector with the listed modes filled."""
        v   = np.zeros(self.dim, dtype=complex)
        idx = sum(1 << (self.n_modes - 1 - m) for m in modes)
        v[idx] = 1.0
        return v

def fock_space(table):
    return FockSpace(n_bands=2 * table.M, n_k=table.grid.n_k)

def fsd_state(space, M, sign):
    bands = range(M) if sign > 0 else range(M, 2 * M)
    return space.basis_state([space.mode(b, ik) for b in bands for ik in range(space.n_k)])

def slater_state(space, Phi):
    """prod_k prod_i (sum_n Phi(k)_ni f+_nk)|0> for occupied isometries Phi of shape (N_k, 2M, M)."""
    psi = np.zeros(space.dim, dtype=complex)
    psi[0] = 1.0
    for ik in range(space.n_k):
        for i in range(Phi.shape[-1]):
            op  = sum(Phi[ik, n, i] * space.cdag(n, ik) for n in range(space.n_bands))
            psi = op @ psi
    return psi / np.linalg.norm(psi)

def build_rho(table, q, space, iq=None, G=None):
    """
    rho(q') = sum_k Lambda_k(q')_mn f+_mk f_n,k+q' - 1/2 delta_{q' in dual lattice} sum_k tr Lambda_k(q').
    q' is given either as a momentum or as the stored pair (iq, G).
    """
    grid = table.grid
    if iq is None:
        iq, G = grid.locate(q)
    if not table.has(iq, G):
        raise InputError('q=%s is not representable in the table' % (np.round(table.momentum(iq, G), 6),))

    gi  = table.g_index(iq, G)
    rho = sp.csr_matrix((space.dim, space.dim), dtype=complex)
    for ik in range(grid.n_k):
        k2, _ = grid.add(ik, iq)
        L = table.entries[(ik, iq)][gi]
        for m, n in zip(*np.nonzero(np.abs(L) > 0.0)):
            rho = rho + L[m, n] * (space.cdag(m, ik) @ space.c(n, k2))
        if iq == 0:
            rho = rho - 0.5 * np.trace(L) * sp.identity(space.dim, format='csr')
    return rho.tocsr()

def build_H_FBI(table, pot, space):
    """(1/(N_k |Omega|)) sum_q' V(q') rho(q') rho(-q')."""
    H = sp.csr_matrix((space.dim, space.dim), dtype=complex)
    rhos = {}
    for iq, G in table.momenta():
        rhos[(iq, tuple(int(x) for x in G))] = build_rho(table, None, space, iq=iq, G=G)
    for (iq, G), rho in rhos.items():
        iq2, G2 = table.negate(iq, G)
        V = v_hat(pot, table.momentum(iq, G))
        H = H + V * (rho @ rhos[(iq2, tuple(int(x) for x in G2))])
    H = H / (table.grid.n_k * table.cell_area)
    logger.info('H_FBI: %d modes, dimension %d, %d momenta', space.n_modes, space.dim, len(rhos))
    return H.tocsr(), rhos

def ground_spectrum(H, n_eigs=None, dense_max=None):
    """Lowest eigenvalues, dense up to dense_max and Lanczos above."""
    dense_max = dense_max or setting('ED_DENSE_MAX')
    dim = H.shape[0]
    if dim <= dense_max:
        w = scipy.linalg.eigvalsh(H.toarray())
        return w if n_eigs is None else w[:n_eigs]
    k = min(n_eigs or 6, dim - 2)
    w = scipy.sparse.linalg.eigsh(H, k=k, which='SA', return_eigenvectors=False)
    return np.sort(w)

def sector_ground_energies(H, space, fillings):
    """Lowest eigenvalue in each particle-number sector."""
    out = {}
    for n in fillings:
        idx = np.flatnonzero(space.particle_number == n)
        if len(idx) == 0:
            continue
        block = H[idx][:, idx]
        out[n] = float(ground_spectrum(block, n_eigs=1)[0])
    return out

def expectation(H, psi):
    return float(np.real(np.vdot(psi, H @ psi)) / np.real(np.vdot(psi, psi)))

def excitation_operator(space, M, sign, direction, c):
    """Sum conj(c) f over occupied bands (remove) or sum c f+ over empty bands (add)."""
    occ, emp = band_sets(M, sign)
    bands = occ if direction == COMMON.DIR_REMOVE else emp
    c  = np.asarray(c, dtype=complex)
    op = sp.csr_matrix((space.dim, space.dim), dtype=complex)
    for ik in range(space.n_k):
        for l, band in enumerate(bands):
            if direction == COMMON.DIR_REMOVE:
                op = op + np.conj(c[ik, l]) * space.c(band, ik)
            else:
                op = op + c[ik, l] * space.cdag(band, ik)
    return op

def excitation_energy(H, state, c, direction, *, space, M, sign=+1):
    """<c Psi|H|c Psi> / ||c Psi||^2."""
    if direction not in (COMMON.DIR_ADD, COMMON.DIR_REMOVE):
        raise InputError('direction must be add or remove')
    op  = excitation_operator(space, M, sign, direction, c)
    phi = op @ state
    nrm = np.real(np.vdot(phi, phi))
    if nrm < 1e-24:
        raise InputError('excitation annihilates the state')
    return float(np.real(np.vdot(phi, H @ phi)) / nrm)

def frustration_report(rhos, psi):
    """Max over q' of ||rho(q')^+ psi||^2 = <psi|rho rho^+|psi>."""
    worst = 0.0
    for rho in rhos.values():
        v = rho.conj().T @ psi
        worst = max(worst, float(np.real(np.vdot(v, v))))
    return worst
