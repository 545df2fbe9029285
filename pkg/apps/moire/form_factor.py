# -*- encoding: utf-8 -*-
"""
Copyright (c) 2019 - present AppSeed.us

Form factors Lambda_k(q+G)_mn = |Omega|^-1 sum_G' conj(u_mk(G')) u_n,k+q(G'+G).
"""

import logging, math
from dataclasses import dataclass, field

import numpy as np
import scipy.signal

from .common import AliasingError, InputError
from .conf   import setting
from .gauge  import coefficients_from_samples, sample_periodic

logger = logging.getLogger(__name__)

def shortest_norm(grid, iq):
    frac = grid.frac[iq]
    return min(np.linalg.norm(grid.lattice.dual_vector(frac - np.array([a, b])))
               for a in (0, 1) for b in (0, 1))

def g_shell(grid, iq, g_cutoff):
    """Integer G with |q + G| <= g_cutoff, sorted by norm then lexicographically."""
    lat = grid.lattice
    n   = int(math.ceil(2.0 * (g_cutoff + 2.0 * np.linalg.norm(lat.g1)) / 3.0)) + 1
    rng = np.arange(-n, n + 1)
    mm  = np.array(np.meshgrid(rng, rng, indexing='ij')).reshape(2, -1).T
    p   = grid.points[iq] + lat.dual_vector(mm)
    nr  = np.linalg.norm(p, axis=1)
    keep = nr <= g_cutoff + 1e-12
    mm, nr = mm[keep], np.round(nr[keep], 10)
    order  = np.lexsort((mm[:, 1], mm[:, 0], nr))
    return mm[order]

@dataclass(eq=False)
class FormFactorTable:
    flat     : object
    g_cutoff : float
    shells   : dict = field(default_factory=dict, repr=False)
    entries  : dict = field(default_factory=dict, repr=False)
    _lookup  : dict = field(default_factory=dict, repr=False)
    weights  : dict = field(default_factory=dict, repr=False)

    @property
    def grid(self):
        return self.flat.grid

    @property
    def M(self):
        return self.flat.M

    @property
    def cell_area(self):
        return self.flat.lattice.cell_area

    def g_index(self, iq, G):
        if iq not in self._lookup:
            self._lookup[iq] = {tuple(int(x) for x in g): i for i, g in enumerate(self.shells[iq])}
        try:
            return self._lookup[iq][(int(G[0]), int(G[1]))]
        except KeyError:
            raise InputError('G=%s is not stored for q#%d' % (tuple(G), iq))

    def has(self, iq, G):
        try:
            self.g_index(iq, G)
        except InputError:
            return False
        return True

    def lam(self, ik, iq, G=(0, 0)):
        return self.entries[(ik, iq)][self.g_index(iq, G)]

    def A(self, ik, iq, G=(0, 0)):
        return self.lam(ik, iq, G)[:self.M, :self.M]

    def momentum(self, iq, G):
        return self.grid.points[iq] + self.flat.lattice.dual_vector(G)

    def negate(self, iq, G):
        """-(q + G) = q' + G' -> (iq', G')."""
        iq2, G0 = self.grid.minus(iq)
        return iq2, -np.asarray(G) + G0

    def momenta(self):
        """All stored q' = q + G as (iq, G) pairs."""
        for iq in range(self.grid.n_k):
            for G in self.shells[iq]:
                yield iq, G

    def rows(self):
        """CSV rows (k, q, G1, G2, m, n, re, im)."""
        for (ik, iq), block in sorted(self.entries.items()):
            for gi, G in enumerate(self.shells[iq]):
                for m in range(block.shape[1]):
                    for n in range(block.shape[2]):
                        c = block[gi, m, n]
                        yield [ik, iq, int(G[0]), int(G[1]), m, n, c.real, c.imag]

def build_table(basis, G_cutoff=None):
    """All Lambda_k(q+G) for grid k, q and |q+G| <= G_cutoff."""
    G_cutoff = G_cutoff or setting('G_CUTOFF')
    grid     = basis.grid
    area     = basis.lattice.cell_area
    limit    = basis.basis.cutoff - max(shortest_norm(grid, iq) for iq in range(grid.n_k))

    if G_cutoff > limit + 1e-12:
        raise AliasingError('G_cutoff %.4f exceeds basis cutoff minus |q| (%.4f)' % (G_cutoff, limit))

    B     = basis.box
    table = FormFactorTable(flat=basis, g_cutoff=G_cutoff)
    for iq in range(grid.n_k):
        table.shells[iq] = g_shell(grid, iq, G_cutoff)

    # conj(u_m)(-m') for the correlation
    flipped = [basis.coeffs[ik].conj()[..., ::-1, ::-1] for ik in range(grid.n_k)]

    for ik in range(grid.n_k):
        a = flipped[ik][:, None]
        for iq in range(grid.n_k):
            k2, G0 = grid.add(ik, iq)
            b    = basis.coeffs[k2][None, :]
            corr = scipy.signal.fftconvolve(b, a, axes=(-2, -1)).sum(axis=(2, 3)) / area
            d    = table.shells[iq] + G0 + (B - 1)
            ok   = np.all((d >= 0) & (d < 2 * B - 1), axis=1)
            out  = np.zeros((len(d), 2 * basis.M, 2 * basis.M), dtype=complex)
            out[ok] = np.moveaxis(corr[:, :, d[ok, 0], d[ok, 1]], -1, 0)
            table.entries[(ik, iq)] = out

    logger.info('form factor table: %d (k,q) pairs, %d G per shell on average',
                len(table.entries), int(np.mean([len(s) for s in table.shells.values()])))
    return table

def sum_rule_residual(table, G):
    """|sum_k Im tr A_k(G)|."""
    return abs(sum(np.trace(table.A(ik, 0, G)).imag for ik in range(table.grid.n_k)))

def identity_report(table):
    """Max residuals of the structural identities over every stored entry."""
    grid, M = table.grid, table.M
    ident = dagger = block = conj = 0.0

    for ik in range(grid.n_k):
        ident = max(ident, np.max(np.abs(table.lam(ik, 0) - np.eye(2 * M))))
        for iq in range(grid.n_k):
            k2, _ = grid.add(ik, iq)
            blk   = table.entries[(ik, iq)]
            block = max(block, np.max(np.abs(blk[:, :M, M:])), np.max(np.abs(blk[:, M:, :M])))
            conj  = max(conj, np.max(np.abs(blk[:, M:, M:] - blk[:, :M, :M].conj())))
            for G in table.shells[iq]:
                iq2, G2 = table.negate(iq, G)
                lhs = table.lam(ik, iq, G).conj().T
                rhs = table.lam(k2, iq2, G2)
                dagger = max(dagger, np.max(np.abs(lhs - rhs)))

    rule = max(sum_rule_residual(table, G) for G in table.shells[0])
    return {
        'identity'    : ident,
        'dagger'      : dagger,
        'off_block'   : block,
        'conj_block'  : conj,
        'sum_rule'    : rule,
    }

def shifted_lam(table, ik, G0, iq, G):
    """Lambda_{k+G0}(q+G) computed from the shifted coefficients."""
    flat   = table.flat
    grid   = table.grid
    k2, H0 = grid.add(ik, iq)
    left   = flat.states(ik, G0)
    right  = flat.states(k2, np.asarray(H0) + np.asarray(G0) + np.asarray(G))
    return np.einsum('msjab,nsjab->mn', left.conj(), right) / flat.lattice.cell_area

def pair_product(basis, ik, n=64):
    """rho_mn(r) = sum_{sigma,j} conj(u_m(r)) u_n(r) for the positive bands, shape (n, n, M, M)."""
    vals = sample_periodic(basis.coeffs[ik, :basis.M], n, basis.lattice.cell_area)
    return np.einsum('msjxy,nsjxy->xymn', vals.conj(), vals)

def trace_from_pair_product(rho, B, area):
    """Fourier coefficients int exp(-iG.r) tr rho(r) dr on a B x B box."""
    tr = np.trace(rho, axis1=-2, axis2=-1)
    return coefficients_from_samples(tr, B, area)
