# -*- encoding: utf-8 -*-
"""
Copyright (c) 2019 - present AppSeed.us

Moire lattice, dual lattice and Monkhorst-Pack grids.

Momenta are handled as Cartesian 2-vectors; dual-lattice vectors are keyed by
integer pairs (m1, m2) meaning m1*g1 + m2*g2. The Brillouin-zone fundamental
domain is the half-open parallelogram of dual coordinates in [0, 1).
"""

import logging, math
from dataclasses import dataclass, field
from functools   import cached_property

import numpy as np

from .common import InputError, OMEGA, SQRT3

logger = logging.getLogger(__name__)

FOLD_TOL = 1e-9

@dataclass(frozen=True, eq=False)
class MoireLattice:
    v1        : np.ndarray
    v2        : np.ndarray
    g1        : np.ndarray
    g2        : np.ndarray
    cell_area : float
    q1        : np.ndarray
    q2        : np.ndarray
    q3        : np.ndarray
    R3        : np.ndarray
    omega     : complex = OMEGA

    @cached_property
    def real_basis(self):
        return np.column_stack([self.v1, self.v2])

    @cached_property
    def dual_basis(self):
        return np.column_stack([self.g1, self.g2])

    def dual_coords(self, q):
        """(a, b) with q = a*g1 + b*g2; works on (..., 2) arrays."""
        q = np.asarray(q, dtype=float)
        return q @ self.real_basis / (2 * math.pi)

    def real_coords(self, r):
        """(x1, x2) with r = x1*v1 + x2*v2."""
        r = np.asarray(r, dtype=float)
        return r @ self.dual_basis / (2 * math.pi)

    def dual_vector(self, m):
        m = np.asarray(m, dtype=float)
        return m @ self.dual_basis.T

    def real_vector(self, x):
        x = np.asarray(x, dtype=float)
        return x @ self.real_basis.T

def standard_lattice():

    s = SQRT3

    v1 = -np.array([2 * math.pi / s, 2 * math.pi / 3])
    v2 =  np.array([2 * math.pi / s, -2 * math.pi / 3])
    g1 = -np.array([s / 2, 1.5])
    g2 =  np.array([s / 2, -1.5])
    q1 =  np.array([0.0, 1.0])
    R3 =  0.5 * np.array([[-1.0, -s], [s, -1.0]])
    q2 = R3 @ q1
    q3 = R3 @ q2

    return MoireLattice(
        v1=v1, v2=v2, g1=g1, g2=g2,
        cell_area=abs(float(np.linalg.det(np.column_stack([v1, v2])))),
        q1=q1, q2=q2, q3=q3, R3=R3,
    )

def fold_coords(ab):
    """Split dual coordinates into (fraction in [0,1), integer part)."""
    ab   = np.asarray(ab, dtype=float)
    ints = np.floor(ab + FOLD_TOL)
    frac = ab - ints
    frac = np.where(np.abs(frac) < FOLD_TOL, 0.0, frac)
    frac = np.clip(frac, 0.0, None)
    return frac, ints.astype(int)

def fold_to_bz(lat, q):
    """q = k + G with k in the fundamental domain and G in the dual lattice."""
    frac, ints = fold_coords(lat.dual_coords(q))
    return lat.dual_vector(frac), lat.dual_vector(ints)

@dataclass(frozen=True, eq=False)
class MomentumGrid:
    lattice : MoireLattice
    n_kx    : int
    n_ky    : int
    frac    : np.ndarray = field(repr=False)

    @property
    def n_k(self):
        return self.n_kx * self.n_ky

    @cached_property
    def points(self):
        return self.lattice.dual_vector(self.frac)

    def __len__(self):
        return self.n_k

    def index(self, i, j):
        return (i % self.n_kx) * self.n_ky + (j % self.n_ky)

    def steps(self, idx):
        return divmod(idx, self.n_ky)

    def locate_coords(self, ab):
        """Grid index and dual-lattice shift (ints) with ab = k_idx + G."""
        ab    = np.asarray(ab, dtype=float)
        steps = np.array([ab[0] * self.n_kx, ab[1] * self.n_ky])
        near  = np.rint(steps)
        if np.max(np.abs(steps - near)) > 1e-6:
            raise InputError('momentum %s is not on the %dx%d grid' % (ab, self.n_kx, self.n_ky))
        i, j  = int(near[0]), int(near[1])
        idx   = self.index(i, j)
        shift = np.array([i // self.n_kx, j // self.n_ky])
        return idx, shift

    def locate(self, q):
        return self.locate_coords(self.lattice.dual_coords(q))

    def add(self, ik, iq):
        """k + q = k'' + G0 -> (k'', G0 ints)."""
        (i1, j1), (i2, j2) = self.steps(ik), self.steps(iq)
        i, j = i1 + i2, j1 + j2
        return self.index(i, j), np.array([i // self.n_kx, j // self.n_ky])

    def sub(self, ik, iq):
        """k - q = k'' + G0 -> (k'', G0 ints)."""
        (i1, j1), (i2, j2) = self.steps(ik), self.steps(iq)
        i, j = i1 - i2, j1 - j2
        return self.index(i, j), np.array([i // self.n_kx, j // self.n_ky])

    def minus(self, ik):
        """-k = k'' + G0 -> (k'', G0 ints)."""
        return self.sub(0, ik)

    def neighbours(self, ik):
        """Forward neighbours along both grid directions, wrapped modulo the dual lattice."""
        i, j = self.steps(ik)
        out  = []
        if self.n_kx > 1:
            out.append((self.index(i + 1, j), np.array([(i + 1) // self.n_kx, 0])))
        if self.n_ky > 1:
            out.append((self.index(i, j + 1), np.array([0, (j + 1) // self.n_ky])))
        return out

    def contains(self, q):
        try:
            self.locate(q)
        except InputError:
            return False
        return True

def mp_grid(lat, n_kx, n_ky):

    if int(n_kx) != n_kx or int(n_ky) != n_ky or n_kx < 1 or n_ky < 1:
        raise InputError('grid sizes must be positive integers, got (%s, %s)' % (n_kx, n_ky))

    n_kx, n_ky = int(n_kx), int(n_ky)
    ii, jj = np.meshgrid(np.arange(n_kx), np.arange(n_ky), indexing='ij')
    frac   = np.column_stack([ii.ravel() / n_kx, jj.ravel() / n_ky])

    logger.debug('mp_grid %dx%d', n_kx, n_ky)
    return MomentumGrid(lattice=lat, n_kx=n_kx, n_ky=n_ky, frac=frac)

def kpath(lat, n_points=20):
    """Closed path Gamma -> q1 -> q2 -> Gamma sampled with n_points momenta."""
    corners = [np.zeros(2), lat.q1, lat.q2, np.zeros(2)]
    lengths = [np.linalg.norm(b - a) for a, b in zip(corners[:-1], corners[1:])]
    ts      = np.linspace(0.0, sum(lengths), n_points)
    out     = []
    for t in ts:
        for a, b, ln in zip(corners[:-1], corners[1:], lengths):
            if t <= ln + 1e-12:
                out.append(a + (b - a) * min(t / ln, 1.0))
                break
            t -= ln
    return np.array(out)
