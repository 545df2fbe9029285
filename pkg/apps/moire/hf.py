# -*- encoding: utf-8 -*-
"""
Copyright (c) 2019 - present AppSeed.us

Hartree and Fock energies of translation-invariant, uniformly half-filled
1-RDMs on the 2M flat bands; P(k)_nm = <f+_mk f_nk>, Q = 2P - 1.
"""

import logging, math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.stats import unitary_group

from .common import COMMON, InputError
from .conf   import setting

logger = logging.getLogger(__name__)

@dataclass(frozen=True)
class ScreenedCoulomb:
    epsilon : float = 1.0
    d       : float = 1.0

    def __post_init__(self):
        if self.epsilon <= 0 or self.d <= 0:
            raise InputError('epsilon and d must be positive')

    @classmethod
    def from_settings(cls):
        return cls(epsilon=setting('EPSILON'), d=setting('GATE_D'))

def v_hat(pot, q):
    """(2 pi/eps) tanh(|q| d/2)/|q|, pi d/eps at q = 0."""
    qn  = np.linalg.norm(np.asarray(q, dtype=float), axis=-1)
    out = np.full(qn.shape, math.pi * pot.d / pot.epsilon)
    nz  = qn > 1e-14
    out[nz] = (2 * math.pi / pot.epsilon) * np.tanh(qn[nz] * pot.d / 2) / qn[nz]
    return out if out.ndim else float(out)

@dataclass
class DensityField:
    P : np.ndarray   # (N_k, 2M, 2M)

    @property
    def M(self):
        return self.P.shape[-1] // 2

    @property
    def n_k(self):
        return self.P.shape[0]

    @property
    def Q(self):
        return 2 * self.P - np.eye(2 * self.M)

    def validate(self, tol=1e-10):
        err = max(
            np.max(np.abs(self.P - np.swapaxes(self.P.conj(), -1, -2))),
            np.max(np.abs(self.P @ self.P - self.P)),
            np.max(np.abs(np.trace(self.P, axis1=-2, axis2=-1) - self.M)),
        )
        if err > tol:
            raise InputError('not a uniformly half-filled projector field (%.2e)' % err)
        return err

@dataclass
class CSParametrization:
    theta : np.ndarray   # (N_k, M) in [0, pi], ascending per k
    U1    : np.ndarray   # (N_k, M, M)
    U2    : np.ndarray
    V     : np.ndarray

    @property
    def M(self):
        return self.theta.shape[-1]

    def occupied(self):
        """Phi(k) = diag(U1, U2) [cos(theta/2); sin(theta/2)] V^+."""
        c = np.cos(self.theta / 2)[:, None, :]
        s = np.sin(self.theta / 2)[:, None, :]
        Vh = np.swapaxes(self.V.conj(), -1, -2)
        return np.concatenate([(self.U1 * c) @ Vh, (self.U2 * s) @ Vh], axis=1)

    def compose(self):
        Phi = self.occupied()
        return DensityField(P=Phi @ np.swapaxes(Phi.conj(), -1, -2))

def _grid_size(grid):
    return grid if isinstance(grid, int) else grid.n_k

def fsd_density(sign, M, grid):
    """Fully occupied positive (sign=+1) or negative (sign=-1) bands at every k."""
    if sign not in (1, -1):
        raise InputError('sign must be +1 or -1')
    d = np.zeros(2 * M)
    d[:M] = 1.0 if sign > 0 else 0.0
    d[M:] = 0.0 if sign > 0 else 1.0
    return DensityField(P=np.tile(np.diag(d).astype(complex), (_grid_size(grid), 1, 1)))

def density_from_occupied(Phi):
    return DensityField(P=Phi @ np.swapaxes(Phi.conj(), -1, -2))

def random_density(M, grid, rng):
    n_k = _grid_size(grid)
    Phi = np.stack([unitary_group.rvs(2 * M, random_state=rng)[:, :M] for _ in range(n_k)])
    return density_from_occupied(Phi)

def random_cs_density(M, grid, rng, max_angle=math.pi, base=0.0):
    """CS-parametrized density with random angles around `base` and random block unitaries."""
    n_k   = _grid_size(grid)
    theta = np.clip(base + rng.uniform(-max_angle, max_angle, size=(n_k, M)), 0.0, math.pi)

    def units():
        if M == 1:
            return np.exp(2j * np.pi * rng.uniform(size=(n_k, 1, 1)))
        return np.stack([unitary_group.rvs(M, random_state=rng) for _ in range(n_k)])

    cs = CSParametrization(theta=theta, U1=units(), U2=units(), V=units())
    return cs.compose()

def cs_decompose(P):
    """CS factors of the occupied isometry at every k; theta = 2 x LAPACK angle."""
    M, n_k = P.M, P.n_k
    theta  = np.zeros((n_k, M))
    U1, U2, V = (np.zeros((n_k, M, M), dtype=complex) for _ in range(3))

    for ik in range(n_k):
        w, X = scipy.linalg.eigh(P.P[ik])
        Phi  = X[:, -M:]
        Full = np.hstack([Phi, scipy.linalg.null_space(Phi.conj().T)])
        (u1, u2), th, (v1h, _) = scipy.linalg.cossin(Full, p=M, q=M, separate=True)
        order = np.argsort(th, kind='stable')
        theta[ik] = 2 * th[order]
        U1[ik]    = u1[:, order]
        U2[ik]    = u2[:, order]
        V[ik]     = v1h[order, :].conj().T

    return CSParametrization(theta=theta, U1=U1, U2=U2, V=V)

def cs_compose(cs):
    return cs.compose()

def _weights(table, pot):
    """(ik, iq, G, k'', V) for every stored q' = q + G, cached on the table per potential."""
    if pot in table.weights:
        return table.weights[pot]
    grid = table.grid
    out  = []
    for iq, G in table.momenta():
        V = v_hat(pot, table.momentum(iq, G))
        for ik in range(grid.n_k):
            k2, _ = grid.add(ik, iq)
            out.append((ik, iq, table.g_index(iq, G), k2, V))
    table.weights[pot] = out
    return out

def hartree_J(table, P, pot):
    """(1/(|Omega| N_k)) sum_G V(G) |sum_k tr(Lambda_k(G) Q(k))|^2."""
    Q, N = P.Q, table.grid.n_k
    total = 0.0
    for gi, G in enumerate(table.shells[0]):
        s = sum(np.trace(table.entries[(ik, 0)][gi] @ Q[ik]) for ik in range(N))
        total += v_hat(pot, table.momentum(0, G)) * abs(s) ** 2
    return total / (table.cell_area * N)

def hartree_J_double(table, P, pot):
    """Double sum over (k, q) of V(G) tr(Lambda_k(G)Q(k)) tr(Lambda_k+q(G)^+ Q(k+q))."""
    Q, grid = P.Q, table.grid
    total = 0.0
    for gi, G in enumerate(table.shells[0]):
        V = v_hat(pot, table.momentum(0, G))
        for ik in range(grid.n_k):
            a = np.trace(table.entries[(ik, 0)][gi] @ Q[ik])
            for iq in range(grid.n_k):
                k2, _ = grid.add(ik, iq)
                b = np.trace(table.entries[(k2, 0)][gi].conj().T @ Q[k2])
                total += V * a * b
    return float(np.real(total)) / (table.cell_area * grid.n_k)

def fock_K(table, P, pot):
    """-(1/(|Omega| N_k)) sum V(q') tr(Lambda Q(k+q) Lambda^+ Q(k))."""
    Q = P.Q
    total = 0.0
    for ik, iq, gi, k2, V in _weights(table, pot):
        L = table.entries[(ik, iq)][gi]
        total += V * np.trace(L @ Q[k2] @ L.conj().T @ Q[ik]).real
    return -total / (table.cell_area * table.grid.n_k)

def _rotated_blocks(table, cs, ik, iq, gi, k2):
    M  = table.M
    A  = table.entries[(ik, iq)][gi][:M, :M]
    B1 = cs.U1[ik].conj().T @ A @ cs.U1[k2]
    B2 = cs.U2[ik].conj().T @ A.conj() @ cs.U2[k2]
    return B1, B2

def fock_K_cs(table, cs, pot):
    """
    Cosine form: -(1/(2|Omega| N_k)) sum V sum_ij
    |b1+b2|^2 cos(theta_i(k) - theta_j(k'')) + |b1-b2|^2 cos(theta_i(k) + theta_j(k'')).
    """
    th    = cs.theta
    total = 0.0
    for ik, iq, gi, k2, V in _weights(table, pot):
        B1, B2 = _rotated_blocks(table, cs, ik, iq, gi, k2)
        minus  = np.cos(th[ik][:, None] - th[k2][None, :])
        plus   = np.cos(th[ik][:, None] + th[k2][None, :])
        total += V * np.sum(np.abs(B1 + B2) ** 2 * minus + np.abs(B1 - B2) ** 2 * plus)
    return -total / (2 * table.cell_area * table.grid.n_k)

def hartree_J_cs(table, cs, pot):
    """Hartree energy with tr(Lambda_k(G) Q(k)) = tr((B1 - B2) cos theta(k))."""
    N = table.grid.n_k
    total = 0.0
    for gi, G in enumerate(table.shells[0]):
        s = 0.0
        for ik in range(N):
            B1, B2 = _rotated_blocks(table, cs, ik, 0, gi, ik)
            s += np.sum(np.diag(B1 - B2) * np.cos(cs.theta[ik]))
        total += v_hat(pot, table.momentum(0, G)) * abs(s) ** 2
    return total / (table.cell_area * N)

def hf_constant(table, pot):
    """(1/(4 N_k |Omega|)) sum V(q') ||Lambda_k(q')||_F^2."""
    total = 0.0
    for ik, iq, gi, k2, V in _weights(table, pot):
        total += V * np.sum(np.abs(table.entries[(ik, iq)][gi]) ** 2)
    return total / (4 * table.cell_area * table.grid.n_k)

def hf_energy(table, P, pot):
    """Slater-determinant expectation of the FBI Hamiltonian, (J + K)/4 + C0."""
    return (hartree_J(table, P, pot) + fock_K(table, P, pot)) / 4 + hf_constant(table, pot)

def fock_flip_probe(table, P, ik, pot):
    """Change of K when theta(k) is flipped to pi - theta(k) at a single k."""
    cs = cs_decompose(P)
    flipped = CSParametrization(theta=cs.theta.copy(), U1=cs.U1, U2=cs.U2, V=cs.V)
    flipped.theta[ik] = math.pi - flipped.theta[ik]
    return fock_K_cs(table, flipped, pot) - fock_K_cs(table, cs, pot)

def energies(table, P, pot):
    J, K = hartree_J(table, P, pot), fock_K(table, P, pot)
    return {'J': J, 'K': K, 'total': J + K, 'hf_energy': (J + K) / 4 + hf_constant(table, pot)}

def band_sets(M, sign):
    pos, neg = list(range(M)), list(range(M, 2 * M))
    return (pos, neg) if sign > 0 else (neg, pos)

def charge_gap(table, pot, sign, direction, c):
    """
    Energy of one electron removed from (direction='remove') or added to
    (direction='add') the ferromagnetic determinant of the given sign.
    c has shape (N_k, M) over the occupied (remove) or empty (add) bands.
    """
    if sign not in (1, -1):
        raise InputError('sign must be +1 or -1')
    if direction not in (COMMON.DIR_ADD, COMMON.DIR_REMOVE):
        raise InputError('direction must be add or remove')

    grid, M = table.grid, table.M
    c = np.asarray(c, dtype=complex)
    if c.shape != (grid.n_k, M):
        raise InputError('coefficients must have shape (%d, %d), got %s' % (grid.n_k, M, c.shape))
    if abs(np.sum(np.abs(c) ** 2) - 1.0) > 1e-8:
        raise InputError('coefficients must be normalized')

    occ, emp = band_sets(M, sign)
    total = 0.0
    for iq, G in table.momenta():
        V  = v_hat(pot, table.momentum(iq, G))
        gi = table.g_index(iq, G)
        for ik in range(grid.n_k):
            if direction == COMMON.DIR_REMOVE:
                L = table.entries[(ik, iq)][gi][np.ix_(occ, occ)]
                total += V * np.real(c[ik].conj() @ (L @ L.conj().T) @ c[ik])
            else:
                ik2, _ = grid.sub(ik, iq)
                L = table.entries[(ik2, iq)][gi][np.ix_(emp, emp)]
                total += V * np.real(c[ik].conj() @ (L.conj().T @ L) @ c[ik])

    return total / (grid.n_k * table.cell_area)
