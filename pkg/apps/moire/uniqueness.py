# -*- encoding: utf-8 -*-
"""
Copyright (c) 2019 - present AppSeed.us

Sufficient conditions for the ferromagnetic Slater determinants to be the
unique translation-invariant HF ground states, checked in momentum space and
cross-checked in real space.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses        import asdict, dataclass, field

import numpy as np
import scipy.linalg
from scipy.stats import unitary_group

from .common      import COMMON, InputError, R_S
from .conf        import setting
from .form_factor import pair_product
from .gauge       import check_grid_assumption, evaluate_at, flat_projectors

logger = logging.getLogger(__name__)

RANDOM_SAMPLES = 200

@dataclass
class UniquenessReport:
    model               : str
    k_star              : int
    k_star_momentum     : list
    trace_witness       : dict
    projector_condition : dict
    fullrank_chain      : float
    grid_assumption     : dict = field(default_factory=dict)
    real_space          : dict = field(default_factory=dict)
    overall             : bool = False

    def to_dict(self):
        return asdict(self)

def _scale(table, ik):
    return max(np.linalg.norm(table.A(ik, 0, G), 2) for G in table.shells[0])

def trace_criterion(table, ik):
    """max_G |Im tr A_k(G)| over the stored shell and its argmax G."""
    if not 0 <= ik < table.grid.n_k:
        raise InputError('k#%s is not on the grid' % ik)
    vals = [abs(np.trace(table.A(ik, 0, G)).imag) for G in table.shells[0]]
    i    = int(np.argmax(vals))
    return float(vals[i]), [int(x) for x in table.shells[0][i]]

def commutator_witness(table, ik):
    """max over G', G'' of ||[A_k(G'), A_k(G'')]|| and the pair attaining it."""
    As   = [table.A(ik, 0, G) for G in table.shells[0]]
    best = (0.0, None)
    for i in range(len(As)):
        for j in range(i + 1, len(As)):
            c = np.linalg.norm(As[i] @ As[j] - As[j] @ As[i], 2)
            if c > best[0]:
                best = (float(c), ([int(x) for x in table.shells[0][i]], [int(x) for x in table.shells[0][j]]))
    return best

def commutant_dimension(table, ik, tol=None):
    """Dimension of {X : [A_k(G), X] = 0 for all G}; 1 means no common reducing subspace."""
    tol = tol or setting('NONZERO_TOL')
    M   = table.M
    I   = np.eye(M)
    K   = np.vstack([np.kron(I, A) - np.kron(A.T, I) for A in (table.A(ik, 0, G) for G in table.shells[0])])
    s   = scipy.linalg.svdvals(K)
    return int(np.sum(s < tol * max(1.0, s[0]))) + max(0, M * M - len(s))

def _random_projector_margin(table, ik, rng):
    """min over sampled rank-r projectors of max_G ||(I - P) A_k(G) P||."""
    M   = table.M
    As  = [table.A(ik, 0, G) for G in table.shells[0]]
    low = np.inf
    for r in range(1, M):
        for _ in range(RANDOM_SAMPLES):
            X = unitary_group.rvs(M, random_state=rng)[:, :r]
            P = X @ X.conj().T
            Q = np.eye(M) - P
            low = min(low, max(np.linalg.norm(Q @ A @ P, 2) for A in As))
    return float(low)

def projector_criterion(table, ik, M=None, rng=None):
    M     = M or table.M
    tol   = setting('NONZERO_TOL') * _scale(table, ik)

    if M == 1:
        return {'passed': True, 'method': COMMON.METHOD_EXACT_M1, 'value': None, 'heuristic': False}

    if M == 2:
        value, pair = commutator_witness(table, ik)
        return {'passed': value > tol, 'method': COMMON.METHOD_EXACT_M2, 'value': value,
                'pair': pair, 'heuristic': False}

    rng    = rng if rng is not None else np.random.default_rng(setting('SEED'))
    margin = _random_projector_margin(table, ik, rng)
    logger.warning('projector condition for M=%d checked by random sampling only', M)
    return {'passed': margin > tol, 'method': COMMON.METHOD_RANDOM, 'value': margin,
            'commutant_dim': commutant_dimension(table, ik), 'heuristic': True}

def fullrank_chain(table, grid=None):
    """Min over forward neighbour pairs of max_G sigma_min(Lambda_k(fold(k'-k) + G))."""
    grid  = grid or table.grid
    worst = np.inf
    for ik in range(grid.n_k):
        for jk, _ in grid.neighbours(ik):
            iq, _ = grid.sub(jk, ik)
            best  = max(scipy.linalg.svdvals(block)[-1] for block in table.entries[(ik, iq)])
            worst = min(worst, best)
    if not np.isfinite(worst):
        # single-point grid: only q = 0, Lambda_k(0) = I
        worst = 1.0
    return float(worst)

def _minus_index(n):
    # -x on the half-shifted grid x = (i + 1/2)/n
    return np.arange(n)[::-1]

def real_space_criteria(basis, ik, n=64):
    """
    Evenness of tr rho(r) and, for two positive bands, the determinant and
    commutator witnesses with r in {0, r_S, -r_S} against every grid r'.
    """
    if n < 64:
        raise InputError('real-space grid must be at least 64x64')
    lat, M = basis.lattice, basis.M
    rho    = pair_product(basis, ik, n)
    tr     = np.real(np.trace(rho, axis1=-2, axis2=-1))
    inv    = _minus_index(n)
    diff   = np.abs(tr - tr[np.ix_(inv, inv)])
    i, j   = np.unravel_index(np.argmax(diff), diff.shape)
    scale  = float(np.max(tr))
    tol    = setting('NONZERO_TOL')

    out = {
        'evenness_residual' : float(diff[i, j] / scale),
        'evenness_witness'  : [(i + 0.5) / n, (j + 0.5) / n],
        'even'              : bool(diff[i, j] <= tol * scale),
    }
    if M != 2:
        return out

    pts   = np.array([[0.0, 0.0], R_S, -np.asarray(R_S)])
    u     = evaluate_at(basis.coeffs[ik, :M], lat, pts)            # (M, 2, N, 3)
    u     = u.reshape(M, -1, len(pts))
    rho_s = np.einsum('mip,nip->pmn', u.conj(), u)
    grid  = rho.reshape(-1, M, M)

    def row(r):
        return r[..., 0, 0] - r[..., 1, 1], r[..., 0, 1]

    a_s, b_s = row(rho_s)
    a_g, b_g = row(grid)
    det      = a_s[:, None] * b_g[None, :] - a_g[None, :] * b_s[:, None]
    comm     = np.einsum('pab,qbc->pqac', rho_s, grid) - np.einsum('qab,pbc->pqac', grid, rho_s)
    comm     = np.linalg.norm(comm, ord=2, axis=(-2, -1))

    out.update({
        'det_max'        : float(np.max(np.abs(det)) / scale ** 2),
        'det_by_point'   : [float(x) for x in np.max(np.abs(det), axis=1) / scale ** 2],
        'commutator_max' : float(np.max(comm) / scale ** 2),
    })
    out['det_nonzero'] = out['det_max'] > tol
    return out

def _preferred_points(model, grid):
    """+-q1 first for the four-band models when they lie on the grid."""
    lat   = grid.lattice
    first = []
    if model in (COMMON.MODEL_TBG4, COMMON.MODEL_ETTG4):
        for q in (lat.q1, -lat.q1):
            if grid.contains(q):
                ik, _ = grid.locate(q)
                if ik not in first:
                    first.append(ik)
    return first + [ik for ik in range(grid.n_k) if ik not in first]

def _momentum_criteria(table, ik, rng):
    value, G = trace_criterion(table, ik)
    tol      = setting('NONZERO_TOL') * _scale(table, ik)
    proj     = projector_criterion(table, ik, rng=rng)
    return ik, {'G': G, 'value': value, 'nonzero': value > tol}, proj

def verdict(model, table, basis, threads=None, rng=None, n_r=64):
    """Runs every criterion on the grid and picks the first k passing both momentum conditions."""
    if model not in COMMON.MODELS:
        raise InputError('unknown model %r' % model)
    grid    = table.grid
    threads = threads or setting('THREADS')
    seed    = setting('SEED')
    order   = _preferred_points(model, grid)

    # one generator per k so the outcome does not depend on the worker count
    rngs = {ik: np.random.default_rng([seed, ik]) for ik in order} if rng is None else {ik: rng for ik in order}
    with ThreadPoolExecutor(max_workers=max(1, int(threads))) as pool:
        scans = list(pool.map(lambda ik: _momentum_criteria(table, ik, rngs[ik]), order))

    passing = [s for s in scans if s[1]['nonzero'] and s[2]['passed']]
    ik, trace, proj = passing[0] if passing else max(scans, key=lambda s: s[1]['value'])

    ok, worst, dmax = check_grid_assumption(flat_projectors(basis))
    chain = fullrank_chain(table, grid)
    tol   = setting('NONZERO_TOL')

    report = UniquenessReport(
        model               = model,
        k_star              = int(ik),
        k_star_momentum     = [float(x) for x in grid.points[ik]],
        trace_witness       = trace,
        projector_condition = proj,
        fullrank_chain      = chain,
        grid_assumption     = {'ok': bool(ok), 'max_distance': dmax, 'pair': [None if w is None else int(w) for w in worst]},
        real_space          = real_space_criteria(basis, ik, n_r),
    )
    report.overall = bool(trace['nonzero'] and proj['passed'] and chain > tol and ok)

    if not report.overall:
        logger.warning('%s: uniqueness criteria not met (trace=%s projector=%s chain=%.2e grid=%s)',
                       model, trace['nonzero'], proj['passed'], chain, ok)
    logger.info('%s verdict at k#%d: %s', model, ik, report.overall)
    return report
