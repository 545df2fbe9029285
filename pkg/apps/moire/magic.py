# -*- encoding: utf-8 -*-
"""
Copyright (c) 2019 - present AppSeed.us

Magic parameters: alpha with dim ker(D(alpha) + k) > 0 at every k.
"""

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.optimize

from .chiral import build_D, coupling_matrix, dirac_diagonal
from .common import ConvergenceError, InputError
from .conf   import setting

logger = logging.getLogger(__name__)

MAX_ITER = 60

@dataclass
class MagicAngle:
    alpha        : complex
    multiplicity : int
    residual     : float
    singular     : list = None

    @property
    def flat_bands(self):
        return 2 * self.multiplicity

    @property
    def is_real(self):
        return abs(complex(self.alpha).imag) < setting('REAL_TOL')

    def to_dict(self):
        a = complex(self.alpha)
        return {
            'alpha_re'     : a.real,
            'alpha_im'     : a.imag,
            'multiplicity' : self.multiplicity,
            'flat_bands'   : self.flat_bands,
            'residual'     : self.residual,
        }

def default_probe(lat):
    return 0.1 * lat.g1 + 0.2 * lat.g2

def _check_probe(basis, k_probe):
    sites = basis.sites(k_probe)
    gap   = np.min(np.abs(dirac_diagonal(sites)))
    if gap < 1e-8:
        raise InputError('k_probe %s hits a Dirac momentum (|k+o+G| = %.2e)' % (k_probe, gap))
    return sites

def magic_spectrum(pot, basis, n_layers=None, k_probe=None, alpha_max=None):
    """
    Candidates alpha = -1/lambda over the eigenvalues of (D(0)+k)^-1 W, sorted by
    |alpha| and deduplicated.
    """
    k_probe   = default_probe(basis.lattice) if k_probe is None else np.asarray(k_probe, dtype=float)
    alpha_max = alpha_max or setting('ALPHA_MAX')
    dedup     = setting('DEDUP_TOL')

    sites = _check_probe(basis, k_probe)
    T     = coupling_matrix(pot, sites, basis) / dirac_diagonal(sites)[:, None]
    lam   = scipy.linalg.eigvals(T)
    lam   = lam[np.abs(lam) > 1.0 / alpha_max]

    cands = sorted(-1.0 / lam, key=lambda a: (round(abs(a), 8), a.imag))
    out   = []
    for a in cands:
        if all(abs(a - b) > dedup for b in out):
            out.append(a)

    logger.info('magic spectrum: %d candidates with |alpha| <= %g', len(out), alpha_max)
    return out

def singular_values(pot, alpha, k, basis):
    return scipy.linalg.svdvals(build_D(pot, alpha, k, basis).D)[::-1]

def _newton_step(pot, alpha, k, basis, W, m=3):
    """Smallest |delta| of the pencil on the m lowest singular triplets."""
    D = build_D(pot, alpha, k, basis).D
    U, s, Vh = scipy.linalg.svd(D)
    m  = min(m, len(s))
    U  = U[:, -m:]
    V  = Vh[-m:, :].conj().T
    S  = np.diag(s[-m:])
    B  = -(U.conj().T @ W @ V)
    ev = scipy.linalg.eigvals(S, B)
    ev = ev[np.isfinite(ev)]
    if ev.size == 0:
        raise ConvergenceError('singular pencil at alpha=%s' % alpha, last_residual=s[-1])
    return ev[np.argmin(np.abs(ev))], s[-1]

def refine_and_classify(pot, basis, n_layers=None, alpha0=None, k_probe=None):
    """
    Newton refinement in complex alpha on the smallest singular value of
    D(alpha) + k_probe. Truncation moves real magic angles slightly off the
    real axis, so the iteration is never projected; MagicAngle.is_real
    classifies the result.
    """
    k_probe = default_probe(basis.lattice) if k_probe is None else np.asarray(k_probe, dtype=float)
    detect  = setting('DETECT_TOL')
    mtol    = setting('MULTIPLICITY_TOL')

    sites = _check_probe(basis, k_probe)
    W     = coupling_matrix(pot, sites, basis)
    alpha = complex(alpha0)
    sigma = np.inf

    for it in range(MAX_ITER):
        delta, sigma = _newton_step(pot, alpha, k_probe, basis, W)
        logger.debug('refine it=%d alpha=%s sigma=%.3e', it, alpha, sigma)
        alpha = alpha + delta
        if abs(delta) < 1e-13 * max(1.0, abs(alpha)):
            break
    real = abs(alpha.imag) < setting('REAL_TOL')

    sv    = singular_values(pot, alpha, k_probe, basis)
    sigma = sv[0]
    if sigma >= detect:
        raise ConvergenceError('no magic parameter near %s (sigma=%.3e)' % (alpha0, sigma), last_residual=sigma)

    mult = int(np.sum(sv < mtol))

    # Polish on sigma_M for degenerate real angles split by truncation
    if real and mult >= 2:
        res = scipy.optimize.minimize_scalar(
            lambda x: singular_values(pot, x, k_probe, basis)[mult - 1],
            bounds=(alpha.real - 1e-4, alpha.real + 1e-4), method='bounded',
            options={'xatol': 1e-12},
        )
        sv_p = singular_values(pot, res.x, k_probe, basis)
        if sv_p[0] < detect and sv_p[mult - 1] < sv[mult - 1]:
            alpha, sv = complex(res.x, 0.0), sv_p

    out = MagicAngle(alpha=alpha, multiplicity=mult, residual=float(sv[0]), singular=[float(x) for x in sv[:4]])
    logger.info('magic alpha=%.9f%+.2ei multiplicity=%d residual=%.2e', alpha.real, alpha.imag, mult, sv[0])
    return out

def magic_angles(pot, basis, count=3, k_probe=None, alpha_max=None):
    """The first `count` real positive magic angles, refined and classified."""
    tol   = setting('REAL_TOL')
    cands = magic_spectrum(pot, basis, k_probe=k_probe, alpha_max=alpha_max)
    out   = []
    for a0 in sorted((a for a in cands if abs(a.imag) < tol and a.real > 0), key=lambda a: a.real):
        if any(abs(a0 - m.alpha) < 1e-4 for m in out):
            continue
        try:
            found = refine_and_classify(pot, basis, alpha0=a0, k_probe=k_probe)
        except ConvergenceError as e:
            logger.warning('candidate %s dropped: %s', a0, e)
            continue
        if not found.is_real:
            logger.warning('candidate %s refined off the real axis to %s', a0, found.alpha)
            continue
        out.append(found)
        if len(out) >= count:
            break
    return out
