# -*- encoding: utf-8 -*-
"""
Copyright (c) 2019 - present AppSeed.us

Tunneling potentials and the truncated chiral operator D(alpha) + k.

Layer j is sampled on momenta k + o_j + G with o_j = s_j * q1, s_j in {-1, 0, 1}.
The offsets make the layer reflection j -> N-1-j exact: o_j = -o_{N-1-j}.
A potential mode (a, b) of U_+ carries momentum -q1 + a*g1 + b*g2; U_-(r) = U_+(-r).
"""

import logging, math
from concurrent.futures import ThreadPoolExecutor
from dataclasses        import dataclass, field
from functools          import cached_property

import numpy as np
import scipy.linalg

from .common  import InputError, MoireError, OMEGA
from .conf    import setting
from .lattice import standard_lattice

logger = logging.getLogger(__name__)

@dataclass(eq=False)
class TunnelingPotential:
    modes : dict
    name  : str = 'custom'

    def momentum(self, lat, mode):
        a, b = mode
        return -lat.q1 + a * lat.g1 + b * lat.g2

    def label_nm(self, mode):
        """(n, m) label of the mode, Q = m*g1 - n*q2 + q1."""
        a, b = mode
        return 2 + 3 * b, a + 2 + 2 * b

    @staticmethod
    def mode_from_nm(n, m):
        if (n - 2) % 3:
            raise InputError('label (%d, %d) is not in the -q1 class' % (n, m))
        b = (n - 2) // 3
        return m - 2 - 2 * b, b

    def __call__(self, lat, r, sign=+1):
        """U_+ (sign=+1) or U_- (sign=-1) at real-space points r of shape (..., 2)."""
        r   = np.asarray(r, dtype=float)
        out = np.zeros(r.shape[:-1], dtype=complex)
        for mode, c in self.modes.items():
            out += c * np.exp(1j * sign * (r @ self.momentum(lat, mode)))
        return out

def _triad(coef):
    return {
        ( 0,  0): coef[0],
        (-1,  0): coef[1],
        ( 0, -1): coef[2],
    }

def potential_U0():
    return TunnelingPotential(modes=_triad([1.0, OMEGA, OMEGA ** 2]), name='u0')

def potential_phi(phi):
    """cos(2 pi phi) * U_0 + sin(2 pi phi) * sum_i omega^i exp(2i q_i.r)."""
    c, s  = math.cos(2 * math.pi * phi), math.sin(2 * math.pi * phi)
    modes = {mode: c * v for mode, v in _triad([1.0, OMEGA, OMEGA ** 2]).items()}
    # 2q1, 2q2, 2q3 in the -q1 class
    modes[(-1, -1)] = s * 1.0
    modes[( 1, -1)] = s * OMEGA
    modes[(-1,  1)] = s * OMEGA ** 2
    return TunnelingPotential(modes={m: complex(v) for m, v in modes.items() if abs(v) > 1e-15},
                              name='phi:%g' % phi)

def potential_U78():
    pot = potential_phi(7.0 / 8.0)
    pot.name = 'u78'
    return pot

def potential_from_file(path):
    """Custom potential: one `n m re im` line per mode, (n, m) labels."""
    modes = {}
    with open(path, 'r') as f:
        for line in f.read().splitlines():
            line = line.split('#')[0].strip()
            if not line:
                continue
            n, m, re, im = line.replace(',', ' ').split()
            modes[TunnelingPotential.mode_from_nm(int(n), int(m))] = complex(float(re), float(im))
    if not modes:
        raise InputError('no potential modes in ' + path)
    return TunnelingPotential(modes=modes, name='file:' + path)

def resolve_potential(tag):

    if tag == 'u0':
        return potential_U0()
    if tag == 'u78':
        return potential_U78()
    if tag.startswith('phi:'):
        return potential_phi(float(tag[4:]))

    return potential_from_file(tag)

def check_symmetries(pot, lat=None, tol=1e-12):
    """
    Rotation c(R3 Q) = omega c(Q), mirror c(Q) = conj c(-MQ) and the translation
    character exp(iQ.v1), common to all modes.
    """
    lat   = lat or standard_lattice()
    M     = np.diag([1.0, -1.0])
    table = {tuple(np.round(pot.momentum(lat, m), 9)): c for m, c in pot.modes.items()}

    def coef(Q):
        return table.get(tuple(np.round(Q, 9)), 0.0)

    rot = mir = 0.0
    chars = []
    for mode, c in pot.modes.items():
        Q    = pot.momentum(lat, mode)
        rot  = max(rot, abs(coef(lat.R3 @ Q) - OMEGA * c))
        mir  = max(mir, abs(c - np.conj(coef(-(M @ Q)))))
        chars.append(np.exp(1j * (Q @ lat.v1)))

    character = complex(chars[0])
    trans     = max(abs(ch - character) for ch in chars)
    return {
        'rotation'    : rot,
        'mirror'      : mir,
        'translation' : trans,
        'character'   : character,
        'ok'          : max(rot, mir, trans) < tol,
    }

def layer_shifts(n_layers):
    """s_j of the offsets o_j = s_j * q1."""
    c = (2 * (1 - n_layers)) % 3
    out = []
    for j in range(n_layers):
        s = (j + c) % 3
        out.append(-1 if s == 2 else s)
    return out

@dataclass(frozen=True, eq=False)
class Sites:
    k        : np.ndarray
    layer    : np.ndarray   # (n,)
    m        : np.ndarray   # (n, 2) dual-lattice integers
    momenta  : np.ndarray   # (n, 2) k + o_j + G

    def __len__(self):
        return len(self.layer)

    def of_layer(self, j):
        return np.flatnonzero(self.layer == j)

@dataclass(eq=False)
class PlaneWaveBasis:
    n_layers : int = 2
    cutoff   : float = None
    lattice  : object = None
    _cache   : dict = field(default_factory=dict, repr=False)

    def __post_init__(self):

        self.lattice = self.lattice or standard_lattice()
        if self.cutoff is None:
            self.cutoff = setting('CUTOFF')

        if self.n_layers < 2:
            raise InputError('n_layers must be >= 2, got %s' % self.n_layers)
        if self.cutoff < np.linalg.norm(self.lattice.q1):
            raise InputError('cutoff %g is below |q1|' % self.cutoff)

    @cached_property
    def shifts(self):
        return layer_shifts(self.n_layers)

    @cached_property
    def offsets(self):
        return np.array([s * self.lattice.q1 for s in self.shifts])

    @cached_property
    def nmax(self):
        """Half width of the coefficient box holding every fundamental-domain k."""
        lat   = self.lattice
        reach = self.cutoff + np.linalg.norm(lat.g1) + np.linalg.norm(lat.g2) + np.linalg.norm(lat.q1)
        return int(math.ceil(2.0 * reach / 3.0)) + 1

    def sites(self, k):

        k   = np.asarray(k, dtype=float)
        key = tuple(np.round(k, 12))
        if key in self._cache:
            return self._cache[key]

        lat   = self.lattice
        reach = self.cutoff + np.linalg.norm(k) + np.linalg.norm(lat.q1)
        n     = int(math.ceil(2.0 * reach / 3.0)) + 1
        rng   = np.arange(-n, n + 1)
        mm    = np.array(np.meshgrid(rng, rng, indexing='ij')).reshape(2, -1).T
        G     = lat.dual_vector(mm)

        layers, ms, moms = [], [], []
        for j, o in enumerate(self.offsets):
            p    = k + o + G
            keep = np.linalg.norm(p, axis=1) <= self.cutoff
            layers.append(np.full(keep.sum(), j))
            ms.append(mm[keep])
            moms.append(p[keep])

        out = Sites(k=k, layer=np.concatenate(layers), m=np.concatenate(ms), momenta=np.concatenate(moms))
        if len(self._cache) < 4096:
            self._cache[key] = out
        return out

    def box_index(self, sites):
        """Flat positions of the sites in a (n_layers, B, B) coefficient box."""
        B = 2 * self.nmax + 1
        m = sites.m + self.nmax
        if m.min() < 0 or m.max() >= B:
            raise InputError('momentum %s lies outside the coefficient box' % sites.k)
        return (sites.layer * B + m[:, 0]) * B + m[:, 1]

@dataclass(eq=False)
class ChiralMatrices:
    D     : np.ndarray
    alpha : complex
    k     : np.ndarray
    sites : Sites = None

    @cached_property
    def H(self):
        n = self.D.shape[0]
        H = np.zeros((2 * n, 2 * n), dtype=complex)
        H[:n, n:] = self.D.conj().T
        H[n:, :n] = self.D
        return H

def coupling_matrix(pot, sites, basis):
    """The alpha = 1 interlayer part of D."""
    n = len(sites)
    W = np.zeros((n, n), dtype=complex)

    for j in range(basis.n_layers - 1):
        rows  = sites.of_layer(j)
        cols  = sites.of_layer(j + 1)
        delta = (basis.shifts[j] - basis.shifts[j + 1] + 1) // 3
        diff  = sites.m[rows][:, None, :] - sites.m[cols][None, :, :] - delta
        up    = np.zeros((len(rows), len(cols)), dtype=complex)
        for (a, b), c in pot.modes.items():
            up += c * ((diff[..., 0] == a) & (diff[..., 1] == b))
        W[np.ix_(rows, cols)] = up
        # U_- block is the transpose of the U_+ block
        W[np.ix_(cols, rows)] = up.T

    return W

def dirac_diagonal(sites):
    return sites.momenta[:, 0] + 1j * sites.momenta[:, 1]

def build_D(pot, alpha, k, basis, n_layers=None):

    if n_layers is not None and n_layers != basis.n_layers:
        raise InputError('basis holds %d layers, %d requested' % (basis.n_layers, n_layers))

    sites = basis.sites(k)
    D     = alpha * coupling_matrix(pot, sites, basis)
    D[np.diag_indices_from(D)] += dirac_diagonal(sites)

    return ChiralMatrices(D=D, alpha=alpha, k=np.asarray(k, dtype=float), sites=sites)

def _bands_at(pot, alpha, k, basis):
    try:
        return scipy.linalg.eigvalsh(build_D(pot, alpha, k, basis).H)
    except np.linalg.LinAlgError as e:
        raise MoireError('eigensolver failed at k=%s: %s' % (k, e))

def band_structure(pot, alpha, kpath, basis, n_layers=None, threads=None):

    if n_layers is not None and n_layers != basis.n_layers:
        raise InputError('basis holds %d layers, %d requested' % (basis.n_layers, n_layers))

    threads = threads or setting('THREADS')
    logger.info('band structure: %d momenta, %d layers, alpha=%s', len(kpath), basis.n_layers, alpha)

    with ThreadPoolExecutor(max_workers=max(1, int(threads))) as pool:
        return list(pool.map(lambda k: _bands_at(pot, alpha, k, basis), list(kpath)))

def dirac_points(basis):
    """Momenta where layer j decouples to a zero mode at alpha = 0: k = -o_j."""
    return [-o for o in basis.offsets]
