# -*- encoding: utf-8 -*-
"""
Copyright (c) 2019 - present AppSeed.us

Flat-band Bloch functions on a momentum grid and their gauge.

Coefficients live in a box indexed (band, sublattice, layer, m1, m2) with
m in [-nmax, nmax]^2, and u_nk(r) = |Omega|^-1 sum_G u_nk(G) exp(iG.r).
Bands 0..M-1 are the A-polarized n = 1..M, bands M..2M-1 their Q-images.
"""

import logging, math
from concurrent.futures import ThreadPoolExecutor
from dataclasses        import dataclass, field

import numpy as np
import scipy.fft
import scipy.linalg

from .chiral import build_D
from .common import InputError, NotMagicError, SymmetryError
from .conf   import setting

logger = logging.getLogger(__name__)

SUB_A, SUB_B = 0, 1

@dataclass(eq=False)
class KernelStates:
    sites    : object
    vectors  : np.ndarray   # (n_sites, dim) orthonormal columns
    singular : np.ndarray   # ascending
    M        : int

    @property
    def dim(self):
        return self.vectors.shape[1]

    @property
    def crossing(self):
        return self.dim > self.M

def kernel_states(pot, alpha, k, basis, n_layers=None, M=1, flat_tol=None):
    """Right singular vectors of D(alpha)+k with singular value below flat_tol."""
    flat_tol = flat_tol or setting('FLAT_TOL')
    chi      = build_D(pot, alpha, k, basis, n_layers)
    _, s, Vh = scipy.linalg.svd(chi.D)
    s, V     = s[::-1], Vh[::-1].conj().T

    if len(s) < M or s[M - 1] >= flat_tol:
        raise NotMagicError('alpha=%s is not magic at multiplicity %d (sigma_%d=%.2e at k=%s)'
                            % (alpha, M, M, s[min(M, len(s)) - 1], np.round(k, 6)))

    dim = int(np.sum(s < flat_tol))
    return KernelStates(sites=chi.sites, vectors=V[:, :dim], singular=s, M=M)

def shift_box(arr, d):
    """out[..., m] = arr[..., m + d], zero filled."""
    d1, d2 = int(d[0]), int(d[1])
    B      = arr.shape[-1]
    out    = np.zeros_like(arr)
    if abs(d1) >= B or abs(d2) >= B:
        return out
    src1 = slice(max(d1, 0), B + min(d1, 0))
    dst1 = slice(max(-d1, 0), B + min(-d1, 0))
    src2 = slice(max(d2, 0), B + min(d2, 0))
    dst2 = slice(max(-d2, 0), B + min(-d2, 0))
    out[..., dst1, dst2] = arr[..., src1, src2]
    return out

def layer_reflect(arr):
    """L: u(G; sigma, j) -> (-1)^j u(-G; sigma, N-1-j) on (..., 2, N, B, B) boxes."""
    n_layers = arr.shape[-3]
    sign     = np.array([(-1) ** j for j in range(n_layers)])[:, None, None]
    return sign * arr[..., ::-1, ::-1, ::-1]

def rotate_box(arr, basis, k=None):
    """C3 momentum rotation psi'(p) = psi(R3^-1 p) at k = 0."""
    lat   = basis.lattice
    Rinv  = lat.R3.T
    A     = np.rint(np.column_stack([lat.dual_coords(Rinv @ lat.g1), lat.dual_coords(Rinv @ lat.g2)])).astype(int)
    q3    = np.rint(lat.dual_coords(Rinv @ lat.q1 - lat.q1)).astype(int)
    N     = basis.nmax
    B     = 2 * N + 1
    rng   = np.arange(-N, N + 1)
    mm    = np.array(np.meshgrid(rng, rng, indexing='ij'))
    out   = np.zeros_like(arr)
    for j, s in enumerate(basis.shifts):
        src  = np.tensordot(A, mm, axes=1) + (s * q3)[:, None, None]
        ok   = (np.abs(src[0]) <= N) & (np.abs(src[1]) <= N)
        s1   = np.where(ok, src[0] + N, 0)
        s2   = np.where(ok, src[1] + N, 0)
        vals = arr[..., j, :, :][..., s1, s2]
        out[..., j, :, :] = np.where(ok, vals, 0.0)
    return out

def canonical_frame(V):
    """Pivoted-QR rows fixed to identity, then Loewdin orthonormalization."""
    M = V.shape[1]
    _, _, piv = scipy.linalg.qr(V.conj().T, pivoting=True, mode='economic')
    rows = np.sort(piv[:M])
    B    = V @ scipy.linalg.inv(V[rows, :])
    w, X = scipy.linalg.eigh(B.conj().T @ B)
    return B @ (X @ np.diag(w ** -0.5) @ X.conj().T)

def frame_distance(X, Y):
    """Operator-norm distance of the projectors onto two equal-dimension orthonormal frames."""
    s = scipy.linalg.svdvals(X.conj().T @ Y)
    return float(math.sqrt(max(0.0, 1.0 - float(np.min(s)) ** 2)))

@dataclass(eq=False)
class FlatBandBasis:
    pot      : object
    alpha    : complex
    basis    : object
    grid     : object
    M        : int
    kernels  : dict = field(default_factory=dict, repr=False)
    coeffs   : np.ndarray = field(default=None, repr=False)
    crossing : set = field(default_factory=set)
    fixed    : bool = False

    @property
    def lattice(self):
        return self.basis.lattice

    @property
    def n_layers(self):
        return self.basis.n_layers

    @property
    def box(self):
        return 2 * self.basis.nmax + 1

    def empty_box(self, n_bands):
        B = self.box
        return np.zeros((n_bands, 2, self.n_layers, B, B), dtype=complex)

    def to_box(self, sites, vectors, sub=SUB_A):
        """Site vectors (n_sites, n) -> (n, 2, N, B, B) box."""
        out  = self.empty_box(vectors.shape[1])
        flat = out[:, sub].reshape(vectors.shape[1], -1)
        flat[:, self.basis.box_index(sites)] = vectors.T
        out[:, sub] = flat.reshape(out[:, sub].shape)
        return out

    def from_box(self, sites, box, sub=SUB_A):
        flat = box[:, sub].reshape(box.shape[0], -1)
        return flat[:, self.basis.box_index(sites)].T

    def states(self, ik, G0=(0, 0)):
        """u_{k+G0} = u_k(. + G0) for grid point ik."""
        if G0[0] == 0 and G0[1] == 0:
            return self.coeffs[ik]
        return shift_box(self.coeffs[ik], G0)

    def frame(self, ik, G0=(0, 0)):
        """Orthonormal (n_box, 2M) frame of the flat space at k + G0."""
        st = self.states(ik, G0)
        return st.reshape(st.shape[0], -1).T / math.sqrt(self.lattice.cell_area)

    def mixed(self, unitaries):
        """Residual gauge change: u_n -> sum_m u_m U_mn on n>0 and conj(U) on n<0."""
        out = self.coeffs.copy()
        M   = self.M
        for ik, U in enumerate(unitaries):
            out[ik, :M]  = np.tensordot(U.T, self.coeffs[ik, :M], axes=1)
            out[ik, M:]  = np.tensordot(U.conj().T, self.coeffs[ik, M:], axes=1)
        return FlatBandBasis(pot=self.pot, alpha=self.alpha, basis=self.basis, grid=self.grid, M=self.M,
                             kernels=self.kernels, coeffs=out, crossing=set(self.crossing), fixed=True)

def raw_flat_bands(pot, alpha, grid, basis, M, threads=None):
    """Per-k kernels of D(alpha)+k, no gauge applied."""
    threads = threads or setting('THREADS')
    pts     = list(grid.points)

    with ThreadPoolExecutor(max_workers=max(1, int(threads))) as pool:
        ks = list(pool.map(lambda k: kernel_states(pot, alpha, k, basis, M=M), pts))

    out = FlatBandBasis(pot=pot, alpha=alpha, basis=basis, grid=grid, M=M, kernels=dict(enumerate(ks)))
    out.crossing = {ik for ik, ks_ in out.kernels.items() if ks_.crossing}
    if out.crossing:
        logger.warning('crossing points (kernel dim > %d): %s', M, sorted(out.crossing))
    return out

def overlap_selection(K, Y, M):
    """
    Orthonormal combinations of the columns of K spanning the M-dim subspace
    with the largest overlap with span(Y); returns (combinations, overlaps).
    Both frames must be expressed on the same coefficients.
    """
    U, s, _ = scipy.linalg.svd(K.conj().T @ Y)
    return U[:, :M], s[:M]

def _grid_neighbours(grid, ik):
    """(index, G) of every grid neighbour of ik, backward steps carrying -G."""
    out = list(grid.neighbours(ik))
    for j in range(grid.n_k):
        for nb, G in grid.neighbours(j):
            if nb == ik and j != ik:
                out.append((j, -G))
    return out

def _continued_subspace(raw, ik):
    """M-dim part of a degenerate kernel overlapping most with a non-crossing neighbour's flat space."""
    ks = raw.kernels[ik]
    for nb, G in _grid_neighbours(raw.grid, ik):
        if nb in raw.crossing:
            continue
        other = raw.kernels[nb]
        Kb    = raw.to_box(ks.sites, ks.vectors).reshape(ks.vectors.shape[1], -1)
        Yb    = shift_box(raw.to_box(other.sites, other.vectors), G).reshape(other.vectors.shape[1], -1)
        X, s  = overlap_selection(Kb.T, Yb.T, raw.M)
        logger.debug('crossing k=%d continued from k=%d, overlaps %s', ik, nb, np.round(s, 6))
        if s[-1] < 0.5:
            logger.warning('crossing k=%d: weak overlap %.3f with neighbour k=%d', ik, s[-1], nb)
        return ks.vectors @ X

    logger.warning('crossing k=%d has no non-crossing neighbour; keeping the lowest %d kernel vectors', ik, raw.M)
    return ks.vectors[:, :raw.M]

def _is_canonical(grid, ik, partner):
    """Of a (k, -k) pair, the point whose shortest representative is larger in (k1, k2, -index)."""
    def key(i):
        frac = grid.frac[i]
        reps = [frac - np.array([a, b]) for a in (0, 1) for b in (0, 1)]
        vecs = [grid.lattice.dual_vector(r) for r in reps]
        norms = [round(float(np.linalg.norm(v)), 9) for v in vecs]
        best = vecs[int(np.argmin(norms))]
        return (round(float(best[0]), 9), round(float(best[1]), 9), -i)
    return key(ik) > key(partner)

def gauge_fix(raw):
    """
    Canonical points get a pivoted-QR frame of their kernel (continued through
    crossings), their -k partners the layer-reflection image, negative bands the
    composite-symmetry image; all bands normalized to |Omega| in the box.
    Points are swept in grid index order.
    """
    grid, M   = raw.grid, raw.M
    area      = raw.lattice.cell_area
    flat_tol  = setting('FLAT_TOL')
    strict    = setting('STRICT_SYMMETRY')
    coeffs    = np.zeros((grid.n_k, 2 * M, 2, raw.n_layers, raw.box, raw.box), dtype=complex)
    done      = set()

    for ik in range(grid.n_k):
        if ik in done:
            continue
        partner, G0 = grid.minus(ik)
        if partner != ik and not _is_canonical(grid, ik, partner):
            continue

        ks = raw.kernels[ik]
        V  = _continued_subspace(raw, ik) if ik in raw.crossing else ks.vectors
        V  = canonical_frame(V) * math.sqrt(area)
        coeffs[ik, :M] = raw.to_box(ks.sites, V)
        done.add(ik)

        if partner != ik:
            # -k_ik = k_partner + G0
            coeffs[partner, :M] = shift_box(layer_reflect(coeffs[ik, :M]), -G0)
            done.add(partner)
            _check_image(raw, partner, coeffs[partner, :M], flat_tol, strict)

    # composite symmetry
    coeffs[:, M:, SUB_B] = coeffs[:, :M, SUB_A].conj()

    out = FlatBandBasis(pot=raw.pot, alpha=raw.alpha, basis=raw.basis, grid=grid, M=M,
                        kernels=raw.kernels, coeffs=coeffs, crossing=set(raw.crossing), fixed=True)
    for ik in range(grid.n_k):
        _check_negative(out, ik, flat_tol, strict)

    logger.info('gauge fixed: %d k-points, M=%d, %d crossing', grid.n_k, M, len(raw.crossing))
    return out

def _check_image(raw, ik, box, flat_tol, strict):
    ks   = raw.kernels[ik]
    vec  = raw.from_box(ks.sites, box) / math.sqrt(raw.lattice.cell_area)
    leak = np.linalg.norm(vec - ks.vectors @ (ks.vectors.conj().T @ vec))
    if leak > 1e3 * flat_tol:
        msg = 'layer-reflection image leaves the flat space at k#%d (%.2e)' % (ik, leak)
        if strict:
            raise SymmetryError(msg)
        logger.warning(msg)

def _check_negative(fb, ik, flat_tol, strict):
    sites = fb.kernels[ik].sites
    chi   = build_D(fb.pot, fb.alpha, fb.grid.points[ik], fb.basis)
    vec   = fb.from_box(sites, fb.coeffs[ik, fb.M:], sub=SUB_B) / math.sqrt(fb.lattice.cell_area)
    res   = np.linalg.norm(chi.D.conj().T @ vec)
    if res > 1e3 * flat_tol:
        msg = 'composite-symmetry image not annihilated by D^dagger at k#%d (%.2e)' % (ik, res)
        if strict:
            raise SymmetryError(msg)
        logger.warning(msg)

def flat_band_basis(pot, alpha, grid, basis, M, threads=None):
    return gauge_fix(raw_flat_bands(pot, alpha, grid, basis, M, threads=threads))

@dataclass(eq=False)
class FlatBandProjector:
    flat : FlatBandBasis

    def matrix(self, ik, G0=(0, 0)):
        X = self.flat.frame(ik, G0)
        return X @ X.conj().T

    def distance(self, ik, jk, G0=(0, 0)):
        return frame_distance(self.flat.frame(ik), self.flat.frame(jk, G0))

def flat_projectors(basis):
    return FlatBandProjector(flat=basis)

def check_grid_assumption(proj):
    """Max projector distance over forward neighbour pairs; ok when < 1."""
    grid  = proj.flat.grid
    worst = (None, None)
    dmax  = 0.0
    for ik in range(grid.n_k):
        for jk, G0 in grid.neighbours(ik):
            d = proj.distance(ik, jk, G0)
            if d > dmax:
                dmax, worst = d, (ik, jk)
    logger.info('grid assumption: max neighbour distance %.4f', dmax)
    return dmax < 1.0, worst, dmax

# Real space

def sample_periodic(box, n, area, shift=0.5):
    """
    Values of |Omega|^-1 sum_m box[..., m] exp(2 pi i m.x) on the n x n grid
    x = ((i + shift)/n, (j + shift)/n) of real coordinates along v1, v2.
    """
    B = box.shape[-1]
    if n < B:
        raise InputError('r grid %d is coarser than the coefficient box %d' % (n, B))
    N     = (B - 1) // 2
    m     = np.arange(-N, N + 1)
    phase = np.exp(2j * np.pi * shift * m / n)
    idx   = m % n
    grid  = np.zeros(box.shape[:-2] + (n, n), dtype=complex)
    grid[..., idx[:, None], idx[None, :]] = box * phase[:, None] * phase[None, :]
    return scipy.fft.ifft2(grid) * (n * n / area)

def coefficients_from_samples(values, B, area, shift=0.5):
    """Inverse of sample_periodic, truncated to a B x B box."""
    n     = values.shape[-1]
    N     = (B - 1) // 2
    m     = np.arange(-N, N + 1)
    phase = np.exp(-2j * np.pi * shift * m / n)
    F     = scipy.fft.fft2(values) * (area / (n * n))
    idx   = m % n
    return F[..., idx[:, None], idx[None, :]] * phase[:, None] * phase[None, :]

def r_grid_points(lat, n, shift=0.5):
    """Cartesian points of the sampling grid, shape (n, n, 2)."""
    x  = (np.arange(n) + shift) / n
    xx = np.stack(np.meshgrid(x, x, indexing='ij'), axis=-1)
    return lat.real_vector(xx)

def evaluate_at(box, lat, points, area=None):
    """Direct Fourier sum at arbitrary Cartesian points (P, 2)."""
    area = area or lat.cell_area
    B    = box.shape[-1]
    N    = (B - 1) // 2
    m    = np.arange(-N, N + 1)
    x    = lat.real_coords(np.atleast_2d(points))
    e1   = np.exp(2j * np.pi * np.outer(x[:, 0], m))
    e2   = np.exp(2j * np.pi * np.outer(x[:, 1], m))
    return np.einsum('...ab,pa,pb->...p', box, e1, e2) / area

def zero_location(box, lat, n=64):
    """Grid point minimizing the pointwise spinor norm of one band, in real coordinates."""
    vals = sample_periodic(box, n, lat.cell_area)
    norm = np.sqrt(np.sum(np.abs(vals) ** 2, axis=tuple(range(vals.ndim - 2))))
    i, j = np.unravel_index(np.argmin(norm), norm.shape)
    return np.array([(i + 0.5) / n, (j + 0.5) / n]), norm

def predicted_zero(lat, k):
    """Real coordinates of (4 pi/(3 sqrt 3)) (k2, -k1)."""
    r = (4 * math.pi / (3 * math.sqrt(3.0))) * np.array([k[1], -k[0]])
    return lat.real_coords(r) % 1.0

def torus_distance(x, y):
    d = (np.asarray(x) - np.asarray(y)) % 1.0
    d = np.minimum(d, 1.0 - d)
    return float(np.max(d))

# Dumps

DUMP_HEADER = ['k', 'band', 'G1', 'G2', 'sigma', 'j', 're', 'im']

def export_rows(fb, tol=0.0):
    N = fb.basis.nmax
    nz = np.argwhere(np.abs(fb.coeffs) > tol)
    for ik, band, s, j, a, b in nz:
        c = fb.coeffs[ik, band, s, j, a, b]
        yield [int(ik), int(band), int(a - N), int(b - N), int(s), int(j), c.real, c.imag]

def import_rows(fb, rows):
    """Fill an empty gauge-fixed container from dump rows."""
    N  = fb.basis.nmax
    M2 = 2 * fb.M
    fb.coeffs = np.zeros((fb.grid.n_k, M2, 2, fb.n_layers, fb.box, fb.box), dtype=complex)
    for r in rows:
        ik, band, g1, g2, s, j = (int(float(x)) for x in r[:6])
        fb.coeffs[ik, band, s, j, g1 + N, g2 + N] = complex(float(r[6]), float(r[7]))
    fb.fixed = True
    return fb
