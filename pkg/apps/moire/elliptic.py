# -*- encoding: utf-8 -*-
"""
Copyright (c) 2019 - present AppSeed.us

Jacobi theta_1 on the hexagonal modulus, the Weierstrass p-function of the
moire lattice and the theta-quotient multiplier F_k that turns the k = 0 flat
band into the flat band at k.

Complex coordinate: z = x1 + i x2 for r = (x1, x2); zeta = 3 z / (4 pi i omega)
maps v1 -> 1 and v2 -> omega.
"""

import logging, math
from dataclasses import dataclass

import mpmath
import numpy as np
import scipy.signal

from .chiral import build_D, layer_shifts
from .common import InputError, OMEGA, PoleError, R_S, SQRT3
from .gauge  import (SUB_A, coefficients_from_samples, evaluate_at, frame_distance,
                     r_grid_points, rotate_box, sample_periodic, shift_box)

logger = logging.getLogger(__name__)

PERIOD_1 = 4 * math.pi * 1j * OMEGA / 3        # z(v1)
PERIOD_2 = 4 * math.pi * 1j * OMEGA ** 2 / 3   # z(v2)
WP_ROWS  = 20
POLE_TOL = 1e-8

@dataclass(frozen=True)
class ThetaParams:
    omega : complex = OMEGA
    n_max : int = 12

    def __post_init__(self):
        if complex(self.omega).imag <= 0:
            raise InputError('theta modulus needs Im(omega) > 0')

    @classmethod
    def auto(cls, omega=OMEGA, im_bound=2.0, tail=1e-16):
        """Smallest cutoff whose first dropped term is below `tail` for |Im zeta| <= im_bound."""
        n = 0
        while True:
            x = n + 1.5
            if math.exp(-math.pi * x * x * complex(omega).imag + 2 * math.pi * x * im_bound) < tail:
                return cls(omega=omega, n_max=n)
            n += 1

DEFAULT_THETA = ThetaParams.auto()

def _series(zeta, params):
    zeta = np.asarray(zeta, dtype=complex)
    x    = np.arange(-params.n_max - 1, params.n_max + 1) + 0.5
    x    = x.reshape((-1,) + (1,) * zeta.ndim)
    return x, np.exp(1j * math.pi * x * x * params.omega + 2j * math.pi * x * (zeta + 0.5))

def theta1(zeta, params=None):
    """theta_1(zeta|omega) = -sum_n exp(pi i (n+1/2)^2 omega + 2 pi i (n+1/2)(zeta+1/2))."""
    _, terms = _series(zeta, params or DEFAULT_THETA)
    return -terms.sum(axis=0)

def theta1_prime(zeta, params=None):
    x, terms = _series(zeta, params or DEFAULT_THETA)
    return -(2j * math.pi * x * terms).sum(axis=0)

def theta1_mpmath(zeta, omega=OMEGA, dps=30):
    """Independent evaluation, theta_1(zeta|omega) = jtheta(1, pi zeta, exp(i pi omega))."""
    with mpmath.workdps(dps):
        q = mpmath.exp(1j * mpmath.pi * mpmath.mpc(omega))
        return complex(mpmath.jtheta(1, mpmath.pi * mpmath.mpc(zeta), q))

def zeta_of_z(z):
    return np.asarray(z, dtype=complex) / PERIOD_1

def zeta_of_r(r):
    r = np.asarray(r, dtype=float)
    return 3 * (r[..., 0] + 1j * r[..., 1]) / (4j * math.pi * OMEGA)

def _check_pole(z):
    zeta = zeta_of_z(z)
    # zeta = a + b omega
    b    = zeta.imag / OMEGA.imag
    a    = zeta.real - b * OMEGA.real
    near = np.rint(a) * PERIOD_1 + np.rint(b) * PERIOD_2
    dist = np.abs(np.asarray(z) - near)
    if np.any(dist < POLE_TOL):
        raise PoleError('p-function evaluated %.2e from a lattice point' % float(np.min(dist)))

# zero of p: zeta = i/(sqrt3 omega), congruent to (1 + 2 omega)/3
WP_ZERO = 1j / (SQRT3 * OMEGA)

def _wp_constant(params):
    return (9 * OMEGA / (16 * math.pi ** 2)) * (theta1_prime(0.0, params) / theta1(WP_ZERO, params)) ** 2

def wp(z, params=None):
    """p(z) = C theta(zeta - c) theta(zeta + c) / theta(zeta)^2."""
    params = params or DEFAULT_THETA
    _check_pole(z)
    zeta   = zeta_of_z(z)
    out    = _wp_constant(params) * theta1(zeta - WP_ZERO, params) * theta1(zeta + WP_ZERO, params) / theta1(zeta, params) ** 2
    return out if np.ndim(out) else complex(out)

def wp_lattice(z, rows=WP_ROWS):
    """Row-summed lattice sum, (pi/2w1)^2 [sum_n csc^2(pi(zeta - n tau)) - sum_{n!=0} csc^2(pi n tau) - 1/3]."""
    _check_pole(z)
    zeta  = zeta_of_z(z)
    tau   = OMEGA
    n     = np.arange(-rows, rows + 1)
    n     = n.reshape((-1,) + (1,) * np.ndim(zeta))
    csc2  = 1.0 / np.sin(np.pi * (zeta - n * tau)) ** 2
    nz    = np.arange(1, rows + 1)
    const = 2 * np.sum(1.0 / np.sin(np.pi * nz * tau) ** 2)
    out   = (math.pi / PERIOD_1) ** 2 * (csc2.sum(axis=0) - const - 1.0 / 3.0)
    return out if np.ndim(out) else complex(out)

def F_k(r, k, params=None):
    """
    exp((kappa/2)(-i(1+omega) x1 + (omega-1) x2)) theta(zeta + kappa/(sqrt3 omega)) / theta(zeta),
    kappa = k1 + i k2. Periodic in r and zero at (4 pi/(3 sqrt3))(k2, -k1).
    """
    params = params or DEFAULT_THETA
    r      = np.asarray(r, dtype=float)
    kappa  = complex(k[0], k[1])
    zeta   = zeta_of_r(r)
    expo   = np.exp(0.5 * kappa * (-1j * (1 + OMEGA) * r[..., 0] + (OMEGA - 1) * r[..., 1]))
    return expo * theta1(zeta + kappa / (SQRT3 * OMEGA), params) / theta1(zeta, params)

def normalized(box, area):
    """Scale to sum |u(G)|^2 = |Omega|."""
    nrm = np.linalg.norm(box)
    if nrm < 1e-14:
        raise InputError('cannot normalize a vanishing state')
    return box * math.sqrt(area) / nrm

def multiply(box, lat, factor, n=64):
    """Coefficient box of factor(r) * u(r) for a coefficient box u; factor maps (n, n, 2) points to values."""
    area = lat.cell_area
    vals = sample_periodic(box, n, area)
    vals = vals * factor(r_grid_points(lat, n))
    return coefficients_from_samples(vals, box.shape[-1], area)

def closed_form_flatband(u0, lat, k, n=64, shift=(0.0, 0.0)):
    """F_k(r - shift) u0(r), normalized; u0 is a (2, N, B, B) coefficient box at k = 0."""
    k     = np.asarray(k, dtype=float)
    shift = np.asarray(shift, dtype=float)
    out   = multiply(u0, lat, lambda pts: F_k(pts - shift, k), n)
    return normalized(out, lat.cell_area)

def squared_multiplier(u0, lat, k, n=64):
    """F_{k/2}(r)^2 u0(r), normalized."""
    half = 0.5 * np.asarray(k, dtype=float)
    out  = multiply(u0, lat, lambda pts: F_k(pts, half) ** 2, n)
    return normalized(out, lat.cell_area)

def site_vector(box, pw, k):
    """A-sublattice entries of a (2, N, B, B) box on the plane-wave sites of k."""
    sites = pw.sites(k)
    return box[SUB_A].reshape(-1)[pw.box_index(sites)]

def kernel_residual(pot, alpha, k, pw, box):
    """||(D(alpha) + k) v|| / ||v|| on the truncated basis."""
    v = site_vector(box, pw, k)
    D = build_D(pot, alpha, k, pw).D
    return float(np.linalg.norm(D @ v) / np.linalg.norm(v))

def overlap(a, b):
    """|<a, b>| / (||a|| ||b||) on coefficient boxes."""
    return float(abs(np.vdot(a, b)) / (np.linalg.norm(a) * np.linalg.norm(b)))

def rotation_split(fb, ik=0):
    """
    Positive k = 0 flat bands rearranged into C3 eigenstates, ordered (w0, v0):
    w0 has the smaller amplitude at r = 0.
    """
    lat  = fb.lattice
    st   = fb.coeffs[ik, :fb.M]
    rot  = rotate_box(st, fb.basis)
    R    = np.einsum('msjab,nsjab->mn', st.conj(), rot) / lat.cell_area
    w, X = np.linalg.eig(R)
    if fb.M > 1 and np.min(np.abs(np.diff(np.sort_complex(w)))) < 1e-6:
        raise InputError('k=0 flat bands share a rotation eigenvalue')
    states = np.tensordot(X.T, st, axes=1)
    states = np.stack([normalized(s, lat.cell_area) for s in states])
    at0    = [np.linalg.norm(evaluate_at(s, lat, np.zeros((1, 2)))) for s in states]
    order  = np.argsort(at0)
    logger.debug('rotation eigenvalues %s, |psi(0)| %s', np.round(w[order], 6), np.round(np.array(at0)[order], 8))
    return states[order], w[order]

def _independent(w, v):
    if overlap(w, v) > 1 - 1e-6:
        raise InputError('oracle states are nearly dependent')

def tbg4_oracle(fb, k):
    """(v_k, w_k) = (F_k(r - r_S) v0, F_k(r) w0) from the two k = 0 flat bands."""
    lat      = fb.lattice
    (w0, v0), _ = rotation_split(fb)
    w = closed_form_flatband(w0, lat, k)
    v = closed_form_flatband(v0, lat, k, shift=R_S)
    _independent(w, v)
    return v, w

def layer_product(u, v, n_layers_out=3):
    """
    (u1 v1, (u1 v2 + u2 v1)/sqrt2, u2 v2) on the A sublattice of two-layer boxes,
    re-indexed onto the offsets of the three-layer model.
    """
    s_in  = layer_shifts(2)
    s_out = layer_shifts(n_layers_out)
    B     = u.shape[-1]
    N     = (B - 1) // 2
    out   = np.zeros((2, n_layers_out, B, B), dtype=complex)

    for c, pairs in enumerate([[(0, 0)], [(0, 1), (1, 0)], [(1, 1)]]):
        acc = np.zeros((2 * B - 1, 2 * B - 1), dtype=complex)
        for a, b in pairs:
            t = (s_in[a] + s_in[b] - s_out[c]) // 3
            part = scipy.signal.fftconvolve(u[SUB_A, a], v[SUB_A, b])
            # 3 q1 = -(g1 + g2)
            acc += shift_box(part, (t, t))
        if len(pairs) == 2:
            acc /= math.sqrt(2.0)
        out[SUB_A, c] = acc[N:N + B, N:N + B]
    return out

def ettg4_oracle(u0, lat, k):
    """
    w0 = u0 x u0 from the TBG k = 0 state; returns (v_k, w_k) with
    v_k = F_{k/2}^2 w0 and w_k = F_k w0.
    """
    w0 = normalized(layer_product(u0, u0), lat.cell_area)
    w  = closed_form_flatband(w0, lat, k)
    v  = squared_multiplier(w0, lat, k)
    _independent(w, v)
    return v, w, w0

def span_distance(pw, k, states, kernel):
    """Projector distance between the span of oracle states and a numerical kernel at k."""
    X = np.column_stack([site_vector(s, pw, k) for s in states])
    Q, _ = np.linalg.qr(X)
    return frame_distance(Q, kernel)
