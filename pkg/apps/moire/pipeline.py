# -*- encoding: utf-8 -*-
"""
Copyright (c) 2019 - present AppSeed.us

Run orchestration behind the `fbi` management command: config resolution and
one function per subcommand returning plain report data.
"""

import logging, math, os
from dataclasses import dataclass, field

import numpy as np

from .chiral      import PlaneWaveBasis, band_structure, check_symmetries, resolve_potential
from .common      import COMMON, InputError, MODEL_SPECS, OMEGA, REFERENCE_ALPHA, R_S
from .ed          import (build_H_FBI, excitation_energy, expectation, fock_space, frustration_report,
                          fsd_state, ground_spectrum, sector_ground_energies)
from .elliptic    import (closed_form_flatband, ettg4_oracle, kernel_residual, overlap, span_distance,
                          tbg4_oracle, theta1, theta1_mpmath, wp, wp_lattice)
from .form_factor import build_table, identity_report
from .gauge       import (evaluate_at, flat_band_basis, kernel_states,
                          predicted_zero, torus_distance, zero_location)
from .h_files     import config_load
from .h_util      import h_rng
from .hf          import ScreenedCoulomb, charge_gap, energies, fsd_density, random_density
from .lattice     import kpath, mp_grid, standard_lattice
from .magic       import MagicAngle, magic_angles, refine_and_classify
from .serializers import CONFIG_KEYS, MagicAngleSerializer, RunConfigSerializer, env_name, field_name
from .uniqueness  import verdict

logger = logging.getLogger(__name__)

def merge_config(aPath=None, aFlags=None, aEnv=None):
    """defaults < config file < FBI_* environment < flags; returns validated data."""
    env  = os.environ if aEnv is None else aEnv
    data = {}

    if aPath:
        for key, value in config_load(aPath).items():
            if key not in CONFIG_KEYS:
                raise InputError('unknown config key %r' % key)
            data[field_name(key)] = value

    for key in CONFIG_KEYS:
        if env_name(key) in env:
            data[field_name(key)] = env[env_name(key)]

    for name, value in (aFlags or {}).items():
        if value is not None:
            data[name] = value

    ser = RunConfigSerializer(data=data)
    if not ser.is_valid():
        msgs = ['%s: %s' % (k, ' '.join(str(x) for x in v)) for k, v in ser.errors.items()]
        raise InputError('invalid run config; ' + '; '.join(msgs))
    return dict(ser.validated_data)

@dataclass(eq=False)
class RunContext:
    config   : dict
    lattice  : object
    pot      : object
    basis    : object
    grid     : object
    M        : int
    alpha    : complex = None
    magic    : object = None
    coulomb  : object = None
    _cache   : dict = field(default_factory=dict, repr=False)

    @property
    def model(self):
        return self.config['model']

    @property
    def n_layers(self):
        return self.basis.n_layers

    def flat(self):
        if 'flat' not in self._cache:
            self._cache['flat'] = flat_band_basis(self.pot, self.alpha, self.grid, self.basis, self.M,
                                                  threads=self.config['threads'])
        return self._cache['flat']

    def table(self):
        if 'table' not in self._cache:
            self._cache['table'] = build_table(self.flat(), self.config['cutoff_g_shell'])
        return self._cache['table']

def resolve_alpha(config, pot, basis, M):
    """'ref' and 'auto:<i>' give a refined MagicAngle; a number is used as given."""
    tag   = config['alpha']
    model = config['model']
    if tag == 'ref':
        return refine_and_classify(pot, basis, alpha0=REFERENCE_ALPHA[model])
    if tag.startswith('auto:'):
        i     = int(tag[5:])
        found = magic_angles(pot, basis, count=i + 1)
        if len(found) <= i:
            raise InputError('only %d magic angles found below ALPHA_MAX' % len(found))
        return found[i]
    alpha = complex(tag.replace(' ', ''))
    return alpha.real if alpha.imag == 0 else alpha

def build_context(config, with_alpha=True):
    n_layers, pot_tag, M = MODEL_SPECS[config['model']]
    n_layers = config.get('n_layers') or n_layers
    M        = config.get('multiplicity') or M
    lat      = standard_lattice()
    pot      = resolve_potential(config.get('potential') or pot_tag)

    sym = check_symmetries(pot, lat)
    if not sym['ok']:
        logger.warning('potential %s breaks a lattice symmetry: %s', pot.name, sym)

    basis = PlaneWaveBasis(n_layers=n_layers, cutoff=config['cutoff_plane_wave'], lattice=lat)
    grid  = mp_grid(lat, config['grid_n_kx'], config['grid_n_ky'])
    ctx   = RunContext(config=config, lattice=lat, pot=pot, basis=basis, grid=grid, M=M,
                       coulomb=ScreenedCoulomb(epsilon=config['coulomb_epsilon'], d=config['coulomb_d']))

    if with_alpha:
        found = resolve_alpha(config, pot, basis, M)
        if not isinstance(found, MagicAngle):
            ctx.alpha = found
            logger.info('alpha=%s taken as given', found)
            return ctx
        ctx.magic = found
        ctx.alpha = found.alpha.real if found.is_real else found.alpha
        if ctx.magic.multiplicity < M:
            logger.warning('alpha=%s has multiplicity %d, %d requested', ctx.alpha, ctx.magic.multiplicity, M)
    return ctx

def _header(ctx):
    return {
        'model'    : ctx.model,
        'potential': ctx.pot.name,
        'n_layers' : ctx.n_layers,
        'seed'     : ctx.config['seed'],
        'grid'     : [ctx.grid.n_kx, ctx.grid.n_ky],
    }

# Subcommands

def cmd_magic(ctx, count=3):
    found = magic_angles(ctx.pot, ctx.basis, count=count)
    rows  = [MagicAngleSerializer(m.to_dict()).data for m in found]
    return dict(_header(ctx), magic=rows)

def cmd_bands(ctx, n_points=20):
    path  = kpath(ctx.lattice, n_points)
    bands = band_structure(ctx.pot, ctx.alpha, path, ctx.basis, threads=ctx.config['threads'])
    half  = 2 * ctx.M + 2
    mid   = len(bands[0]) // 2
    near  = np.array([b[mid - half:mid + half] for b in bands])
    flat  = np.sort(np.abs(near), axis=1)[:, :2 * ctx.M]
    return dict(_header(ctx), alpha=ctx.alpha, kpath=path, energies=near,
                flat_max=float(np.max(flat)))

def cmd_formfactor(ctx):
    table = ctx.table()
    rep   = identity_report(table)
    return dict(_header(ctx), alpha=ctx.alpha, identities=rep, n_entries=len(table.entries)), table

def cmd_hf(ctx, n_random=0):
    table = ctx.table()
    out   = dict(_header(ctx), alpha=ctx.alpha)
    for name, sign in (('fsd_plus', +1), ('fsd_minus', -1)):
        out[name] = energies(table, fsd_density(sign, ctx.M, ctx.grid), ctx.coulomb)
    if n_random:
        rng   = h_rng(ctx.config['seed'])
        sweep = [energies(table, random_density(ctx.M, ctx.grid, rng), ctx.coulomb) for _ in range(n_random)]
        out['random'] = sweep
        out['random_min_total'] = min(s['total'] for s in sweep)
    return out

def _unit_coefficients(rng, n_k, M):
    c = rng.normal(size=(n_k, M)) + 1j * rng.normal(size=(n_k, M))
    return c / np.linalg.norm(c)

def cmd_ed(ctx):
    table  = ctx.table()
    space  = fock_space(table)
    H, rho = build_H_FBI(table, ctx.coulomb, space)
    spec   = ground_spectrum(H)
    half   = ctx.M * ctx.grid.n_k
    rng    = h_rng(ctx.config['seed'])

    out = dict(_header(ctx), alpha=ctx.alpha, dimension=space.dim, min_eigenvalue=float(spec[0]),
               spectrum=spec[:min(16, len(spec))],
               sectors=sector_ground_energies(H, space, [half - 1, half, half + 1]))

    gaps = {}
    for name, sign in (('plus', +1), ('minus', -1)):
        psi = fsd_state(space, ctx.M, sign)
        out['fsd_%s_energy' % name]      = expectation(H, psi)
        out['fsd_%s_frustration' % name] = frustration_report(rho, psi)
        for direction in (COMMON.DIR_ADD, COMMON.DIR_REMOVE):
            c = _unit_coefficients(rng, ctx.grid.n_k, ctx.M)
            gaps['%s_%s' % (name, direction)] = {
                'ed' : excitation_energy(H, psi, c, direction, space=space, M=ctx.M, sign=sign),
                'hf' : charge_gap(table, ctx.coulomb, sign, direction, c),
            }
    out['charge_gap'] = gaps
    return out

def cmd_verify(ctx, n_r=64):
    return verdict(ctx.model, ctx.table(), ctx.flat(), threads=ctx.config['threads'], n_r=n_r).to_dict()

def _theta_checks(rng):
    z  = rng.normal(size=20) + 1j * rng.normal(size=20) * 0.5
    return {
        'periodic'      : float(np.max(np.abs(theta1(z + 1) + theta1(z)))),
        'quasi_periodic': float(np.max(np.abs(theta1(z + OMEGA) + np.exp(-1j * math.pi * OMEGA - 2j * math.pi * z) * theta1(z)))),
        'mpmath'        : float(max(abs(theta1(x) - theta1_mpmath(x)) for x in z[:5])),
        'wp_rotation'   : float(np.max(np.abs(wp(OMEGA * z) - OMEGA * wp(z)))),
        'wp_lattice_sum': float(np.max(np.abs(wp(z) - wp_lattice(z)))),
    }

def _tbg2_oracle(ctx, n_r):
    fb, pw = ctx.flat(), ctx.basis
    u0     = fb.coeffs[0, 0]
    rows   = []
    for ik in range(1, ctx.grid.n_k):
        k     = ctx.grid.points[ik]
        box   = closed_form_flatband(u0, ctx.lattice, k, n=n_r)
        x, _  = zero_location(box, ctx.lattice, n_r)
        rows.append({
            'k'        : ik,
            'residual' : kernel_residual(ctx.pot, ctx.alpha, k, pw, box),
            'overlap'  : overlap(box, fb.coeffs[ik, 0]),
            'zero_err' : torus_distance(x, predicted_zero(ctx.lattice, k)),
        })
    return rows

def _pair_oracle(ctx, states, k):
    ks = kernel_states(ctx.pot, ctx.alpha, k, ctx.basis, M=2)
    v, w = states[:2]
    pts  = np.array([[0.0, 0.0], R_S, -np.asarray(R_S)])
    return {
        'residual_v'    : kernel_residual(ctx.pot, ctx.alpha, k, ctx.basis, v),
        'residual_w'    : kernel_residual(ctx.pot, ctx.alpha, k, ctx.basis, w),
        'overlap_vw'    : overlap(v, w),
        'span_distance' : span_distance(ctx.basis, k, [v, w], ks.vectors[:, :2]),
        'abs_v'         : [float(np.linalg.norm(x)) for x in evaluate_at(v, ctx.lattice, pts).reshape(-1, 3).T],
        'abs_w'         : [float(np.linalg.norm(x)) for x in evaluate_at(w, ctx.lattice, pts).reshape(-1, 3).T],
    }

def tbg_u0(ctx):
    """k = 0 TBG flat band at alpha / sqrt2 for the three-layer product map."""
    cfg  = dict(ctx.config, model=COMMON.MODEL_TBG2, potential=None, n_layers=None, multiplicity=None,
                grid_n_kx=1, grid_n_ky=1)
    sub  = build_context(cfg, with_alpha=False)
    sub.alpha = refine_and_classify(sub.pot, sub.basis, alpha0=ctx.alpha.real / math.sqrt(2.0)).alpha.real
    return sub.flat().coeffs[0, 0]

def cmd_elliptic(ctx, n_r=64):
    rng = h_rng(ctx.config['seed'])
    out = dict(_header(ctx), alpha=ctx.alpha, theta=_theta_checks(rng))
    k   = ctx.lattice.q1

    if ctx.model == COMMON.MODEL_TBG2:
        out['closed_form'] = _tbg2_oracle(ctx, n_r)
    elif ctx.model == COMMON.MODEL_TBG4:
        out['oracle'] = _pair_oracle(ctx, tbg4_oracle(ctx.flat(), k), k)
    elif ctx.model == COMMON.MODEL_ETTG4:
        v, w, w0 = ettg4_oracle(tbg_u0(ctx), ctx.lattice, k)
        out['oracle'] = _pair_oracle(ctx, (v, w), k)
        out['product_residual'] = kernel_residual(ctx.pot, ctx.alpha, np.zeros(2), ctx.basis, w0)
    else:
        raise InputError('no closed-form oracle for model %r' % ctx.model)
    return out
