# -*- encoding: utf-8 -*-
"""
Copyright (c) 2019 - present AppSeed.us

Cached builders shared by the test classes.
"""

from functools import lru_cache

import numpy as np
from scipy.stats import unitary_group

from apps.moire.chiral      import PlaneWaveBasis, potential_U0, potential_U78
from apps.moire.common      import COMMON, MODEL_CUTOFF, REFERENCE_ALPHA
from apps.moire.form_factor import build_table
from apps.moire.gauge       import flat_band_basis
from apps.moire.hf          import ScreenedCoulomb
from apps.moire.lattice     import mp_grid, standard_lattice
from apps.moire.magic       import refine_and_classify

COULOMB = ScreenedCoulomb(epsilon=1.0, d=1.0)

MODELS = {
    COMMON.MODEL_TBG2  : (2, potential_U0 , 1),
    COMMON.MODEL_TBG4  : (2, potential_U78, 2),
    COMMON.MODEL_ETTG4 : (3, potential_U0 , 2),
}

@lru_cache(maxsize=None)
def lattice():
    return standard_lattice()

@lru_cache(maxsize=None)
def potential(model):
    return MODELS[model][1]()

@lru_cache(maxsize=None)
def basis(n_layers, cutoff=None):
    return PlaneWaveBasis(n_layers=n_layers, cutoff=cutoff, lattice=lattice())

def model_basis(model):
    return basis(MODELS[model][0], MODEL_CUTOFF.get(model))

@lru_cache(maxsize=None)
def magic(model):
    return refine_and_classify(potential(model), model_basis(model), alpha0=REFERENCE_ALPHA[model])

def alpha(model):
    return magic(model).alpha.real

@lru_cache(maxsize=None)
def grid(n_kx, n_ky=None):
    return mp_grid(lattice(), n_kx, n_ky or n_kx)

@lru_cache(maxsize=None)
def flat(model, n_kx, n_ky=None):
    M = MODELS[model][2]
    return flat_band_basis(potential(model), alpha(model), grid(n_kx, n_ky), model_basis(model), M)

@lru_cache(maxsize=None)
def table(model, n_kx, n_ky=None):
    return build_table(flat(model, n_kx, n_ky))

def residual_gauge(fb, seed):
    """Same flat space, random U(M) per k on the positive bands."""
    rng = np.random.default_rng(seed)
    if fb.M == 1:
        units = [np.array([[np.exp(2j * np.pi * rng.uniform())]]) for _ in range(fb.grid.n_k)]
    else:
        units = [unitary_group.rvs(fb.M, random_state=rng) for _ in range(fb.grid.n_k)]
    return fb.mixed(units)
