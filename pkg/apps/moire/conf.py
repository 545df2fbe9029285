# -*- encoding: utf-8 -*-
"""
Copyright (c) 2019 - present AppSeed.us
"""

import math

from django.conf import settings

# Built-in defaults, used when Django settings are not configured
DEFAULTS = {
    'CUTOFF'           : 12.0,
    'G_CUTOFF'         : 4 * math.sqrt(3.0),
    'FLAT_TOL'         : 1e-6,
    'DETECT_TOL'       : 1e-7,
    'MULTIPLICITY_TOL' : 1e-5,
    'REAL_TOL'         : 1e-4,
    'DEDUP_TOL'        : 1e-5,
    'ALPHA_MAX'        : 6.0,
    'NONZERO_TOL'      : 1e-6,
    'ED_MAX_MODES'     : 16,
    'ED_DENSE_MAX'     : 4096,
    'EPSILON'          : 1.0,
    'GATE_D'           : 1.0,
    'THREADS'          : 1,
    'SEED'             : 0,
    'STRICT_SYMMETRY'  : True,
}

def setting( aName ):

    if aName not in DEFAULTS:
        raise KeyError( 'Unknown MOIRE setting: ' + aName )

    if settings.configured:
        return getattr(settings, 'MOIRE', {}).get( aName, DEFAULTS[ aName ] )

    return DEFAULTS[ aName ]
