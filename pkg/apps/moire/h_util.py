# -*- encoding: utf-8 -*-
"""
Copyright (c) App-Generator.dev | AppSeed.us
"""

import numpy as np

from .common import COMMON

def h_rng(aSeed):
    return np.random.default_rng(int(aSeed))

def h_num(aValue, aDigits=COMMON.SIG_DIGITS):
    """Float rounded to a fixed number of significant digits."""
    return float('%.*g' % (aDigits, aValue))

def h_clean(aObj):
    """JSON-ready copy: numpy scalars and arrays unpacked, complex split, floats rounded."""

    if isinstance(aObj, dict):
        return {str(k): h_clean(v) for k, v in aObj.items()}

    if isinstance(aObj, (list, tuple)):
        return [h_clean(v) for v in aObj]

    if isinstance(aObj, np.ndarray):
        return h_clean(aObj.tolist())

    if isinstance(aObj, (bool, np.bool_)):
        return bool(aObj)

    if isinstance(aObj, (int, np.integer)):
        return int(aObj)

    if isinstance(aObj, (complex, np.complexfloating)):
        return {'re': h_num(aObj.real), 'im': h_num(aObj.imag)}

    if isinstance(aObj, (float, np.floating)):
        if not np.isfinite(aObj):
            return None
        return h_num(aObj)

    return aObj
