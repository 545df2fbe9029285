# -*- encoding: utf-8 -*-
"""
Copyright (c) 2019 - present AppSeed.us
"""

import math, cmath

class COMMON:

    NULL              = None # not set
    NA                = -1   # not set
    OK                =  0   # All good   (unix style)
    ERR               =  1   # Err bumped (unix style)
    NOT_FOUND         =  2   # file or directory not found
    INPUT_ERR         =  3   # invalid argument or config field
    PROCESSED         =  4
    NOT_MAGIC         =  5   # kernel smaller than the requested multiplicity
    NO_CONVERGENCE    =  6   # magic-angle refinement did not converge
    ALIASING          =  7   # G shell not resolved by the plane-wave basis
    CAPACITY          =  8   # Fock space above the mode cap
    SYMMETRY          =  9   # symmetry image outside the flat space

    SIG_DIGITS        = 12

    MODEL_TBG2        = 'tbg2'
    MODEL_TBG4        = 'tbg4'
    MODEL_ETTG4       = 'ettg4'
    MODEL_NLAYER      = 'nlayer'
    MODELS            = [MODEL_TBG2, MODEL_TBG4, MODEL_ETTG4, MODEL_NLAYER]

    POT_U0            = 'u0'
    POT_U78           = 'u78'

    DIR_ADD           = 'add'
    DIR_REMOVE        = 'remove'

    METHOD_EXACT_M1   = 'exact-M1'
    METHOD_EXACT_M2   = 'exact-M2-commutator'
    METHOD_RANDOM     = 'randomized'

# Recover errors for COMMON class
def errInfo( aErrorCode ):

    if COMMON.NA             == aErrorCode: return 'Not Set'
    if COMMON.ERR            == aErrorCode: return 'Error Generic'
    if COMMON.OK             == aErrorCode: return 'OK'
    if COMMON.NOT_FOUND      == aErrorCode: return 'Not Found'
    if COMMON.INPUT_ERR      == aErrorCode: return 'Input error'
    if COMMON.NOT_MAGIC      == aErrorCode: return 'Not magic at requested multiplicity'
    if COMMON.NO_CONVERGENCE == aErrorCode: return 'No convergence'
    if COMMON.ALIASING       == aErrorCode: return 'G shell aliased by the basis cutoff'
    if COMMON.CAPACITY       == aErrorCode: return 'Fock space above the mode cap'
    if COMMON.SYMMETRY       == aErrorCode: return 'Symmetry violation'

    return str( aErrorCode )

class MoireError(Exception):
    code = COMMON.ERR

    def __init__(self, msg=None):
        super().__init__(msg or errInfo(self.code))

    def __str__(self):
        return '[%s] %s' % (errInfo(self.code), super().__str__())

class InputError(MoireError, ValueError):
    code = COMMON.INPUT_ERR

class NotMagicError(MoireError):
    code = COMMON.NOT_MAGIC

class ConvergenceError(MoireError):
    code = COMMON.NO_CONVERGENCE

    def __init__(self, msg=None, last_residual=None):
        super().__init__(msg)
        self.last_residual = last_residual

class AliasingError(MoireError):
    code = COMMON.ALIASING

class CapacityError(MoireError):
    code = COMMON.CAPACITY

class SymmetryError(MoireError):
    code = COMMON.SYMMETRY

class PoleError(MoireError, ZeroDivisionError):
    code = COMMON.INPUT_ERR

# Constants of the moire geometry
OMEGA      = cmath.exp(2j * math.pi / 3)
SQRT3      = math.sqrt(3.0)
R_S        = (4 * math.pi / (3 * SQRT3), 0.0)

# Reference magic angles (first real candidate of each model)
REFERENCE_ALPHA = {
    COMMON.MODEL_TBG2   : 0.585664,
    COMMON.MODEL_TBG4   : 0.853799,
    COMMON.MODEL_ETTG4  : 0.585664 * math.sqrt(2.0),
    COMMON.MODEL_NLAYER : 0.6922,
}

# model -> (n_layers, potential, multiplicity)
MODEL_SPECS = {
    COMMON.MODEL_TBG2   : (2, COMMON.POT_U0 , 1),
    COMMON.MODEL_TBG4   : (2, COMMON.POT_U78, 2),
    COMMON.MODEL_ETTG4  : (3, COMMON.POT_U0 , 2),
    COMMON.MODEL_NLAYER : (7, COMMON.POT_U0 , 2),
}

# Plane-wave cutoff floor where the default CUTOFF leaves kernel states unconverged
MODEL_CUTOFF = {
    COMMON.MODEL_TBG4   : 20.0,
}
