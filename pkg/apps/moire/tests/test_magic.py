# -*- encoding: utf-8 -*-
"""
Copyright (c) 2019 - present AppSeed.us
"""

import math

import numpy as np
from django.test import SimpleTestCase

from apps.moire.chiral import band_structure, potential_U0
from apps.moire.common import COMMON, InputError
from apps.moire.conf   import setting
from apps.moire.magic  import (default_probe, magic_angles, magic_spectrum, refine_and_classify,
                               singular_values)

from . import fixtures

# Chiral TBG with U0, converged literature values
TBG_U0 = (0.58566355838955, 2.2211821738201, 3.7514055099052)

def _near_real(cands, count):
    tol = setting('REAL_TOL')
    return sorted((a for a in cands if abs(a.imag) < tol and a.real > 0), key=lambda a: a.real)[:count]

class MagicSpectrumTests(SimpleTestCase):

    def test_tbg_candidates(self):
        cands = _near_real(magic_spectrum(potential_U0(), fixtures.basis(2)), 1)
        self.assertLess(abs(cands[0] - TBG_U0[0]), 1e-6)

    def test_momentum_independence(self):
        lat = fixtures.lattice()
        a   = _near_real(magic_spectrum(potential_U0(), fixtures.basis(2)), 3)
        b   = _near_real(magic_spectrum(potential_U0(), fixtures.basis(2), k_probe=0.31 * lat.g1 + 0.07 * lat.g2), 3)
        self.assertEqual(len(a), 3)
        self.assertEqual(len(b), 3)
        # the third angle is only converged to ~1e-5 at the default cutoff
        for x, y, tol in zip(a, b, (1e-6, 1e-6, 1e-4)):
            self.assertLess(abs(x - y), tol)

    def test_probe_on_dirac_point(self):
        basis = fixtures.basis(2)
        with self.assertRaises(InputError):
            magic_spectrum(potential_U0(), basis, k_probe=-basis.offsets[0])

    def test_ettg_doubling(self):
        tbg  = [m.alpha.real for m in magic_angles(potential_U0(), fixtures.basis(2), count=3)]
        ettg = magic_spectrum(potential_U0(), fixtures.basis(3))
        self.assertEqual(len(tbg), 3)
        for a in tbg:
            self.assertLess(min(abs(math.sqrt(2.0) * a - b) for b in ettg), 1e-3)

class RefineTests(SimpleTestCase):

    def test_tbg2(self):
        m = fixtures.magic(COMMON.MODEL_TBG2)
        self.assertLess(abs(m.alpha - TBG_U0[0]), 1e-6)
        self.assertTrue(m.is_real)
        self.assertEqual(m.multiplicity, 1)
        self.assertEqual(m.flat_bands, 2)

    def test_tbg4(self):
        m = fixtures.magic(COMMON.MODEL_TBG4)
        self.assertLess(abs(m.alpha.real - 0.853799), 5e-4)
        self.assertEqual(m.multiplicity, 2)

    def test_ettg4(self):
        m = fixtures.magic(COMMON.MODEL_ETTG4)
        self.assertLess(abs(m.alpha.real - math.sqrt(2.0) * fixtures.alpha(COMMON.MODEL_TBG2)), 1e-3)
        self.assertGreaterEqual(m.multiplicity, 2)

    def test_ettg_multiplicity(self):
        # the third eTTG angle sits near 5.3 and needs a wider basis
        basis = fixtures.basis(3, 18.0)
        for a in TBG_U0:
            m = refine_and_classify(potential_U0(), basis, alpha0=math.sqrt(2.0) * a)
            self.assertLess(abs(m.alpha.real - math.sqrt(2.0) * a), 1e-3)
            self.assertGreaterEqual(m.multiplicity, 2, a)

    def test_complex_start(self):
        m = refine_and_classify(potential_U0(), fixtures.basis(2), alpha0=complex(TBG_U0[1], 5e-5))
        self.assertTrue(m.is_real)
        self.assertLess(abs(m.alpha - TBG_U0[1]), 1e-5)

    def test_stationary(self):
        pot, basis = potential_U0(), fixtures.basis(2)
        a  = fixtures.alpha(COMMON.MODEL_TBG2)
        k  = default_probe(basis.lattice)
        s0 = singular_values(pot, a, k, basis)[0]
        self.assertLess(s0, 1e-8)
        for d in (-1e-3, 1e-3):
            self.assertGreater(singular_values(pot, a + d, k, basis)[0], 10 * s0)

    def test_first_angles(self):
        found = magic_angles(potential_U0(), fixtures.basis(2), count=3)
        self.assertEqual(len(found), 3)
        alphas = [m.alpha.real for m in found]
        self.assertEqual(alphas, sorted(alphas))
        for a, ref, tol in zip(alphas, TBG_U0, (1e-6, 1e-5, 1e-4)):
            self.assertLess(abs(a - ref), tol)
        self.assertTrue(all(m.is_real for m in found))
        self.assertEqual(found[0].to_dict()['flat_bands'], 2)

class ConvergenceTests(SimpleTestCase):

    def test_cutoff(self):
        pot = potential_U0()
        a   = fixtures.alpha(COMMON.MODEL_TBG2)
        k   = default_probe(fixtures.lattice())
        s   = singular_values(pot, a, k, fixtures.basis(2))[:4]
        t   = singular_values(pot, a, k, fixtures.basis(2, 2 * setting('CUTOFF')))[:4]
        self.assertLess(np.max(np.abs(s - t)), 1e-6)

    def test_translation(self):
        lat   = fixtures.lattice()
        k     = np.array([0.13, 0.27])
        bands = band_structure(potential_U0(), fixtures.alpha(COMMON.MODEL_TBG2), [k, k + lat.g1, k - lat.g2],
                               fixtures.basis(2))
        self.assertEqual(len(bands[0]), len(bands[1]))
        self.assertLess(np.max(np.abs(np.sort(bands[0]) - np.sort(bands[1]))), 1e-8)
        self.assertLess(np.max(np.abs(np.sort(bands[0]) - np.sort(bands[2]))), 1e-8)
