# -*- encoding: utf-8 -*-
"""
Copyright (c) 2019 - present AppSeed.us
"""

import math

import numpy as np
from django.test import SimpleTestCase

from apps.moire.common   import COMMON, InputError, OMEGA, PoleError
from apps.moire.elliptic import (DEFAULT_THETA, PERIOD_1, PERIOD_2, ThetaParams, F_k, closed_form_flatband,
                                 ettg4_oracle, kernel_residual, layer_product, normalized, overlap,
                                 rotation_split, span_distance, tbg4_oracle, theta1, theta1_mpmath,
                                 theta1_prime, wp, wp_lattice, zeta_of_r)
from apps.moire.gauge    import kernel_states, predicted_zero, torus_distance, zero_location

from . import fixtures

TBG2, TBG4, ETTG4 = COMMON.MODEL_TBG2, COMMON.MODEL_TBG4, COMMON.MODEL_ETTG4

def _rel(a, b):
    return float(np.max(np.abs(a - b) / np.maximum(1.0, np.abs(b))))

class ThetaTests(SimpleTestCase):

    def setUp(self):
        rng = np.random.default_rng(4)
        self.z = rng.uniform(-1, 1, size=20) + 0.4j * rng.uniform(-1, 1, size=20)

    def test_params(self):
        with self.assertRaises(InputError):
            ThetaParams(omega=-OMEGA)
        p = DEFAULT_THETA
        x = p.n_max + 1.5
        self.assertLess(math.exp(-math.pi * x * x * OMEGA.imag + 4 * math.pi * x), 1e-16)

    def test_periods(self):
        z = self.z
        self.assertLess(_rel(theta1(z + 1), -theta1(z)), 1e-10)
        quasi = -np.exp(-1j * math.pi * OMEGA - 2j * math.pi * z) * theta1(z)
        self.assertLess(_rel(theta1(z + OMEGA), quasi), 1e-10)

    def test_odd(self):
        self.assertLess(_rel(theta1(-self.z), -theta1(self.z)), 1e-12)
        self.assertLess(abs(theta1(0.0)), 1e-14)

    def test_mpmath(self):
        for x in self.z[:8]:
            self.assertLess(abs(theta1(x) - theta1_mpmath(x)), 1e-12 * max(1.0, abs(theta1_mpmath(x))))

    def test_derivative(self):
        h = 1e-5
        for x in self.z[:4]:
            fd = (theta1(x + h) - theta1(x - h)) / (2 * h)
            self.assertLess(abs(theta1_prime(x) - fd), 1e-6 * max(1.0, abs(fd)))

class WeierstrassTests(SimpleTestCase):

    def setUp(self):
        rng = np.random.default_rng(8)
        self.z = (rng.uniform(0.1, 0.9, size=15) * PERIOD_1 + rng.uniform(0.1, 0.9, size=15) * PERIOD_2)

    def test_rotation(self):
        self.assertLess(_rel(wp(OMEGA * self.z), OMEGA * wp(self.z)), 1e-10)

    def test_periodic(self):
        self.assertLess(_rel(wp(self.z + PERIOD_1), wp(self.z)), 1e-10)
        self.assertLess(_rel(wp(self.z - PERIOD_2), wp(self.z)), 1e-10)

    def test_lattice_sum(self):
        self.assertLess(_rel(wp(self.z), wp_lattice(self.z)), 1e-10)

    def test_laurent(self):
        z = 1e-3 * (1 + 0.5j)
        self.assertLess(abs(wp(z) * z * z - 1.0), 1e-5)

    def test_poles(self):
        for z in (0.0, PERIOD_1, PERIOD_1 - 2 * PERIOD_2):
            with self.assertRaises(PoleError):
                wp(z)
            with self.assertRaises(PoleError):
                wp_lattice(z)

class MultiplierTests(SimpleTestCase):

    def setUp(self):
        self.lat = fixtures.lattice()
        self.k   = 0.31 * self.lat.g1 + 0.12 * self.lat.g2

    def test_zeta_map(self):
        self.assertLess(abs(zeta_of_r(self.lat.v1) - 1.0), 1e-12)
        self.assertLess(abs(zeta_of_r(self.lat.v2) - OMEGA), 1e-12)

    def test_periodic(self):
        r = np.array([[0.37, 0.81], [-1.1, 0.4]])
        for v in (self.lat.v1, self.lat.v2):
            self.assertLess(_rel(F_k(r + v, self.k), F_k(r, self.k)), 1e-9)

    def test_zero(self):
        x0  = predicted_zero(self.lat, self.k)
        r0  = self.lat.real_vector(x0)
        off = self.lat.real_vector(x0 + np.array([0.2, 0.1]))
        self.assertLess(abs(F_k(r0, self.k)), 1e-9 * abs(F_k(off, self.k)))

    def test_normalized(self):
        box = normalized(np.ones((2, 3, 3)), 4.0)
        self.assertAlmostEqual(np.linalg.norm(box) ** 2, 4.0)
        with self.assertRaises(InputError):
            normalized(np.zeros((2, 3, 3)), 4.0)

class ClosedFormTests(SimpleTestCase):

    def test_tbg2(self):
        fb  = fixtures.flat(TBG2, 3)
        lat = fb.lattice
        u0  = fb.coeffs[0, 0]
        for ik in range(1, fb.grid.n_k):
            k   = fb.grid.points[ik]
            box = closed_form_flatband(u0, lat, k)
            self.assertGreater(overlap(box, fb.coeffs[ik, 0]), 1 - 1e-6)
            self.assertLess(kernel_residual(fb.pot, fb.alpha, k, fb.basis, box), 1e-6)
            x, _ = zero_location(box, lat, 64)
            self.assertLessEqual(torus_distance(x, predicted_zero(lat, k)), 1.0 / 64)

    def test_rotation_split(self):
        fb = fixtures.flat(TBG4, 3)
        states, eig = rotation_split(fb)
        self.assertEqual(states.shape[0], 2)
        self.assertGreater(abs(eig[0] - eig[1]), 1e-6)
        self.assertLess(overlap(states[0], states[1]), 1e-6)

    def test_tbg4(self):
        fb   = fixtures.flat(TBG4, 3)
        k    = fb.lattice.q1
        for state in rotation_split(fb)[0]:
            self.assertLess(kernel_residual(fb.pot, fb.alpha, np.zeros(2), fb.basis, state), 1e-6)
        v, w = tbg4_oracle(fb, k)
        self.assertLess(kernel_residual(fb.pot, fb.alpha, k, fb.basis, v), 1e-6)
        self.assertLess(kernel_residual(fb.pot, fb.alpha, k, fb.basis, w), 1e-6)
        self.assertLess(overlap(v, w), 1e-8)
        ks = kernel_states(fb.pot, fb.alpha, k, fb.basis, M=2)
        self.assertLess(span_distance(fb.basis, k, [v, w], ks.vectors[:, :2]), 1e-3)

    def test_layer_product(self):
        u0 = fixtures.flat(TBG2, 1).coeffs[0, 0]
        w0 = layer_product(u0, u0)
        self.assertEqual(w0.shape, (2, 3) + u0.shape[-2:])
        self.assertEqual(np.abs(w0[1]).max(), 0.0)
        pw = fixtures.basis(3)
        self.assertLess(kernel_residual(fixtures.potential(ETTG4), fixtures.alpha(ETTG4), np.zeros(2), pw,
                                        normalized(w0, pw.lattice.cell_area)), 1e-6)

    def test_ettg4(self):
        lat  = fixtures.lattice()
        pw   = fixtures.basis(3)
        pot  = fixtures.potential(ETTG4)
        a    = fixtures.alpha(ETTG4)
        k    = lat.q1
        v, w, _ = ettg4_oracle(fixtures.flat(TBG2, 1).coeffs[0, 0], lat, k)
        self.assertLess(kernel_residual(pot, a, k, pw, v), 1e-6)
        self.assertLess(kernel_residual(pot, a, k, pw, w), 1e-6)
        ks = kernel_states(pot, a, k, pw, M=2)
        self.assertLess(span_distance(pw, k, [v, w], ks.vectors[:, :2]), 1e-3)
