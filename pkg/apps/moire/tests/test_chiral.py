# -*- encoding: utf-8 -*-
"""
Copyright (c) 2019 - present AppSeed.us
"""

import math, os, tempfile

import numpy as np
import scipy.linalg
from django.test import SimpleTestCase

from apps.moire.chiral  import (PlaneWaveBasis, band_structure, build_D, check_symmetries, coupling_matrix,
                                dirac_diagonal, dirac_points, layer_shifts, potential_U0, potential_U78,
                                potential_phi, resolve_potential)
from apps.moire.common  import COMMON, InputError, MODEL_SPECS, OMEGA, REFERENCE_ALPHA
from apps.moire.lattice import kpath
from apps.moire.magic   import refine_and_classify

from . import fixtures

def _flat_max(bands, n_flat):
    return max(float(np.max(np.sort(np.abs(E))[:n_flat])) for E in bands)

class PotentialTests(SimpleTestCase):

    def test_mode_counts(self):
        self.assertEqual(len(potential_U0().modes), 3)
        u78 = potential_U78()
        self.assertEqual(len(u78.modes), 6)
        for c in u78.modes.values():
            self.assertAlmostEqual(abs(c), 1 / math.sqrt(2.0), places=12)

    def test_symmetries(self):
        for pot in (potential_U0(), potential_U78(), potential_phi(0.3)):
            rep = check_symmetries(pot)
            self.assertTrue(rep['ok'], rep)
            self.assertAlmostEqual(abs(rep['character']), 1.0, places=12)

    def test_translation_character(self):
        self.assertLess(abs(check_symmetries(potential_U0())['character'] - OMEGA), 1e-12)

    def test_labels_roundtrip(self):
        pot = potential_U78()
        for mode in pot.modes:
            self.assertEqual(pot.mode_from_nm(*pot.label_nm(mode)), mode)

    def test_mirror_of_u_minus(self):
        lat = fixtures.lattice()
        r   = np.array([[0.3, -1.2], [2.0, 0.7]])
        pot = potential_U0()
        self.assertLess(np.max(np.abs(pot(lat, r, sign=-1) - pot(lat, -r))), 1e-12)

    def test_resolve(self):
        self.assertEqual(resolve_potential(COMMON.POT_U0).name, 'u0')
        self.assertEqual(resolve_potential(COMMON.POT_U78).name, 'u78')
        self.assertEqual(resolve_potential('phi:0.25').name, 'phi:0.25')

    def test_from_file(self):
        with tempfile.TemporaryDirectory() as d:
            path = os.path.join(d, 'pot.txt')
            with open(path, 'w') as f:
                f.write('# n m re im\n2 2 1.0 0.0\n2 1 -0.5 0.8660254037844386\n-1 0 -0.5 -0.8660254037844386\n')
            pot = resolve_potential(path)
            self.assertEqual(len(pot.modes), 3)
            self.assertTrue(check_symmetries(pot, tol=1e-9)['ok'])

    def test_empty_file(self):
        with tempfile.TemporaryDirectory() as d:
            path = os.path.join(d, 'empty.txt')
            open(path, 'w').close()
            with self.assertRaises(InputError):
                resolve_potential(path)

class BasisTests(SimpleTestCase):

    def test_layer_shifts(self):
        self.assertEqual(layer_shifts(2), [1, -1])
        self.assertEqual(layer_shifts(3), [-1, 0, 1])
        for n in range(2, 8):
            s = layer_shifts(n)
            self.assertEqual(s, [-x for x in s[::-1]])

    def test_rejects(self):
        with self.assertRaises(InputError):
            PlaneWaveBasis(n_layers=1)
        with self.assertRaises(InputError):
            PlaneWaveBasis(n_layers=2, cutoff=0.5)

    def test_sites_within_cutoff(self):
        basis = fixtures.basis(2)
        sites = basis.sites(np.array([0.2, -0.1]))
        self.assertTrue(np.all(np.linalg.norm(sites.momenta, axis=1) <= basis.cutoff))
        self.assertEqual(len(basis.box_index(sites)), len(sites))

class ChiralOperatorTests(SimpleTestCase):

    def setUp(self):
        self.pot = potential_U0()
        self.rng = np.random.default_rng(7)

    def test_alpha_zero(self):
        basis = fixtures.basis(2)
        k     = np.array([0.13, 0.21])
        chi   = build_D(self.pot, 0.0, k, basis)
        sv    = np.sort(scipy.linalg.svdvals(chi.D))
        ref   = np.sort(np.linalg.norm(chi.sites.momenta, axis=1))
        self.assertLess(np.max(np.abs(sv - ref)), 1e-12)

    def test_hermitian_and_chiral(self):
        basis = fixtures.basis(2)
        for _ in range(50):
            alpha = self.rng.uniform(0.0, 2.0)
            k     = self.rng.uniform(-1.0, 1.0, size=2)
            H     = build_D(self.pot, alpha, k, basis).H
            self.assertLess(np.max(np.abs(H - H.conj().T)), 1e-12 * max(1.0, np.max(np.abs(H))))
            E     = scipy.linalg.eigvalsh(H)
            self.assertLess(np.max(np.abs(E + E[::-1])), 1e-8)

    def test_dirac_zero(self):
        basis = fixtures.basis(2)
        for k in dirac_points(basis):
            sv = scipy.linalg.svdvals(build_D(self.pot, 0.3, k, basis).D)
            self.assertLess(sv[-1], 1e-8)

    def test_tridiagonal_coupling(self):
        basis = fixtures.basis(3)
        sites = basis.sites(np.array([0.1, 0.2]))
        W     = coupling_matrix(self.pot, sites, basis)
        top, bottom = sites.of_layer(0), sites.of_layer(2)
        self.assertEqual(np.max(np.abs(W[np.ix_(top, bottom)])), 0.0)
        self.assertEqual(np.max(np.abs(W[np.ix_(bottom, top)])), 0.0)
        self.assertGreater(np.max(np.abs(W[np.ix_(top, sites.of_layer(1))])), 0.0)

    def test_layer_mismatch(self):
        with self.assertRaises(InputError):
            build_D(self.pot, 0.5, np.zeros(2), fixtures.basis(2), n_layers=3)

    def test_diagonal(self):
        sites = fixtures.basis(2).sites(np.array([0.1, 0.2]))
        d     = dirac_diagonal(sites)
        self.assertLess(np.max(np.abs(d - (sites.momenta[:, 0] + 1j * sites.momenta[:, 1]))), 1e-15)

class FlatBandTests(SimpleTestCase):

    def test_two_flat_bands(self):
        lat   = fixtures.lattice()
        bands = band_structure(potential_U0(), fixtures.alpha(COMMON.MODEL_TBG2), kpath(lat, 10), fixtures.basis(2))
        self.assertLess(_flat_max(bands, 2), 1e-6)

    def test_dispersive_off_magic(self):
        lat   = fixtures.lattice()
        bands = band_structure(potential_U0(), 0.4, kpath(lat, 10), fixtures.basis(2))
        self.assertGreater(_flat_max(bands, 2), 1e-2)

    def test_seven_layers(self):
        n_layers, _, M = MODEL_SPECS[COMMON.MODEL_NLAYER]
        basis = PlaneWaveBasis(n_layers=n_layers, lattice=fixtures.lattice())
        magic = refine_and_classify(potential_U0(), basis, alpha0=REFERENCE_ALPHA[COMMON.MODEL_NLAYER])
        self.assertLess(abs(magic.alpha.real - 0.6922), 1e-3)
        bands = band_structure(potential_U0(), magic.alpha.real, kpath(basis.lattice, 20), basis)
        self.assertLess(_flat_max(bands, 2 * M), 1e-4)
