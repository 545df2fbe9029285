# -*- encoding: utf-8 -*-
"""
Copyright (c) 2019 - present AppSeed.us
"""

import json, os, tempfile
from io import StringIO

import numpy as np
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from apps.moire.chiral   import PlaneWaveBasis, dirac_diagonal
from apps.moire.common   import COMMON, InputError
from apps.moire.h_files  import config_load, csv_load, csv_save, json_dumps
from apps.moire.h_util   import h_clean, h_num
from apps.moire.lattice  import standard_lattice
from apps.moire.pipeline import merge_config

class ConfigTests(SimpleTestCase):

    def setUp(self):
        self.dir = tempfile.TemporaryDirectory()
        self.path = os.path.join(self.dir.name, 'run.cfg')
        with open(self.path, 'w') as f:
            f.write('model = tbg4\ngrid.n_kx = 3\ngrid.n_ky = 3\nseed = 7\n')

    def tearDown(self):
        self.dir.cleanup()

    def test_load(self):
        data = config_load(self.path)
        self.assertEqual(data['grid.n_kx'], '3')
        with self.assertRaises(InputError):
            config_load(self.path + '.missing')

    def test_defaults(self):
        cfg = merge_config(aEnv={})
        self.assertEqual(cfg['model'], COMMON.MODEL_TBG2)
        self.assertEqual(cfg['alpha'], 'ref')
        self.assertEqual(cfg['output_format'], 'json')
        self.assertIsNotNone(cfg['cutoff_plane_wave'])

    def test_precedence(self):
        env = {'FBI_GRID_N_KX': '4', 'FBI_SEED': '11'}
        cfg = merge_config(self.path, {'seed': 3, 'model': None}, aEnv=env)
        self.assertEqual(cfg['model'], COMMON.MODEL_TBG4)
        self.assertEqual(cfg['grid_n_kx'], 4)
        self.assertEqual(cfg['grid_n_ky'], 3)
        self.assertEqual(cfg['seed'], 3)

    def test_unknown_key(self):
        with open(self.path, 'a') as f:
            f.write('colour = blue\n')
        with self.assertRaises(InputError):
            merge_config(self.path, aEnv={})

    def test_invalid_values(self):
        for flags in ({'model': 'qbg'}, {'grid_n_kx': 0}, {'alpha': 'magic'},
                      {'potential': 'phi:x'}, {'coulomb_epsilon': -1.0}):
            with self.assertRaises(InputError, msg=flags):
                merge_config(aFlags=flags, aEnv={})

    def test_cutoff_floor(self):
        self.assertEqual(merge_config(aFlags={'model': 'tbg4'}, aEnv={})['cutoff_plane_wave'], 20.0)
        self.assertEqual(merge_config(aFlags={'model': 'tbg2'}, aEnv={})['cutoff_plane_wave'], 12.0)
        self.assertEqual(merge_config(aFlags={'model': 'tbg4', 'cutoff_plane_wave': 10}, aEnv={})['cutoff_plane_wave'], 10.0)

    def test_alpha_tags(self):
        for tag in ('ref', 'auto:2', '0.58', '0.5+0.1j'):
            self.assertEqual(merge_config(aFlags={'alpha': tag}, aEnv={})['alpha'], tag)

class OutputTests(SimpleTestCase):

    def test_clean(self):
        out = h_clean({'a': np.float64(1.0 / 3), 'b': np.arange(2), 'c': 1 + 2j, 'd': float('nan'), 1: True})
        self.assertEqual(out['a'], h_num(1.0 / 3))
        self.assertEqual(out['b'], [0, 1])
        self.assertEqual(out['c'], {'re': 1.0, 'im': 2.0})
        self.assertIsNone(out['d'])
        self.assertIs(out['1'], True)
        json.loads(json_dumps(out))

    def test_csv(self):
        with tempfile.TemporaryDirectory() as d:
            path = os.path.join(d, 'sub', 'rows.csv')
            csv_save(path, ['x', 'y'], [[1, 0.5], [2, 1.0 / 3]])
            rows = csv_load(path)
        self.assertEqual(rows[0], ['1', '0.5'])
        self.assertEqual(float(rows[1][1]), h_num(1.0 / 3))

class CommandTests(SimpleTestCase):

    def _call(self, *args, **kwargs):
        out = StringIO()
        call_command('fbi', *args, stdout=out, **kwargs)
        return out.getvalue()

    def test_magic_json(self):
        data = json.loads(self._call('magic', model='tbg2', count=1, n_kx=1, n_ky=1))
        self.assertEqual(data['model'], COMMON.MODEL_TBG2)
        self.assertEqual(len(data['magic']), 1)
        self.assertLess(abs(data['magic'][0]['alpha_re'] - 0.58566355838955), 1e-6)
        self.assertEqual(data['config']['grid_n_kx'], 1)

    def test_magic_csv(self):
        lines = self._call('magic', model='tbg2', count=1, format='csv').splitlines()
        self.assertEqual(lines[0], 'alpha_re,alpha_im,multiplicity,flat_bands,residual')
        self.assertEqual(len(lines), 2)

    def test_output_file(self):
        with tempfile.TemporaryDirectory() as d:
            path = os.path.join(d, 'hf.json')
            msg  = self._call('hf', model='tbg2', n_kx=2, n_ky=2, output=path)
            self.assertIn(path, msg)
            with open(path) as f:
                data = json.load(f)
        self.assertLess(abs(data['fsd_plus']['hf_energy']), 1e-9)
        self.assertLess(abs(data['fsd_minus']['hf_energy']), 1e-9)

    def test_formfactor(self):
        data = json.loads(self._call('formfactor', model='tbg2', n_kx=2, n_ky=2))
        self.assertLess(data['identities']['identity'], 1e-10)
        self.assertGreater(data['n_entries'], 0)

    def test_bad_config(self):
        with self.assertRaises(CommandError):
            self._call('magic', model='tbg2', n_kx=0)

    def test_bad_potential(self):
        with self.assertRaises(CommandError):
            self._call('bands', potential='/nonexistent/pot.txt')

    def test_bands_free_dirac(self):
        data  = json.loads(self._call('bands', model='tbg2', alpha='0', n_points=8))
        self.assertEqual(data['alpha'], 0.0)
        basis = PlaneWaveBasis(n_layers=2, cutoff=data['config']['cutoff_plane_wave'], lattice=standard_lattice())
        self.assertEqual(len(data['kpath']), 8)
        for k, E in zip(data['kpath'], data['energies']):
            free = np.min(np.abs(dirac_diagonal(basis.sites(np.array(k)))))
            self.assertLess(abs(np.min(np.abs(E)) - free), 1e-9, k)

    def test_bands_flat(self):
        data = json.loads(self._call('bands', model='tbg2', n_points=8))
        self.assertLess(data['flat_max'], 1e-4)
        self.assertEqual(len(data['energies']), 8)

    def test_bands_csv(self):
        lines = self._call('bands', model='tbg2', n_points=4, format='csv').splitlines()
        self.assertTrue(lines[0].startswith('i,kx,ky,E0'))
        self.assertEqual(len(lines), 5)

    def test_verify(self):
        data = json.loads(self._call('verify', model='tbg2', n_kx=3, n_ky=3))
        self.assertTrue(data['overall'])
        self.assertEqual(data['model'], COMMON.MODEL_TBG2)
        self.assertGreater(data['fullrank_chain'], 0.0)

    def test_ed(self):
        data = json.loads(self._call('ed', model='tbg2', n_kx=2, n_ky=1))
        self.assertGreaterEqual(data['min_eigenvalue'], -1e-10)
        self.assertLess(abs(data['fsd_plus_energy']), 1e-10)
        self.assertLess(abs(data['fsd_minus_energy']), 1e-10)
        for gap in data['charge_gap'].values():
            self.assertLess(abs(gap['ed'] - gap['hf']), 1e-8)

    def test_elliptic(self):
        data = json.loads(self._call('elliptic', model='tbg2', n_kx=2, n_ky=2))
        self.assertLess(data['theta']['periodic'], 1e-8)
        self.assertLess(data['theta']['mpmath'], 1e-8)
        self.assertEqual(len(data['closed_form']), 3)
        for row in data['closed_form']:
            self.assertLess(row['residual'], 1e-6)
            self.assertGreater(row['overlap'], 1 - 1e-6)

    def test_elliptic_no_oracle(self):
        with self.assertRaises(CommandError):
            self._call('elliptic', model='nlayer', alpha='0.5', n_layers=4, n_kx=1, n_ky=1)

    def test_deterministic(self):
        args = dict(model='tbg2', n_kx=2, n_ky=2, random=3, seed=5)
        self.assertEqual(self._call('hf', **args), self._call('hf', **args))
        self.assertEqual(self._call('formfactor', model='tbg2', n_kx=2, n_ky=2),
                         self._call('formfactor', model='tbg2', n_kx=2, n_ky=2))
