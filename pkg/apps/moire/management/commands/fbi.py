# -*- encoding: utf-8 -*-
"""
Copyright (c) 2019 - present AppSeed.us
"""

import logging

from django.core.management.base import BaseCommand, CommandError

from apps.moire           import pipeline
from apps.moire.common    import COMMON, MoireError
from apps.moire.h_files   import csv_save, json_dumps, json_save
from apps.moire.serializers import FORMAT_CSV, UniquenessReportSerializer

ACTIONS = ['magic', 'bands', 'formfactor', 'hf', 'ed', 'verify', 'elliptic']

LEVELS  = { 0: logging.WARNING, 2: logging.INFO, 3: logging.DEBUG }

# flag dest -> run-config field
FLAG_FIELDS = {
    'model'       : 'model',
    'potential'   : 'potential',
    'alpha'       : 'alpha',
    'n_layers'    : 'n_layers',
    'multiplicity': 'multiplicity',
    'n_kx'        : 'grid_n_kx',
    'n_ky'        : 'grid_n_ky',
    'cutoff'      : 'cutoff_plane_wave',
    'g_cutoff'    : 'cutoff_g_shell',
    'epsilon'     : 'coulomb_epsilon',
    'gate_d'      : 'coulomb_d',
    'seed'        : 'seed',
    'threads'     : 'threads',
    'output'      : 'output_path',
    'format'      : 'output_format',
}

def _flatten(aObj, aPrefix=''):
    """key/value rows for reports without a natural table shape."""
    if isinstance(aObj, dict):
        for k, v in aObj.items():
            yield from _flatten(v, aPrefix + '.' + str(k) if aPrefix else str(k))
    elif isinstance(aObj, (list, tuple)) and aObj and isinstance(aObj[0], (dict, list, tuple)):
        for i, v in enumerate(aObj):
            yield from _flatten(v, '%s.%d' % (aPrefix, i))
    else:
        yield [aPrefix, aObj if not isinstance(aObj, (list, tuple)) else ' '.join(str(x) for x in aObj)]

class Command(BaseCommand):
    help = 'Flat-band interacting model of chiral twisted multilayer graphene'

    def add_arguments(self, parser):
        parser.add_argument('action', choices=ACTIONS)
        parser.add_argument('--config', help='flat key = value run config')
        parser.add_argument('--model', choices=COMMON.MODELS)
        parser.add_argument('--potential', help="u0, u78, phi:<x> or a coefficient file")
        parser.add_argument('--alpha', help="number, 'ref' or 'auto:<i>'")
        parser.add_argument('--n-layers', dest='n_layers', type=int)
        parser.add_argument('--multiplicity', type=int)
        parser.add_argument('--n-kx', dest='n_kx', type=int)
        parser.add_argument('--n-ky', dest='n_ky', type=int)
        parser.add_argument('--cutoff', type=float, help='plane-wave cutoff in units of |q1|')
        parser.add_argument('--g-cutoff', dest='g_cutoff', type=float)
        parser.add_argument('--epsilon', type=float)
        parser.add_argument('--gate-d', dest='gate_d', type=float)
        parser.add_argument('--seed', type=int)
        parser.add_argument('--threads', type=int)
        parser.add_argument('--output')
        parser.add_argument('--format', choices=['json', 'csv'])
        parser.add_argument('--count', type=int, default=3, help='magic: number of angles')
        parser.add_argument('--n-points', dest='n_points', type=int, default=20, help='bands: k-path samples')
        parser.add_argument('--random', type=int, default=0, help='hf: random 1-RDM samples')
        parser.add_argument('--n-r', dest='n_r', type=int, default=64, help='real-space grid')

    def handle(self, *args, **options):

        level = LEVELS.get(options['verbosity'])
        if level is not None:
            logging.getLogger('apps.moire').setLevel(level)

        flags = { FLAG_FIELDS[k]: options.get(k) for k in FLAG_FIELDS }

        try:

            config = pipeline.merge_config(options.get('config'), flags)
            ctx    = pipeline.build_context(config, with_alpha=options['action'] != 'magic')
            out, rows, header = self.run(options['action'], ctx, options)

        except MoireError as e:
            raise CommandError(str(e), returncode=e.code)

        out['config'] = config
        self.emit(config, out, rows, header)

    def run(self, action, ctx, options):
        rows, header = None, None

        if action == 'magic':
            out    = pipeline.cmd_magic(ctx, options['count'])
            header = ['alpha_re', 'alpha_im', 'multiplicity', 'flat_bands', 'residual']
            rows   = [[m[h] for h in header] for m in out['magic']]

        elif action == 'bands':
            out    = pipeline.cmd_bands(ctx, options['n_points'])
            n      = out['energies'].shape[1]
            header = ['i', 'kx', 'ky'] + ['E%d' % j for j in range(n)]
            rows   = [[i, float(k[0]), float(k[1])] + [float(e) for e in E]
                      for i, (k, E) in enumerate(zip(out['kpath'], out['energies']))]

        elif action == 'formfactor':
            out, table = pipeline.cmd_formfactor(ctx)
            header = ['k', 'q', 'G1', 'G2', 'm', 'n', 're', 'im']
            rows   = list(table.rows())

        elif action == 'hf':
            out = pipeline.cmd_hf(ctx, options['random'])

        elif action == 'ed':
            out    = pipeline.cmd_ed(ctx)
            header = ['sector', 'index', 'energy']
            rows   = [[n, 0, e] for n, e in sorted(out['sectors'].items())]
            rows  += [['all', i, float(e)] for i, e in enumerate(out['spectrum'])]

        elif action == 'verify':
            out = dict(UniquenessReportSerializer(pipeline.cmd_verify(ctx, options['n_r'])).data)

        else:
            out = pipeline.cmd_elliptic(ctx, options['n_r'])

        return out, rows, header

    def emit(self, config, out, rows, header):
        path = config['output_path']

        if config['output_format'] == FORMAT_CSV:
            if header is None:
                header, rows = ['key', 'value'], list(_flatten(out))
            if path:
                csv_save(path, header, rows)
            else:
                self.stdout.write(','.join(header))
                for r in rows:
                    self.stdout.write(','.join(str(x) for x in r))
            return

        if path:
            json_save(path, out)
            self.stdout.write('> ' + path)
        else:
            self.stdout.write(json_dumps(out))
