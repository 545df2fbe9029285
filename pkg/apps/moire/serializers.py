# -*- encoding: utf-8 -*-
"""
Copyright (c) 2019 - present AppSeed.us
"""

import os, re

from rest_framework import serializers

from .common import COMMON, MODEL_CUTOFF
from .conf   import setting

# config-file keys (dotted) and their serializer field names
CONFIG_KEYS = [
    'model', 'potential', 'alpha', 'n_layers', 'multiplicity',
    'grid.n_kx', 'grid.n_ky',
    'cutoff.plane_wave', 'cutoff.g_shell',
    'coulomb.epsilon', 'coulomb.d',
    'seed', 'threads',
    'output.path', 'output.format',
]

FORMAT_JSON = 'json'
FORMAT_CSV  = 'csv'

ALPHA_RE = re.compile(r'^(ref|auto:\d+)$')

def field_name(aKey):
    return aKey.replace('.', '_')

def env_name(aKey):
    return 'FBI_' + field_name(aKey).upper()

def positive(value):
    if value is not None and value <= 0:
        raise serializers.ValidationError('must be positive')

class RunConfigSerializer(serializers.Serializer):

    model             = serializers.ChoiceField(choices=COMMON.MODELS, default=COMMON.MODEL_TBG2)
    potential         = serializers.CharField(required=False, allow_null=True, default=None)
    alpha             = serializers.CharField(required=False, default='ref')
    n_layers          = serializers.IntegerField(required=False, allow_null=True, default=None, min_value=2)
    multiplicity      = serializers.IntegerField(required=False, allow_null=True, default=None, min_value=1)

    grid_n_kx         = serializers.IntegerField(default=2, validators=[positive])
    grid_n_ky         = serializers.IntegerField(default=2, validators=[positive])

    cutoff_plane_wave = serializers.FloatField(required=False, allow_null=True, default=None, validators=[positive])
    cutoff_g_shell    = serializers.FloatField(required=False, allow_null=True, default=None, validators=[positive])

    coulomb_epsilon   = serializers.FloatField(required=False, allow_null=True, default=None, validators=[positive])
    coulomb_d         = serializers.FloatField(required=False, allow_null=True, default=None, validators=[positive])

    seed              = serializers.IntegerField(required=False, allow_null=True, default=None, min_value=0)
    threads           = serializers.IntegerField(required=False, allow_null=True, default=None, validators=[positive])

    output_path       = serializers.CharField(required=False, allow_blank=True, default='')
    output_format     = serializers.ChoiceField(choices=[FORMAT_JSON, FORMAT_CSV], default=FORMAT_JSON)

    def validate_potential(self, value):
        if value in (None, '', COMMON.POT_U0, COMMON.POT_U78):
            return value or None
        if value.startswith('phi:'):
            try:
                float(value[4:])
            except ValueError:
                raise serializers.ValidationError('phi must be a number, got %r' % value[4:])
            return value
        if not os.path.isfile(value):
            raise serializers.ValidationError('unknown potential tag or missing file %r' % value)
        return value

    def validate_alpha(self, value):
        value = str(value).strip()
        if ALPHA_RE.match(value):
            return value
        try:
            complex(value.replace(' ', ''))
        except ValueError:
            raise serializers.ValidationError("expected a number, 'ref' or 'auto:<i>'")
        return value

    def validate(self, attrs):
        # settings fill whatever the file, env and flags left open
        fill = {
            'cutoff_plane_wave' : 'CUTOFF',
            'cutoff_g_shell'    : 'G_CUTOFF',
            'coulomb_epsilon'   : 'EPSILON',
            'coulomb_d'         : 'GATE_D',
            'seed'              : 'SEED',
            'threads'           : 'THREADS',
        }
        if attrs.get('cutoff_plane_wave') is None:
            attrs['cutoff_plane_wave'] = max(setting('CUTOFF'), MODEL_CUTOFF.get(attrs['model'], 0.0))
        for name, key in fill.items():
            if attrs.get(name) is None:
                attrs[name] = setting(key)
        return attrs

class MagicAngleSerializer(serializers.Serializer):
    alpha_re     = serializers.FloatField()
    alpha_im     = serializers.FloatField()
    multiplicity = serializers.IntegerField()
    flat_bands   = serializers.IntegerField()
    residual     = serializers.FloatField()

class UniquenessReportSerializer(serializers.Serializer):
    model               = serializers.CharField()
    k_star              = serializers.IntegerField()
    k_star_momentum     = serializers.ListField(child=serializers.FloatField())
    trace_witness       = serializers.DictField()
    projector_condition = serializers.DictField()
    fullrank_chain      = serializers.FloatField()
    grid_assumption     = serializers.DictField()
    real_space          = serializers.DictField()
    overall             = serializers.BooleanField()
