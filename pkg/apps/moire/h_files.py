# -*- encoding: utf-8 -*-
"""
Copyright (c) AppSeed.us
"""

import os, csv, json

from dotenv import dotenv_values

from .common import COMMON, InputError
from .h_util import h_clean, h_num

def dir_create(dir_path):
    if dir_path and not os.path.exists(dir_path):
        os.makedirs(dir_path)

def file_exists( aPath ):
    return os.path.isfile( aPath )

def file_save( aPath, aContent ):

    dir_create( os.path.dirname( aPath ) )

    with open(aPath, 'w') as f:

        if isinstance(aContent, str):
            f.write( aContent )
            return True

        if isinstance(aContent, list):
            f.write( '\n'.join( aContent ) + '\n' )
            return True

    return False

def json_dumps( aObj ):
    return json.dumps( h_clean( aObj ), indent=2, sort_keys=True )

def json_save( aPath, aObj ):
    return file_save( aPath, json_dumps( aObj ) + '\n' )

def _cell( aValue ):
    if isinstance(aValue, float):
        return '%.*g' % (COMMON.SIG_DIGITS, aValue)
    return aValue

def csv_save( aPath, aHeader, aRows ):

    dir_create( os.path.dirname( aPath ) )

    with open(aPath, 'w', newline='') as f:
        writer = csv.writer(f)
        writer.writerow( aHeader )
        for row in aRows:
            writer.writerow( [ _cell( h_num(x) if isinstance(x, float) else x ) for x in row ] )
    return True

def csv_load( aPath ):
    """Rows after the header, as strings."""

    if not file_exists( aPath ):
        raise InputError( 'file not found: ' + str( aPath ) )

    with open(aPath, 'r', newline='') as f:
        rows = list( csv.reader(f) )
    return rows[1:]

def config_load( aPath ):
    """Flat `key = value` run config with dotted sections."""

    if not file_exists( aPath ):
        raise InputError( 'config file not found: ' + str( aPath ) )

    values = dotenv_values( aPath )
    return { k.strip(): (v.strip() if isinstance(v, str) else v) for k, v in values.items() if v is not None }
