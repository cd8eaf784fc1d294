import json
import os
from os.path import getsize

import numpy as np


def sizeof_fmt(fn, suffix='B'):
    """ Return the size of a file 'fn' in a human readeable format.

     From https://stackoverflow.com/questions/1094841 """

    num = getsize(fn)
    for unit in ['', 'Ki', 'Mi', 'Gi', 'Ti', 'Pi', 'Ei', 'Zi']:
        if abs(num) < 1024.0:
            return "%3.1f%s%s" % (num, unit, suffix)
        num /= 1024.0
    return "%.1f%s%s" % (num, 'Yi', suffix)


def to_builtin(obj):
    """ Convert numpy scalars/arrays nested in dicts and lists to plain
    python values so json can write them."""
    if isinstance(obj, dict):
        return {str(k): to_builtin(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_builtin(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_builtin(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return to_builtin(float(obj))
    if isinstance(obj, float):
        if not np.isfinite(obj):
            return None
        if obj == 0.0:
            return 0.0  # no '-0.0' in reports
    return obj


def dumps(obj):
    """ Deterministic json text (sorted keys, fixed indentation)."""
    return json.dumps(to_builtin(obj), sort_keys=True, indent=2) + '\n'


def write_json(fn, obj):
    os.makedirs(os.path.dirname(os.path.abspath(fn)), exist_ok=True)
    with open(fn, 'w') as f:
        f.write(dumps(obj))
    return fn


def read_json(fn):
    with open(fn, 'r') as f:
        return json.load(f)
