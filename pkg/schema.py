""" JSON Schemas of the documents read by the package (time functions, phase
fields, gauge elements, coefficient and invariant vectors, run
configurations) and `check`, which validates a document with
jsonschema and reports the first violation as a ConfigError carrying the
dotted path of the offending key:

    gauge.lambda.params.step: missing key
    potential.values[3]: expected type number
"""
from jsonschema import Draft7Validator
from jsonschema.exceptions import best_match

from errors import ConfigError

NUMBER = {'type': 'number'}
POSITIVE = {'type': 'number', 'exclusiveMinimum': 0}
NUMBERS = {'type': 'array', 'items': NUMBER}
TIMEFN = {'$ref': '#/definitions/timefn'}
TIMEFNS = {'type': 'array', 'items': TIMEFN, 'minItems': 2}

# params of each TimeFn kind, in serialization order
TIMEFN_PARAMS = {
    'constant': {'value': NUMBER},
    'linear': {'slope': NUMBER, 'intercept': NUMBER},
    'exponential': {'rate': NUMBER, 'amplitude': NUMBER},
    'tabulated': {'t0': NUMBER, 'step': POSITIVE,
                  'values': dict(NUMBERS, minItems=3)},
    'sum': {'terms': TIMEFNS},
    'product': {'factors': TIMEFNS},
    'reciprocal': {'of': TIMEFN},
}


def closed(properties, required=()):
    """ Object schema accepting exactly `properties`."""
    schema = {'type': 'object', 'properties': dict(properties),
              'additionalProperties': False}
    if required:
        schema['required'] = list(required)
    return schema


def case(key, value, then, optional=False):
    """ `then` applies when `key` equals `value` (or is absent, with
    `optional`)."""
    cond = {'properties': {key: {'const': value}}}
    if not optional:
        cond['required'] = [key]
    return {'if': cond, 'then': then}


def timefn_map(names, required=()):
    return closed({name: TIMEFN for name in names}, required)


DEFINITIONS = {
    'timefn': {'if': NUMBER, 'else': {'$ref': '#/definitions/timefn_form'}},
    'timefn_form': dict(
        closed({'kind': {'enum': list(TIMEFN_PARAMS)},
                'params': {'type': 'object'}}, ('kind', 'params')),
        allOf=[case('kind', kind, {'properties': {
            'params': closed(params, params)}})
            for kind, params in TIMEFN_PARAMS.items()]),
    'phasefield': closed({'kind': {'const': 'polynomial'},
                          'params': closed({'coefficients': {
                              'type': 'array', 'items': TIMEFN}},
                              ('coefficients',))},
                         ('kind', 'params')),
    'gauge': closed({'gamma': TIMEFN, 'lambda': TIMEFN,
                     'theta': {'if': {'type': 'null'},
                               'else': {'$ref': '#/definitions/phasefield'}}}),
}


def document(schema):
    """ Root schema for `schema`, with the shared definitions attached."""
    return dict(schema, definitions=DEFINITIONS)


def validator(schema):
    Draft7Validator.check_schema(schema)
    return Draft7Validator(schema)


TIMEFN_SCHEMA = validator(document(TIMEFN))
PHASEFIELD_SCHEMA = validator(document({
    'if': {'type': 'null'}, 'else': {'$ref': '#/definitions/phasefield'}}))
GAUGE_SCHEMA = validator(document({'$ref': '#/definitions/gauge'}))


def join(path, parts):
    for p in parts:
        if isinstance(p, int):
            path = '%s[%d]' % (path, p)
        else:
            path = '%s.%s' % (path, p) if path else str(p)
    return path


def describe(error, path=''):
    """ (dotted path, message) of a jsonschema ValidationError."""
    parts = list(error.absolute_path)
    kind, value = error.validator, error.validator_value
    if kind == 'additionalProperties':
        known = error.schema.get('properties', {})
        parts.append(sorted(set(error.instance) - set(known))[0])
        msg = 'unknown key'
    elif kind == 'required':
        parts.append(next(k for k in value if k not in error.instance))
        msg = 'missing key'
    elif kind == 'enum':
        msg = 'expected one of %s' % ', '.join(str(v) for v in value)
    elif kind == 'const':
        msg = 'expected %r' % (value,)
    elif kind == 'type':
        msg = 'expected type %s' % (value if isinstance(value, str)
                                    else ' or '.join(value))
    else:
        msg = error.message
    return join(path, parts), msg


def check(instance, schema, path=''):
    """ Validate `instance` with the Draft7Validator `schema`; raise
    ConfigError for the most relevant violation."""
    error = best_match(schema.iter_errors(instance))
    if error is not None:
        raise ConfigError(*describe(error, path))
    return instance
