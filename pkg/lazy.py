"""Decorators for lazy evaluated, read-only properties"""
import numpy as np


class lazy_property:
    """ A decorator to create a lazy evaluated property, i.e. only evaluated
    on the first call.

    When used as a function decorator, this will create an attribute that
    will be evaluated on the first call and returned. On the next calls the
    previously evaluated value will be directly return without reevaluation.
    """

    def __init__(self, fget):
        self.fget = fget
        self.func_name = fget.__name__
        self.__doc__ = fget.__doc__

    def __get__(self, obj, cls):
        if obj is None:
            return self
        value = self.fget(obj)
        setattr(obj, self.func_name, value)
        return value


class lazy_array(lazy_property):
    """ Same as lazy_property for numpy results, which are frozen
    (writeable=False) before being cached so snapshots stay immutable."""

    def __get__(self, obj, cls):
        if obj is None:
            return self
        value = np.asarray(self.fget(obj))
        value.flags.writeable = False
        setattr(obj, self.func_name, value)
        return value


def frozen(array, dtype=None):
    """ Read-only copy of `array`."""
    out = np.array(array, dtype=dtype, copy=True)
    out.flags.writeable = False
    return out
