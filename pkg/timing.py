"""Hierarchical timing log.

Every stage of a run (a command, an integration, a property suite) opens a
`Timing`; nested stages are drawn as a tree on stdout:

    ─┬─ Running 'evolve'
     ├──┬─ Evolving t=0..1 dt=0.00244
     │  │     Done          t     norm-1    Time left
     │  │      410     1.0000   3.11e-15          0s
     ├──┴─ Done in 0.41s
    ─┴─ exit code 0 Done in 0.52s

Verbosity comes from $NLSE_GAUGE_LOG: 'quiet' prints nothing, 'info' the
tree, 'debug' adds the `Timing.debug` lines.
"""
import os
from time import perf_counter

import numpy as np

LOG_ENV = 'NLSE_GAUGE_LOG'
LOG_LEVELS = {'quiet': 0, 'info': 1, 'debug': 2}

# (name, format, width) of the progress columns
STEP_COLUMNS = [('Done', '%d', 8),
                ('Time left', '%s', 12),
                ('Elapsed time', '%s', 14),
                ('TPU', '%s', 10)]
FREE_COLUMNS = [('Done', '%d', 8),
                ('TPU', '%s', 10),
                ('Elapsed time', '%s', 14)]


def log_level():
    """ Verbosity read from $NLSE_GAUGE_LOG (unknown values mean 'info')."""
    return LOG_LEVELS.get(os.environ.get(LOG_ENV, 'info').strip().lower(), 1)


def nice_s(*seconds):
    """Nice format for seconds with hours and minutes values if needed.

        12.2 -> "12.2s"
        78.4 -> " 1m 18.400s"
        4000 -> "1h  6m 40.0s"

    Several values give a list of strings.
    """
    if len(seconds) > 1:
        return [nice_s(s) for s in seconds]
    m, s = divmod(seconds[0], 60)
    if not m:
        return "%.3gs" % s
    h, m = divmod(m, 60)
    if not h:
        return "%2dm %.3fs" % (m, s)
    return "%dh %2dm %.1fs" % (h, m, s)


def _row(columns, values):
    return ' '.join(('%%%ds' % width) % (fmt % values[name])
                    for name, fmt, width in columns)


class Timing:
    """ Timing of a solver stage, printed as a node of the log tree.

    Open it (or use it as a context manager), print with `prt`, call `tic`
    after each unit of work and `finished` at the end. With `nbsteps` the
    progress rows carry an estimate of the time left.
    """
    depth = 0  # number of open stages

    def __init__(self, name: str, nbsteps: int = None,
                 extra_fields: list = None):
        """
        Parameters
        ----------
        name: str
            Stage label, first line of the node.
        nbsteps: int
            Expected number of units of work, if known.
        extra_fields: list
            (name, format, width) columns appended to the progress rows;
            their values are passed to `tic` as keywords.
        """
        self.name = name
        self.nbsteps = nbsteps
        self.columns = list(STEP_COLUMNS if nbsteps is not None
                            else FREE_COLUMNS) + list(extra_fields or [])
        self.header_printed = False
        if nbsteps is None:
            self.prt(name, start=True)
        else:
            self.prt('%s (steps = %d)' % (name, nbsteps), start=True)
        self.tics = [perf_counter()]
        Timing.depth += 1

    @property
    def done(self):
        """ Units of work completed."""
        return len(self.tics) - 1

    @property
    def todo(self):
        return max((self.nbsteps or 0) - self.done, 0)

    @property
    def elapsed_time(self):
        return perf_counter() - self.tics[0]

    @property
    def last_tpu(self):
        """ Time of the last unit (tpu = time per unit)."""
        return self.tics[-1] - self.tics[-2]

    @property
    def est_time_left(self):
        """ Median time per unit times the units left."""
        if self.done == 0:
            return 0.0
        return float(np.median(np.diff(self.tics))) * self.todo

    def stat(self, **extra):
        """ Values of every progress column for the current tic."""
        values = {'Done': self.done,
                  'Time left': nice_s(self.est_time_left),
                  'Elapsed time': nice_s(self.elapsed_time),
                  'TPU': nice_s(self.last_tpu)}
        values.update(extra)
        return values

    def report(self, **extra):
        if not self.header_printed:
            self.header_printed = True
            self.prt(' '.join(('%%%ds' % width) % name
                              for name, _, width in self.columns))
        self.prt(_row(self.columns, self.stat(**extra)))

    def tic(self, **extra):
        """ One unit of work done; prints a progress row."""
        self.tics.append(perf_counter())
        self.report(**extra)

    @staticmethod
    def _prefix(depth, kind):
        if kind == 'start':
            return '─┬─ ' if depth == 0 else ' │ ' * (depth - 1) + ' ├──┬─ '
        if kind == 'end':
            return '─┴─ ' if depth < 2 else ' │ ' * (depth - 2) + ' ├──┴─ '
        return ' │ ' * depth

    @classmethod
    def prt(cls, msg, start=False, end=False, level=1):
        """ Print `msg` at the current depth of the tree. Lines whose
        `level` is above the configured verbosity are dropped."""
        if log_level() < level:
            return
        kind = 'start' if start else 'end' if end else None
        print(cls._prefix(cls.depth, kind) + msg, flush=True)

    @classmethod
    def debug(cls, msg):
        cls.prt(msg, level=2)

    def finished(self, msg=None):
        """ Close the stage."""
        took = 'Done in %s' % nice_s(self.elapsed_time)
        self.prt(took if msg is None else '%s %s' % (msg, took), end=True)
        Timing.depth -= 1

    def failed(self, exc):
        """ Close the stage on an exception, naming it."""
        self.finished('%s: %s.' % (type(exc).__name__, exc))

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        if exc_type is None:
            self.finished()
        else:
            self.failed(exc_val)
        return False


class TimingWithBatchEstimator(Timing):
    """ Timing of a loop run in batches. The batch size is adapted so that a
    progress row is printed about every `target_batch_time` seconds, and
    nothing is printed before `time_before_first_print` seconds.

        tm = TimingWithBatchEstimator('loop', nbsteps=n)
        while tm.batch_size > 0:
            for i in tm.get_range():
                ...
            tm.tic()
        tm.finished()
    """

    def __init__(self, name, nbsteps=None, extra_fields=None,
                 time_before_first_print=5, target_batch_time=10,
                 first_batch_size=1, batch_size=None):
        self.tbfp = time_before_first_print
        self.tbt = target_batch_time
        self.fixed_size = batch_size
        self.batchs = [first_batch_size]
        super().__init__(name, nbsteps=nbsteps, extra_fields=extra_fields)
        self._clip()

    def _clip(self):
        if self.nbsteps is not None:
            self.batchs[-1] = min(self.batchs[-1], self.todo)

    @property
    def done(self):
        return sum(self.batchs[:-1])

    @property
    def batch_size(self):
        return self.batchs[-1]

    @property
    def last_tpu(self):
        return self.last_batch_time / max(self.batchs[-2], 1)

    @property
    def last_batch_time(self):
        return max(self.tics[-1] - self.tics[-2], 1e-9)

    @property
    def est_time_left(self):
        return self.last_tpu * self.todo

    def get_range(self):
        return range(self.done, self.done + self.batch_size)

    def tic(self, **extra):
        """ The current batch is done; size the next one."""
        self.tics.append(perf_counter())
        if self.fixed_size is not None:
            size = self.fixed_size
        else:
            size = int(np.ceil(self.tbt * self.batchs[-1]
                               / self.last_batch_time))
        self.batchs.append(max(size, 1))
        self._clip()
        if self.elapsed_time > self.tbfp:
            self.report(**extra)
