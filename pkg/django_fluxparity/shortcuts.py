import re
from multiprocessing import Pool
from typing import Callable, Iterable, List

import numpy as np

from django_fluxparity.settings import fluxparity_settings as settings

OUTPUT_NAME_RE = re.compile(r'[^a-zA-Z0-9_.-]')


def axis_values(start: float, stop: float, points: int) -> tuple:
    """
    Evenly spaced axis values including both end points.
    """
    if points < 2:
        raise ValueError('An axis needs at least 2 points, got %r' % points)
    if start == stop:
        raise ValueError('Axis start and stop must differ (both %r)' % start)
    return tuple(float(v) for v in np.linspace(start, stop, int(points)))


def format_float(value: float) -> str:
    return format(float(value), '.17g')


def parallel_map(func: Callable, items: Iterable, workers: int = None) -> List:
    """
    Map `func` over `items`, fanning out to a process pool when more than
    one worker is configured. Results come back in input order.

    :param func: a picklable module-level callable
    :param workers: defaults to the WORKERS setting
    """
    items = list(items)
    workers = settings.WORKERS if workers is None else int(workers)
    if workers <= 1 or len(items) < 2:
        return [func(item) for item in items]

    with Pool(processes=min(workers, len(items))) as pool:
        return pool.map(func, items)


def clean_output_name(name: str) -> str:
    """
    :param name: a user supplied output file stem

    Result files live under the storage root, so anything outside
    [a-zA-Z0-9_.-] is dropped, along with leading dots.
    """
    return OUTPUT_NAME_RE.sub('', name).lstrip('.')
