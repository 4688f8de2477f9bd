"""
Ordered parallel map over an optional executor.
"""

import logging

logger = logging.getLogger(__name__)


def parallel_map(fn, items, executor=None):
    """
    ``[fn(x) for x in items]``, evaluated on ``executor`` when one is given.

    Results come back in input order whatever order the workers finish in.
    The first exception raised by ``fn`` propagates unchanged.
    """
    items = list(items)
    if executor is None or len(items) < 2:
        return [fn(item) for item in items]
    logger.debug("mapping %d tasks over %r", len(items), executor)
    return list(executor.map(fn, items))
