"""Multiplicative orders of integers and hyperbolic SL2(Z) matrices, and the
density experiments built on them."""

import json as _json

from ._core import (
    Error,
    InvalidInput,
    PartialResult,
    ResourceLimit,
    classify,
    factorize,
    field_info,
    integer_order,
    is_prime,
    kummer_degree_interval,
    lemma_simple_census,
    matrix_order,
)
from ._core import _scan as _core_scan

__all__ = [
    "Error",
    "InvalidInput",
    "PartialResult",
    "ResourceLimit",
    "classify",
    "factorize",
    "field_info",
    "integer_order",
    "is_prime",
    "kummer_degree_interval",
    "lemma_simple_census",
    "matrix_order",
    "scan_primes",
    "scan_composites",
]


def _scan(kind, workers, with_timing, config):
    text = _core_scan(kind, _json.dumps(config), workers, with_timing)
    return _json.loads(text)


def scan_primes(*, workers=1, with_timing=True, **config):
    """Prime scan report as a dict. Keyword arguments are config keys,
    e.g. ``scan_primes(matrix="2,1;1,1", limit=10**5)``."""
    return _scan("primes", workers, with_timing, config)


def scan_composites(*, workers=1, with_timing=True, **config):
    """Composite scan report as a dict; give ``matrix``/``trace`` or ``base``."""
    return _scan("composites", workers, with_timing, config)

