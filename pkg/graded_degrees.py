#!/usr/bin/env python3
"""
Degree Bookkeeping Module for the Graded Calculus Tool
This module provides graded dimensions, coordinate systems, graded multi-indices
and the Koszul sign engine used to reorder monomials of graded coordinates.
"""

import os
import re
import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Tuple, Iterable, Iterator

from calc_errors import CoordinateError, NameCollision

# Configure logging
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger('graded_degrees')

MultiIndex = Tuple[int, ...]

DEFAULT_TRUNC = 8
DEGREE_LIMIT = 2 ** 31 - 1
IDENTIFIER = re.compile(r'^[A-Za-z_][A-Za-z0-9_]*$')


def default_trunc() -> int:
    """Default truncation weight, overridable through GRADEDCALC_TRUNC"""
    value = os.environ.get('GRADEDCALC_TRUNC')
    if value is None:
        return DEFAULT_TRUNC
    try:
        weight = int(value)
    except ValueError:
        logger.warning(f"Ignoring non-integer GRADEDCALC_TRUNC={value!r}")
        return DEFAULT_TRUNC
    if weight < 0:
        logger.warning(f"Ignoring negative GRADEDCALC_TRUNC={value!r}")
        return DEFAULT_TRUNC
    return weight


def _check_degree(degree: int) -> int:
    if not isinstance(degree, int) or isinstance(degree, bool):
        raise CoordinateError(f"Degree must be an integer, got {degree!r}")
    if abs(degree) > DEGREE_LIMIT:
        raise CoordinateError(f"Degree {degree} exceeds the supported range")
    return degree


@dataclass(frozen=True)
class GradedDimension:
    """Count of coordinates per integer degree, stored without zero counts"""
    counts: Tuple[Tuple[int, int], ...] = ()

    def __post_init__(self):
        for degree, count in self.counts:
            _check_degree(degree)
            if count <= 0:
                raise CoordinateError(f"Graded dimension stores a non-positive count for degree {degree}")

    @classmethod
    def from_mapping(cls, counts: Dict[int, int]) -> 'GradedDimension':
        return cls(tuple(sorted((d, c) for d, c in counts.items() if c)))

    @classmethod
    def from_degrees(cls, degrees: Iterable[int]) -> 'GradedDimension':
        counts: Dict[int, int] = {}
        for degree in degrees:
            counts[degree] = counts.get(degree, 0) + 1
        return cls.from_mapping(counts)

    def count(self, degree: int) -> int:
        return dict(self.counts).get(degree, 0)

    @property
    def degrees(self) -> List[int]:
        return [d for d, _ in self.counts]

    @property
    def total(self) -> int:
        return sum(c for _, c in self.counts)

    @property
    def n0(self) -> int:
        return self.count(0)

    @property
    def n_star(self) -> int:
        return self.total - self.n0

    def as_dict(self) -> Dict[int, int]:
        return dict(self.counts)

    def __add__(self, other: 'GradedDimension') -> 'GradedDimension':
        merged = self.as_dict()
        for degree, count in other.counts:
            merged[degree] = merged.get(degree, 0) + count
        return GradedDimension.from_mapping(merged)

    def __str__(self) -> str:
        return '(' + ', '.join(f"{d}:{c}" for d, c in self.counts) + ')'


@dataclass(frozen=True)
class CoordinateSystem:
    """
    Coordinates of a graded domain: even coordinates x^i followed by graded
    coordinates xi_mu of nonzero degree. The unified index A runs over the
    even names first, then the graded ones.
    """
    even_names: Tuple[str, ...] = ()
    graded: Tuple[Tuple[str, int], ...] = ()
    trunc: int = field(default_factory=default_trunc, compare=False)
    name: str = field(default='', compare=False)

    def __post_init__(self):
        object.__setattr__(self, 'even_names', tuple(self.even_names))
        object.__setattr__(self, 'graded', tuple((n, d) for n, d in self.graded))
        seen = set()
        for ident in self.even_names + tuple(n for n, _ in self.graded):
            if not isinstance(ident, str) or not IDENTIFIER.match(ident):
                raise CoordinateError(f"Invalid coordinate identifier {ident!r}")
            if ident in seen:
                raise NameCollision(f"Coordinate name {ident!r} is used twice")
            seen.add(ident)
        for ident, degree in self.graded:
            _check_degree(degree)
            if degree == 0:
                raise CoordinateError(f"Graded coordinate {ident!r} must have a nonzero degree")
        if self.trunc < 0:
            raise CoordinateError(f"Truncation weight must be non-negative, got {self.trunc}")

    @property
    def n0(self) -> int:
        return len(self.even_names)

    @property
    def n_star(self) -> int:
        return len(self.graded)

    @property
    def graded_names(self) -> Tuple[str, ...]:
        return tuple(n for n, _ in self.graded)

    @property
    def graded_degrees(self) -> Tuple[int, ...]:
        return tuple(d for _, d in self.graded)

    @property
    def names(self) -> Tuple[str, ...]:
        return self.even_names + self.graded_names

    @property
    def degrees(self) -> Tuple[int, ...]:
        return (0,) * self.n0 + self.graded_degrees

    @property
    def odd_mask(self) -> Tuple[bool, ...]:
        return tuple(d % 2 != 0 for d in self.graded_degrees)

    @property
    def dimension(self) -> GradedDimension:
        return GradedDimension.from_degrees(self.degrees)

    @property
    def max_weight(self) -> Optional[int]:
        """Largest possible monomial weight, or None when powers are unbounded"""
        if all(self.odd_mask):
            return self.n_star
        return None

    @property
    def zero_index(self) -> MultiIndex:
        return (0,) * self.n_star

    def index_of(self, ident: str) -> int:
        """Unified index A of a coordinate name"""
        try:
            return self.names.index(ident)
        except ValueError:
            raise CoordinateError(f"Unknown coordinate {ident!r} in system {self.label}")

    def graded_index(self, ident: str) -> int:
        try:
            return self.graded_names.index(ident)
        except ValueError:
            raise CoordinateError(f"{ident!r} is not a graded coordinate of system {self.label}")

    def unit_index(self, mu: int) -> MultiIndex:
        return tuple(1 if nu == mu else 0 for nu in range(self.n_star))

    def is_valid_index(self, p: MultiIndex) -> bool:
        if len(p) != self.n_star:
            return False
        for exponent, odd in zip(p, self.odd_mask):
            if exponent < 0 or (odd and exponent > 1):
                return False
        return True

    def with_trunc(self, trunc: int) -> 'CoordinateSystem':
        return CoordinateSystem(self.even_names, self.graded, trunc, self.name)

    @property
    def label(self) -> str:
        return self.name or '(' + ', '.join(self.names) + ')'


def weight(p: MultiIndex) -> int:
    return sum(p)


def index_degree(p: MultiIndex, cs: CoordinateSystem) -> int:
    return sum(e * d for e, d in zip(p, cs.graded_degrees))


@lru_cache(maxsize=None)
def _epsilon(p: MultiIndex, q: MultiIndex, odd: Tuple[bool, ...]) -> int:
    # exponent of -1 is sum_mu q_mu|xi_mu| * sum_{nu > mu} p_nu|xi_nu| modulo 2
    suffix = 0
    parity = 0
    for mu in range(len(odd) - 1, -1, -1):
        if odd[mu]:
            if p[mu] + q[mu] >= 2:
                return 0
            parity ^= (q[mu] & 1) & (suffix & 1)
            suffix += p[mu]
    return -1 if parity else 1


def epsilon(p: MultiIndex, q: MultiIndex, cs: CoordinateSystem) -> int:
    """
    Sign produced when reordering xi^p xi^q into xi^(p+q).

    Args:
        p: Left multi-index
        q: Right multi-index
        cs: Coordinate system both indices belong to

    Returns:
        +1 or -1, or 0 when an odd coordinate would appear squared
    """
    return _epsilon(tuple(p), tuple(q), cs.odd_mask)


def _compositions(total: int, caps: Tuple[Optional[int], ...]) -> Iterator[MultiIndex]:
    # ascending lexicographic order
    if not caps:
        if total == 0:
            yield ()
        return
    head_cap = caps[0]
    upper = total if head_cap is None else min(total, head_cap)
    for head in range(upper + 1):
        for tail in _compositions(total - head, caps[1:]):
            yield (head,) + tail


def enumerate_indices(cs: CoordinateSystem, k: int, max_weight: int) -> List[MultiIndex]:
    """
    All multi-indices of degree k and weight at most max_weight,
    weight-major then lexicographic.
    """
    caps = tuple(1 if odd else None for odd in cs.odd_mask)
    result = []
    limit = max_weight if cs.max_weight is None else min(max_weight, cs.max_weight)
    for w in range(limit + 1):
        for p in _compositions(w, caps):
            if index_degree(p, cs) == k:
                result.append(p)
    return result


def render_index(p: MultiIndex, cs: CoordinateSystem) -> str:
    """Render xi^p as a product such as xi1^2*xi2; the empty monomial renders as ''"""
    factors = []
    for name, exponent in zip(cs.graded_names, p):
        if exponent == 1:
            factors.append(name)
        elif exponent > 1:
            factors.append(f"{name}^{exponent}")
    return '*'.join(factors)
