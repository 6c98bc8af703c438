#!/usr/bin/env python3
"""
Domain Morphism Module for the Graded Calculus Tool
This module provides morphisms of graded domains given by an underlying
rational map and coordinate pullback data, their action on functions,
composition, pointwise differentials, graded rank and constructive inversion.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from calc_errors import (
    CoordinateMismatch, DegreeError, SingularDifferential, BadUnderlyingInverse,
    CompositionPole
)
from graded_degrees import CoordinateSystem, MultiIndex, weight
from graded_series import (
    GradedFunction, Trunc, base_of, body, min_trunc, normalize_trunc, truncate,
    expansion_limit, partial, value_at, series_mul
)
from rational_coefficients import (
    BaseCoefficient, Rational, coeff_compose, coeff_eval, coeff_partial, derivative_table,
    is_polynomial, total_degree, multi_factorial, to_ground, format_point
)

# Configure logging
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger('domain_morphisms')


class DomainMorphism:
    """
    Morphism phi: source -> target of graded domains.

    Stored as the underlying map (one rational function per target even
    coordinate), the even corrections ybar (degree 0, zero body) and the
    graded pullbacks thetabar, all on the source system.
    """

    def __init__(self, source: CoordinateSystem, target: CoordinateSystem,
                 underlying: Sequence[BaseCoefficient], ybar: Sequence[GradedFunction],
                 thetabar: Sequence[GradedFunction], name: str = ''):
        if len(underlying) != target.n0 or len(ybar) != target.n0:
            raise CoordinateMismatch(
                f"Morphism into {target.label} needs {target.n0} even pullbacks")
        if len(thetabar) != target.n_star:
            raise CoordinateMismatch(
                f"Morphism into {target.label} needs {target.n_star} graded pullbacks")
        src_base = base_of(source)
        underlying = tuple(src_base.constant(u) for u in underlying)
        ybar = list(ybar)
        thetabar = list(thetabar)
        for j, y in enumerate(ybar):
            if y.cs != source:
                raise CoordinateMismatch(f"Pullback of {target.even_names[j]} does not live on {source.label}")
            ybar[j] = y.with_degree(0)
            if body(ybar[j]):
                raise DegreeError(f"Correction for {target.even_names[j]} must have zero body")
        for nu, t in enumerate(thetabar):
            if t.cs != source:
                raise CoordinateMismatch(f"Pullback of {target.graded_names[nu]} does not live on {source.label}")
            thetabar[nu] = t.with_degree(target.graded_degrees[nu])
        common = min_trunc(*(g.trunc for g in ybar + thetabar))
        self.source = source
        self.target = target
        self.underlying = underlying
        self.ybar = tuple(truncate(y, common) for y in ybar)
        self.thetabar = tuple(truncate(t, common) for t in thetabar)
        self.trunc = normalize_trunc(source, common)
        self.name = name

    @classmethod
    def identity(cls, cs: CoordinateSystem, trunc: Trunc = None) -> 'DomainMorphism':
        base = base_of(cs)
        return cls(cs, cs, base.gens,
                   [GradedFunction.zero(cs, 0, trunc) for _ in cs.even_names],
                   [GradedFunction.coordinate(cs, n, trunc) for n in cs.graded_names], name='id')

    @classmethod
    def from_pullbacks(cls, source: CoordinateSystem, target: CoordinateSystem,
                       pullbacks: Sequence[GradedFunction], name: str = '') -> 'DomainMorphism':
        """
        Build a morphism from the pullbacks of all target coordinates, listed
        in unified order (even coordinates first).
        """
        if len(pullbacks) != len(target.names):
            raise CoordinateMismatch(f"Expected {len(target.names)} coordinate pullbacks, got {len(pullbacks)}")
        underlying = []
        ybar = []
        for j in range(target.n0):
            g = pullbacks[j]
            if g.terms and g.degree != 0:
                raise DegreeError(f"Pullback of {target.even_names[j]} has degree {g.degree}, expected 0")
            b = body(g.with_degree(0))
            underlying.append(b)
            ybar.append(g.with_degree(0) - GradedFunction.from_coefficient(source, b))
        return cls(source, target, underlying, ybar, list(pullbacks[target.n0:]), name)

    def coordinate_pullback(self, K: int) -> GradedFunction:
        """phi*(w^K) for the unified target coordinate K"""
        if K < self.target.n0:
            return GradedFunction.from_coefficient(self.source, self.underlying[K]) + self.ybar[K]
        return self.thetabar[K - self.target.n0]

    def pullbacks(self) -> List[GradedFunction]:
        return [self.coordinate_pullback(K) for K in range(len(self.target.names))]

    def agrees_with(self, other: 'DomainMorphism', up_to: Trunc = None) -> bool:
        if self.source != other.source or self.target != other.target:
            return False
        return all(a.agrees_with(b, up_to) for a, b in zip(self.pullbacks(), other.pullbacks()))

    def __repr__(self) -> str:
        return f"DomainMorphism({self.name or '?'}: {self.source.label} -> {self.target.label}, trunc={self.trunc})"


def pullback(phi: DomainMorphism, f: GradedFunction) -> GradedFunction:
    """
    Pull a target function back to the source.

    Uses phi*(f) = sum_r barphi*(f_r) * thetabar^r with
    barphi*(g) = sum_alpha (1/alpha!) (d^alpha g o ul(phi)) * ybar^alpha.

    Args:
        phi: Morphism source -> target
        f: Function on the target

    Returns:
        Function on the source of the same degree

    Raises:
        CoordinateMismatch: f does not live on the target
        CompositionPole: a coefficient has a pole along the underlying map
    """
    if f.cs != phi.target:
        raise CoordinateMismatch(f"Function lives on {f.cs.label}, morphism target is {phi.target.label}")
    src, tgt = phi.source, phi.target
    src_base, tgt_base = base_of(src), base_of(tgt)
    W = normalize_trunc(src, min_trunc(f.trunc, phi.trunc))
    has_corrections = any(y.terms for y in phi.ybar)
    if W is None and src.max_weight is None and has_corrections:
        if not all(is_polynomial(c) for c in f.terms.values()):
            W = src.trunc

    theta_cache: Dict[Tuple[int, int], GradedFunction] = {}
    ybar_cache: Dict[Tuple[int, ...], GradedFunction] = {(0,) * tgt.n0: GradedFunction.constant(src, 1)}

    def theta_power(nu: int, e: int) -> GradedFunction:
        if (nu, e) not in theta_cache:
            if e == 1:
                theta_cache[(nu, e)] = truncate(phi.thetabar[nu], W)
            else:
                theta_cache[(nu, e)] = truncate(series_mul(theta_power(nu, e - 1), phi.thetabar[nu]), W)
        return theta_cache[(nu, e)]

    def ybar_power(alpha: Tuple[int, ...]) -> GradedFunction:
        if alpha not in ybar_cache:
            j = next(i for i, e in enumerate(alpha) if e)
            lower = alpha[:j] + (alpha[j] - 1,) + alpha[j + 1:]
            ybar_cache[alpha] = truncate(series_mul(ybar_power(lower), phi.ybar[j]), W)
        return ybar_cache[alpha]

    result = GradedFunction.zero(src, f.degree, W)
    for r, c in f.sorted_terms():
        wr = weight(r)
        if W is not None and wr > W:
            continue
        monomial = GradedFunction.constant(src, 1)
        for nu, e in enumerate(r):
            if e:
                monomial = truncate(series_mul(monomial, theta_power(nu, e)), W)
        if monomial.is_zero():
            continue
        if not has_corrections:
            order = 0
        elif W is not None:
            order = max((W - wr) // 2, 0)
        elif src.max_weight is not None:
            order = src.max_weight // 2
        else:
            order = total_degree(c)
        table = derivative_table(c, order, tgt_base)
        bar = GradedFunction.zero(src, 0, W)
        for alpha, derivative in table.items():
            if not derivative:
                continue
            composed = coeff_compose(derivative, phi.underlying, src_base)
            if not composed:
                continue
            scale = composed * src_base.constant(Fraction(1, multi_factorial(alpha)))
            term = ybar_power(alpha)
            if term.is_zero():
                continue
            bar = bar + term.scale(scale)
        result = result + truncate(series_mul(bar, monomial), W)
    return truncate(result, W)


def compose(phi: DomainMorphism, psi: DomainMorphism) -> DomainMorphism:
    """
    Composite A -> C of phi: A -> B and psi: B -> C, pulling C's coordinates
    back through psi and then phi.
    """
    if phi.target != psi.source:
        raise CoordinateMismatch(
            f"Cannot compose {phi.source.label}->{phi.target.label} with {psi.source.label}->{psi.target.label}")
    pulled = [pullback(phi, g) for g in psi.pullbacks()]
    name = f"{psi.name}_{phi.name}" if phi.name and psi.name else ''
    return DomainMorphism.from_pullbacks(phi.source, psi.target, pulled, name)


def _degree_groups(cs: CoordinateSystem) -> Dict[int, List[int]]:
    """Unified coordinate indices grouped by degree"""
    groups: Dict[int, List[int]] = {}
    for A, degree in enumerate(cs.degrees):
        groups.setdefault(degree, []).append(A)
    return groups


def linear_blocks(phi: DomainMorphism) -> Dict[int, List[List[BaseCoefficient]]]:
    """
    Symbolic degree blocks of the differential: the Jacobian of the
    underlying map for degree 0, and the coefficients of the linear graded
    terms of the thetabar for every other degree (rows: target coordinates).
    """
    src, tgt = phi.source, phi.target
    base = base_of(src)
    src_groups, tgt_groups = _degree_groups(src), _degree_groups(tgt)
    blocks: Dict[int, List[List[BaseCoefficient]]] = {}
    for j in sorted(set(src_groups) | set(tgt_groups)):
        rows = tgt_groups.get(j, [])
        cols = src_groups.get(j, [])
        matrix = []
        for K in rows:
            row = []
            for A in cols:
                if j == 0:
                    row.append(coeff_partial(phi.underlying[K], A, base))
                else:
                    mu = A - src.n0
                    row.append(phi.thetabar[K - tgt.n0].coefficient(src.unit_index(mu)))
            matrix.append(row)
        blocks[j] = matrix
    return blocks


@dataclass
class DegreeMatrices:
    """Evaluated degree blocks D^(j) of a differential at a base point"""
    point: Tuple[Fraction, ...]
    blocks: Dict[int, List[List[Fraction]]]
    shapes: Dict[int, Tuple[int, int]] = field(default_factory=dict)

    def rank(self, j: int) -> int:
        rows, cols = self.shapes[j]
        if rows == 0 or cols == 0:
            return 0
        entries = [[to_ground(v) for v in row] for row in self.blocks[j]]
        return DomainMatrix(entries, (rows, cols), QQ).rank()

    def ranks(self) -> Dict[int, int]:
        return {j: self.rank(j) for j in sorted(self.blocks)}


def differential_matrices(phi: DomainMorphism, point: Sequence[Rational]) -> DegreeMatrices:
    """
    Evaluate the degree blocks of the differential of phi at a point.

    Raises:
        EvalPole: some entry has a pole at the point
    """
    base = base_of(phi.source)
    point = tuple(Fraction(a) for a in point)
    blocks = {}
    shapes = {}
    for j, matrix in linear_blocks(phi).items():
        blocks[j] = [[coeff_eval(entry, point, base) for entry in row] for row in matrix]
        src_count = phi.source.dimension.count(j)
        tgt_count = phi.target.dimension.count(j)
        shapes[j] = (tgt_count, src_count)
    return DegreeMatrices(point, blocks, shapes)


def graded_rank(phi: DomainMorphism, point: Sequence[Rational]) -> Dict[int, int]:
    return differential_matrices(phi, point).ranks()


def classify(phi: DomainMorphism, point: Sequence[Rational]) -> str:
    """local-diffeo, immersion, submersion or none, from the graded rank at a point"""
    ranks = graded_rank(phi, point)
    src, tgt = phi.source.dimension, phi.target.dimension
    injective = all(ranks[j] == src.count(j) for j in ranks)
    surjective = all(ranks[j] == tgt.count(j) for j in ranks)
    if injective and surjective:
        return 'local-diffeo'
    if injective:
        return 'immersion'
    if surjective:
        return 'submersion'
    return 'none'


def _invert_matrix(matrix: List[List[BaseCoefficient]], base, degree: int) -> List[List[BaseCoefficient]]:
    size = len(matrix)
    if size == 0:
        return []
    domain = base.field.to_domain()
    dm = DomainMatrix([[domain.convert(v) for v in row] for row in matrix], (size, size), domain)
    if not dm.det():
        raise SingularDifferential(f"Degree {degree} block of the differential is singular")
    return dm.inv().to_list()


def invert_morphism(phi: DomainMorphism, underlying_inverse: Sequence[BaseCoefficient],
                    W: Trunc = None) -> DomainMorphism:
    """
    Construct the inverse of a morphism with invertible differential.

    The underlying inverse is supplied and verified; the graded part is
    obtained by inverting the linear blocks and then solving
    tau*(w) = w - tau*(R(w)) by fixed-point iteration, each round gaining
    at least one weight.

    Args:
        phi: Morphism A -> B with equal graded dimensions
        underlying_inverse: rational functions on B inverting ul(phi)
        W: Weight to which the inverse is computed

    Returns:
        psi: B -> A with phi o psi and psi o phi the identity up to weight W

    Raises:
        SingularDifferential: dimensions differ or some block is singular
        BadUnderlyingInverse: the supplied inverse fails the identity check
    """
    A, B = phi.source, phi.target
    if A.dimension != B.dimension:
        raise SingularDifferential(f"Graded dimensions differ: {A.dimension} vs {B.dimension}")
    a_base, b_base = base_of(A), base_of(B)
    h = [b_base.constant(v) for v in underlying_inverse]
    if len(h) != A.n0:
        raise BadUnderlyingInverse(f"Expected {A.n0} inverse components, got {len(h)}")
    try:
        for K, u in enumerate(phi.underlying):
            if coeff_compose(u, h, b_base) != b_base.gen(K):
                raise BadUnderlyingInverse(f"ul(phi) o h differs from the identity in component {K + 1}")
        for i, hi in enumerate(h):
            if coeff_compose(hi, phi.underlying, a_base) != a_base.gen(i):
                raise BadUnderlyingInverse(f"h o ul(phi) differs from the identity in component {i + 1}")
    except CompositionPole as e:
        raise BadUnderlyingInverse(f"Underlying inverse hits a pole: {e.message}")

    blocks = linear_blocks(phi)
    if A.n0:
        _invert_matrix(blocks[0], a_base, 0)
    src_groups, tgt_groups = _degree_groups(A), _degree_groups(B)
    thetabar: List[Optional[GradedFunction]] = [None] * A.n_star
    for j, matrix in blocks.items():
        if j == 0:
            continue
        composed = [[coeff_compose(v, h, b_base) for v in row] for row in matrix]
        inverse = _invert_matrix(composed, b_base, j)
        rows = tgt_groups[j]
        for a, col in enumerate(src_groups[j]):
            image = GradedFunction.zero(B, j)
            for b, K in enumerate(rows):
                if inverse[a][b]:
                    image = image + GradedFunction.coordinate(B, B.names[K]).scale(inverse[a][b])
            thetabar[col - A.n0] = image
    psi0 = DomainMorphism(B, A, h, [GradedFunction.zero(B, 0) for _ in range(A.n0)], thetabar, name='psi0')

    limit = expansion_limit(B, W, phi.trunc)
    sigma = compose(psi0, phi)
    coordinates = [GradedFunction.coordinate(B, n) for n in B.names]
    residues = [truncate(g - w, limit) for g, w in zip(sigma.pullbacks(), coordinates)]
    tau = DomainMorphism.identity(B, limit)
    rounds = (limit if limit is not None else B.max_weight) + 1
    for step in range(rounds):
        updated = DomainMorphism.from_pullbacks(
            B, B, [truncate(w - pullback(tau, r), limit) for w, r in zip(coordinates, residues)])
        if updated.agrees_with(tau):
            logger.debug(f"Inverse fixed point reached after {step + 1} rounds")
            tau = updated
            break
        tau = updated
    psi = compose(tau, psi0)
    psi.name = f"{phi.name}_inv" if phi.name else 'inverse'

    for w, g in zip(coordinates, phi.pullbacks()):
        if not truncate(pullback(psi, g), limit).agrees_with(w, limit):
            raise SingularDifferential("Inverse iteration did not reach the identity on the target")
    for z, g in zip([GradedFunction.coordinate(A, n) for n in A.names], psi.pullbacks()):
        if not truncate(pullback(phi, g), limit).agrees_with(z, limit):
            raise SingularDifferential("Inverse iteration did not reach the identity on the source")
    logger.info(f"Inverted morphism {phi.name or '?'} up to weight {limit}")
    return psi


def differential_of_function(f: GradedFunction, point: Sequence[Rational]) -> Dict[str, Fraction]:
    """Components (df/dz^A)(m) keyed by coordinate name"""
    return {name: value_at(partial(f, A), point) for A, name in enumerate(f.cs.names)}


def independent_at(fs: Sequence[GradedFunction], point: Sequence[Rational]) -> bool:
    """True iff, degree by degree, the differentials at the point are independent"""
    groups: Dict[int, List[List[Fraction]]] = {}
    for f in fs:
        row = list(differential_of_function(f, point).values())
        groups.setdefault(f.degree, []).append(row)
    for rows in groups.values():
        cols = len(rows[0])
        if cols == 0:
            return False
        matrix = DomainMatrix([[to_ground(v) for v in row] for row in rows], (len(rows), cols), QQ)
        if matrix.rank() < len(rows):
            return False
    return True
