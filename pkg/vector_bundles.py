#!/usr/bin/env python3
"""
Vector Bundle Module for the Graded Calculus Tool
This module works with graded vector bundles given by transition matrices of
graded functions: the cocycle check, dual, degree shift and pullback bundles,
the gluing of the total space and the shifted bundles E[k] of ordinary bundles.
"""

import itertools
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

from calc_errors import (
    BadBaseCocycle, CoordinateMismatch, DegreeError, InvalidTransition, MissingOverlap, NameCollision
)
from graded_degrees import CoordinateSystem
from graded_series import GradedFunction, render_function, series_mul, transport
from domain_morphisms import DomainMorphism, pullback
from graded_atlas import CocycleReport, GluingData, TripleResult, trivial_gluing, verify_gluing
from rational_coefficients import BaseCoefficient

# Configure logging
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger('vector_bundles')

Matrix = List[List[GradedFunction]]
Overlap = Tuple[str, str]


@dataclass(frozen=True)
class FiberBasis:
    """Degrees |theta_lambda| of a local frame of the fiber"""
    degrees: Tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.degrees)

    def dual(self) -> 'FiberBasis':
        return FiberBasis(tuple(-d for d in self.degrees))

    def shifted(self, ell: int) -> 'FiberBasis':
        return FiberBasis(tuple(d - ell for d in self.degrees))

    def entry_degree(self, kappa: int, lam: int) -> int:
        return self.degrees[lam] - self.degrees[kappa]


def _koszul(a_kappa: int, a_lambda: int) -> int:
    return -1 if (a_lambda * (a_kappa - a_lambda)) % 2 else 1


class TransitionData:
    """
    Transition matrices G_ab of a graded vector bundle, theta_a^kappa =
    G_ab[kappa][lambda] theta_b^lambda, with every entry in chart b's
    coordinates. Either an atlas is given, or all charts share one system.
    """

    def __init__(self, charts: Sequence[str], fiber: FiberBasis, matrices: Dict[Overlap, Matrix],
                 atlas: Optional[GluingData] = None, system: Optional[CoordinateSystem] = None,
                 name: str = ''):
        if atlas is None and system is None:
            raise CoordinateMismatch("Transition data needs an atlas or a common coordinate system")
        self.charts = list(charts)
        self.fiber = fiber
        self.atlas = atlas
        self.system = system
        self.name = name
        if atlas is not None:
            unknown = [c for c in self.charts if c not in atlas.charts]
            if unknown:
                raise CoordinateMismatch(f"Charts {', '.join(unknown)} are not part of the atlas")
        self.matrices: Dict[Overlap, Matrix] = {}
        for (a, b), matrix in matrices.items():
            self.matrices[(a, b)] = self._validate(a, b, matrix)

    def system_of(self, chart: str) -> CoordinateSystem:
        if chart not in self.charts:
            raise CoordinateMismatch(f"Unknown chart {chart}")
        if self.atlas is not None:
            return self.atlas.charts[chart]
        return self.system

    def _validate(self, a: str, b: str, matrix: Matrix) -> Matrix:
        m = self.fiber.rank
        cs = self.system_of(b)
        self.system_of(a)
        if len(matrix) != m or any(len(row) != m for row in matrix):
            raise InvalidTransition(f"Transition {a}{b} must be a {m}x{m} matrix")
        checked = []
        for kappa, row in enumerate(matrix):
            out = []
            for lam, entry in enumerate(row):
                if entry.cs != cs:
                    raise CoordinateMismatch(
                        f"Entry ({kappa + 1}, {lam + 1}) of {a}{b} must live on chart {b}")
                expected = self.fiber.entry_degree(kappa, lam)
                if entry.terms and entry.degree != expected:
                    raise DegreeError(
                        f"Entry ({kappa + 1}, {lam + 1}) of {a}{b} has degree {entry.degree}, expected {expected}")
                out.append(entry.with_degree(expected))
            checked.append(out)
        if a == b:
            identity = identity_matrix(cs, self.fiber)
            for kappa in range(m):
                for lam in range(m):
                    if not checked[kappa][lam].agrees_with(identity[kappa][lam]):
                        raise InvalidTransition(f"Transition {a}{a} must be the identity")
        return checked

    def has(self, a: str, b: str) -> bool:
        return a == b or (a, b) in self.matrices

    def matrix(self, a: str, b: str) -> Matrix:
        if (a, b) in self.matrices:
            return self.matrices[(a, b)]
        if a == b:
            return identity_matrix(self.system_of(a), self.fiber)
        raise MissingOverlap(f"No transition matrix declared between charts {a} and {b}")

    def move(self, f: GradedFunction, from_chart: str, to_chart: str) -> GradedFunction:
        """Re-express a function of one chart in the coordinates of another"""
        if self.atlas is None or from_chart == to_chart:
            return f
        if not self.atlas.has(from_chart, to_chart):
            raise MissingOverlap(f"No transition declared between charts {from_chart} and {to_chart}")
        return pullback(self.atlas.transition(from_chart, to_chart), f)

    def gluing(self) -> GluingData:
        if self.atlas is not None:
            return self.atlas
        return trivial_gluing(self.system, self.charts)

    def __repr__(self) -> str:
        return f"TransitionData({self.name or '?'}: charts={self.charts}, fiber={list(self.fiber.degrees)})"


def identity_matrix(cs: CoordinateSystem, fiber: FiberBasis) -> Matrix:
    return [[GradedFunction.constant(cs, 1) if kappa == lam
             else GradedFunction.zero(cs, fiber.entry_degree(kappa, lam))
             for lam in range(fiber.rank)] for kappa in range(fiber.rank)]


def check_cocycle(T: TransitionData) -> CocycleReport:
    """
    Check sum_rho G_bc[rho][lambda] * phi_bc*(G_ab[kappa][rho]) = G_ac[kappa][lambda]
    on every triple where G_ab and G_bc are declared.

    Raises:
        MissingOverlap: G_ac or phi_bc is needed but was not declared
    """
    report = CocycleReport()
    m = T.fiber.rank
    for a, b, c in itertools.product(T.charts, repeat=3):
        if a == b or b == c or not (T.has(a, b) and T.has(b, c)):
            continue
        if not T.has(a, c):
            raise MissingOverlap(f"Triple ({a}, {b}, {c}) needs a transition between {a} and {c}")
        G_ab, G_bc, G_ac = T.matrix(a, b), T.matrix(b, c), T.matrix(a, c)
        moved = [[T.move(entry, b, c) for entry in row] for row in G_ab]
        witness = ''
        for kappa, lam in itertools.product(range(m), repeat=2):
            total = GradedFunction.zero(T.system_of(c), T.fiber.entry_degree(kappa, lam))
            for rho in range(m):
                total = total + series_mul(G_bc[rho][lam], moved[kappa][rho])
            expected = G_ac[kappa][lam]
            if not total.agrees_with(expected):
                witness = f"entry ({kappa + 1}, {lam + 1}) differs by {render_function(total - expected)}"
                break
        report.results.append(TripleResult((a, b, c), not witness, witness))
    logger.info(f"Cocycle check on {len(report.results)} triples: {report.summary()}")
    return report


def dual_transitions(T: TransitionData) -> TransitionData:
    """
    Transitions of the dual bundle,
    G_ab^dual[kappa][lambda] = (-1)^{a_lambda (a_kappa - a_lambda)} phi_ab*(G_ba[lambda][kappa]).
    """
    degrees = T.fiber.degrees
    m = T.fiber.rank
    matrices = {}
    for a, b in T.matrices:
        if not T.has(b, a):
            raise MissingOverlap(f"The dual needs the transition between {b} and {a}")
        reverse = T.matrix(b, a)
        rows = []
        for kappa in range(m):
            row = []
            for lam in range(m):
                entry = T.move(reverse[lam][kappa], a, b)
                if _koszul(degrees[kappa], degrees[lam]) < 0:
                    entry = -entry
                row.append(entry)
            rows.append(row)
        matrices[(a, b)] = rows
    name = f"{T.name}^*" if T.name else ''
    return TransitionData(T.charts, T.fiber.dual(), matrices, T.atlas, T.system, name)


def shift_transitions(T: TransitionData, ell: int) -> TransitionData:
    """E[ell]: same matrices, fiber degrees lowered by ell"""
    name = f"{T.name}[{ell}]" if T.name else ''
    return TransitionData(T.charts, T.fiber.shifted(ell), dict(T.matrices), T.atlas, T.system, name)


def pullback_transitions(T: TransitionData, morphisms: Union[DomainMorphism, Dict[str, DomainMorphism]],
                         atlas: Optional[GluingData] = None) -> TransitionData:
    """
    Pullback bundle phi^*E with G'_ab = phi_b*(G_ab). A single morphism is
    used for data sharing one system; otherwise one morphism per chart, into
    that chart, together with the atlas of the sources.
    """
    if isinstance(morphisms, DomainMorphism):
        phi = morphisms
        if T.atlas is not None:
            raise CoordinateMismatch("Transition data on an atlas needs one morphism per chart")
        if phi.target != T.system:
            raise CoordinateMismatch(f"Morphism does not map into {T.system.label}")
        matrices = {pair: [[pullback(phi, entry) for entry in row] for row in matrix]
                    for pair, matrix in T.matrices.items()}
        return TransitionData(T.charts, T.fiber, matrices, None, phi.source, f"{phi.name}^*{T.name}")
    if atlas is None:
        raise CoordinateMismatch("Pulling back along several morphisms needs the atlas of their sources")
    for chart in T.charts:
        if chart not in morphisms:
            raise CoordinateMismatch(f"No morphism given for chart {chart}")
        phi = morphisms[chart]
        if phi.target != T.system_of(chart) or phi.source != atlas.charts.get(chart):
            raise CoordinateMismatch(f"Morphism for chart {chart} does not match the charts")
    matrices = {(a, b): [[pullback(morphisms[b], entry) for entry in row] for row in matrix]
                for (a, b), matrix in T.matrices.items()}
    return TransitionData(T.charts, T.fiber, matrices, atlas, None, f"pullback of {T.name}" if T.name else '')


def fiber_names(prefix: str, rank: int) -> List[str]:
    return [f"{prefix}{lam + 1}" for lam in range(rank)]


def _total_chart(base: CoordinateSystem, names: Sequence[str], degrees: Sequence[int],
                 label: str) -> CoordinateSystem:
    evens = [n for n, d in zip(names, degrees) if d == 0]
    graded = [(n, d) for n, d in zip(names, degrees) if d != 0]
    try:
        return CoordinateSystem(base.even_names + tuple(evens), base.graded + tuple(graded), base.trunc, label)
    except NameCollision as e:
        raise NameCollision(f"Fiber coordinates clash with chart {label}: {e.message}")


def total_space_transitions(T: TransitionData, prefix: str = 'v') -> GluingData:
    """
    Gluing data of the total space. Fiber coordinates Xi^lambda have degree
    -|theta_lambda| and glue by
    rho_ab*(Xi_a^lambda) = sum_kappa G_ba^dual[kappa][lambda] * Xi_b^kappa.
    """
    base = T.gluing()
    degrees = T.fiber.degrees
    m = T.fiber.rank
    names = fiber_names(prefix, m)
    coordinate_degrees = [-d for d in degrees]
    charts = {label: _total_chart(base.charts[label], names, coordinate_degrees, f"{label}_total")
              for label in T.charts}
    transitions = {}
    for a, b in T.matrices:
        if a == b:
            continue
        if not base.has(a, b):
            raise MissingOverlap(f"No base transition between charts {a} and {b}")
        source, target = charts[b], charts[a]
        phi = base.transition(a, b)
        G = T.matrix(a, b)
        pulled = {}
        for K, name in enumerate(phi.target.names):
            pulled[name] = transport(phi.coordinate_pullback(K), source)
        for lam, name in enumerate(names):
            total = GradedFunction.zero(source, coordinate_degrees[lam])
            for kappa in range(m):
                entry = G[lam][kappa]
                if entry.is_zero():
                    continue
                if _koszul(degrees[kappa], degrees[lam]) < 0:
                    entry = -entry
                coordinate = GradedFunction.coordinate(source, names[kappa])
                total = total + series_mul(transport(entry, source), coordinate)
            pulled[name] = total
        ordered = [pulled[name] for name in target.names]
        transitions[(a, b)] = DomainMorphism.from_pullbacks(source, target, ordered, f"rho{a}{b}")
    return GluingData(charts, transitions, name=f"total[{T.name}]" if T.name else 'total')


@dataclass
class ShiftedBundle:
    """E[k] of an ordinary bundle: its transitions, the glued total space and the gluing report"""
    transitions: TransitionData
    total_space: GluingData
    report: CocycleReport


def shifted_bundle_Ek(base_atlas: GluingData, matrices: Dict[Overlap, Sequence[Sequence[BaseCoefficient]]],
                      k: int, rank: Optional[int] = None, prefix: str = 'xi') -> ShiftedBundle:
    """
    Build E[k] from the transition matrices of an ordinary vector bundle over
    an atlas of ordinary charts.

    Raises:
        DegreeError: k is zero
        CoordinateMismatch: some chart carries graded coordinates
        BadBaseCocycle: the ordinary matrices violate the cocycle condition
    """
    if k == 0:
        raise DegreeError("E[k] needs a nonzero shift k")
    for label, cs in base_atlas.charts.items():
        if cs.n_star:
            raise CoordinateMismatch(f"Chart {label} is not an ordinary domain")
    if rank is None:
        rank = len(next(iter(matrices.values()))) if matrices else 0
    fiber = FiberBasis((0,) * rank)
    lifted = {}
    for (a, b), rows in matrices.items():
        cs = base_atlas.charts[b]
        lifted[(a, b)] = [[GradedFunction.from_coefficient(cs, entry) if isinstance(entry, BaseCoefficient)
                           else entry for entry in row] for row in rows]
    ordinary = TransitionData(base_atlas.labels, fiber, lifted, base_atlas, name='E')
    base_report = check_cocycle(ordinary)
    if not base_report.passed:
        raise BadBaseCocycle(f"Ordinary transition matrices fail the cocycle: {base_report.failed[0].describe()}")
    shifted = shift_transitions(ordinary, -k)
    total = total_space_transitions(shift_transitions(ordinary, k), prefix)
    report = verify_gluing(total)
    logger.info(f"E[{k}] of rank {rank}: {report.summary()}")
    return ShiftedBundle(shifted, total, report)
