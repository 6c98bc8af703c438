#!/usr/bin/env python3
"""
Graded Atlas Module for the Graded Calculus Tool
This module glues graded domains into atlases. It checks the gluing cocycle
on every triple of charts, checks compatibility of global functions and builds
products of systems and morphisms.
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from calc_errors import CoordinateMismatch, DegreeError, MissingOverlap
from graded_degrees import CoordinateSystem
from graded_series import GradedFunction, min_trunc, render_function, transport
from domain_morphisms import DomainMorphism, compose, pullback

# Configure logging
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger('graded_atlas')

Overlap = Tuple[str, str]


@dataclass
class TripleResult:
    """Outcome of the cocycle check on one ordered triple of charts"""
    triple: Tuple[str, str, str]
    passed: bool
    witness: str = ''

    def describe(self) -> str:
        label = '(' + ', '.join(self.triple) + ')'
        if self.passed:
            return f"{label}: ok"
        return f"{label}: {self.witness}"


@dataclass
class CocycleReport:
    """Per-triple results of a cocycle check"""
    results: List[TripleResult] = field(default_factory=list)

    @property
    def failed(self) -> List[TripleResult]:
        return [r for r in self.results if not r.passed]

    @property
    def passed(self) -> bool:
        return not self.failed

    def summary(self) -> str:
        state = 'PASS' if self.passed else 'FAIL'
        return f"{state} ({len(self.failed)} triples failed)"

    def lines(self) -> List[str]:
        return [self.summary()] + [r.describe() for r in self.failed]


class GluingData:
    """
    Charts of an atlas and the transitions between them.

    transitions[(a, b)] is phi_ab from chart b to chart a, so that
    phi_ab*(f) re-expresses a function of chart a in the coordinates of b.
    Undeclared diagonal transitions are identities.
    """

    def __init__(self, charts: Dict[str, CoordinateSystem],
                 transitions: Dict[Overlap, DomainMorphism], name: str = ''):
        self.charts = dict(charts)
        self.transitions = dict(transitions)
        self.name = name
        for (a, b), phi in self.transitions.items():
            for label in (a, b):
                if label not in self.charts:
                    raise CoordinateMismatch(f"Transition {a}{b} names unknown chart {label}")
            if phi.source != self.charts[b] or phi.target != self.charts[a]:
                raise CoordinateMismatch(
                    f"Transition {a}{b} must run from {self.charts[b].label} to {self.charts[a].label}")
        logger.debug(f"Atlas {name or '?'} with {len(self.charts)} charts and {len(self.transitions)} transitions")

    @property
    def labels(self) -> List[str]:
        return list(self.charts)

    def has(self, a: str, b: str) -> bool:
        return a == b or (a, b) in self.transitions

    def transition(self, a: str, b: str) -> DomainMorphism:
        if (a, b) in self.transitions:
            return self.transitions[(a, b)]
        if a == b:
            return DomainMorphism.identity(self.charts[a])
        raise MissingOverlap(f"No transition declared between charts {a} and {b}")

    def overlaps(self) -> Iterator[Overlap]:
        for pair in self.transitions:
            yield pair

    def __repr__(self) -> str:
        return f"GluingData({self.name or '?'}: charts={self.labels})"


def _triples(labels: Sequence[str], has) -> Iterator[Tuple[str, str, str]]:
    for a, b, c in itertools.product(labels, repeat=3):
        if a == b or b == c:
            continue
        if has(a, b) and has(b, c):
            yield a, b, c


def verify_gluing(atlas: GluingData) -> CocycleReport:
    """
    Check phi_ac = phi_ab o phi_bc on every triple where phi_ab and phi_bc
    exist, comparing the pullbacks of chart a's coordinates.

    Raises:
        MissingOverlap: phi_ac is needed but was not declared
    """
    report = CocycleReport()
    for a, b, c in _triples(atlas.labels, atlas.has):
        if not atlas.has(a, c):
            raise MissingOverlap(f"Triple ({a}, {b}, {c}) needs a transition between {a} and {c}")
        direct = atlas.transition(a, c)
        through = compose(atlas.transition(b, c), atlas.transition(a, b))
        witness = ''
        for K, name in enumerate(atlas.charts[a].names):
            left = direct.coordinate_pullback(K)
            right = through.coordinate_pullback(K)
            if not left.agrees_with(right):
                witness = f"pullback of {name} differs by {render_function(left - right)}"
                break
        report.results.append(TripleResult((a, b, c), not witness, witness))
    logger.info(f"Gluing check on {len(report.results)} triples: {report.summary()}")
    return report


@dataclass
class GlobalFunction:
    """One representative per chart of a function on a glued space"""
    degree: int
    representatives: Dict[str, GradedFunction]
    atlas: str = ''


def check_global_function(atlas: GluingData, f: GlobalFunction) -> CocycleReport:
    """
    Check f_b = phi_ab*(f_a) on every declared overlap. Results are reported
    per overlap as (a, b, b) entries; report.passed is the yes/no answer.
    """
    for label, rep in f.representatives.items():
        if label not in atlas.charts:
            raise CoordinateMismatch(f"Representative for unknown chart {label}")
        if rep.cs != atlas.charts[label]:
            raise CoordinateMismatch(f"Representative on chart {label} does not live on {atlas.charts[label].label}")
        if rep.terms and rep.degree != f.degree:
            raise DegreeError(f"Representative on chart {label} has degree {rep.degree}, expected {f.degree}")
    missing = [label for label in atlas.charts if label not in f.representatives]
    if missing:
        raise CoordinateMismatch(f"No representative on charts {', '.join(missing)}")
    report = CocycleReport()
    for a, b in atlas.overlaps():
        if a == b:
            continue
        moved = pullback(atlas.transition(a, b), f.representatives[a])
        local = f.representatives[b]
        witness = ''
        if not moved.agrees_with(local):
            witness = f"representatives differ by {render_function(moved - local)}"
        report.results.append(TripleResult((a, b, b), not witness, witness))
    return report


def product_system(first: CoordinateSystem, second: CoordinateSystem, name: str = '') -> CoordinateSystem:
    """Product domain: even coordinates of both, then graded coordinates of both"""
    return CoordinateSystem(first.even_names + second.even_names, first.graded + second.graded,
                            min_trunc(first.trunc, second.trunc), name)


def projections(first: CoordinateSystem, second: CoordinateSystem,
                product: Optional[CoordinateSystem] = None) -> Tuple[DomainMorphism, DomainMorphism]:
    """The two projections out of the product domain"""
    product = product or product_system(first, second)
    pr1 = DomainMorphism.from_pullbacks(
        product, first, [GradedFunction.coordinate(product, n) for n in first.names], 'pr1')
    pr2 = DomainMorphism.from_pullbacks(
        product, second, [GradedFunction.coordinate(product, n) for n in second.names], 'pr2')
    return pr1, pr2


def product_morphism(phi: DomainMorphism, psi: DomainMorphism) -> DomainMorphism:
    """phi x psi between the product domains"""
    source = product_system(phi.source, psi.source)
    target = product_system(phi.target, psi.target)
    left = [transport(g, source) for g in phi.pullbacks()]
    right = [transport(g, source) for g in psi.pullbacks()]
    n0, m0 = phi.target.n0, psi.target.n0
    pulled = left[:n0] + right[:m0] + left[n0:] + right[m0:]
    name = f"{phi.name}x{psi.name}" if phi.name and psi.name else ''
    return DomainMorphism.from_pullbacks(source, target, pulled, name)


def trivial_gluing(cs: CoordinateSystem, labels: Sequence[str]) -> GluingData:
    """Every chart is the same domain and every transition is the identity"""
    charts = {label: cs for label in labels}
    identity = DomainMorphism.identity(cs)
    transitions = {(a, b): identity for a in labels for b in labels if a != b}
    return GluingData(charts, transitions, name=f"trivial[{cs.label}]")
