# services/diagrams.py
"""
Planar string diagrams over the Frobenius generators.

A diagram is a sequence of slices read top to bottom; each slice lists its
generators left to right. Canonical forms come from the topology of the
incidence graph (first Betti number), and exact evaluation on a concrete
structure certifies them.
"""
import logging
import random
import weakref
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx

from app.config import CONFIG
from app.services.errors import (
    EmptyDiagram,
    GiveUp,
    IdentityFailed,
    InterfaceMismatch,
    NotConnected,
    ParseError,
    WidthExceeded,
)
from app.services.frobenius import FrobeniusStructure, coproduct, uloll
from app.services.linalg import GeneratorMap, Tensor, apply_generator, identity_generator

logger = logging.getLogger(__name__)


class Generator(Enum):
    ID = "id"
    MUL = "mul"
    COMUL = "comul"
    UNIT = "unit"
    COUNIT = "counit"
    CUP = "cup"
    CAP = "cap"

    @property
    def arity(self) -> Tuple[int, int]:
        return _ARITIES[self]

    @property
    def inputs(self) -> int:
        return _ARITIES[self][0]

    @property
    def outputs(self) -> int:
        return _ARITIES[self][1]


_ARITIES: Dict[Generator, Tuple[int, int]] = {
    Generator.ID: (1, 1),
    Generator.MUL: (2, 1),
    Generator.COMUL: (1, 2),
    Generator.UNIT: (0, 1),
    Generator.COUNIT: (1, 0),
    Generator.CUP: (2, 0),
    Generator.CAP: (0, 2),
}

Slice = Tuple[Generator, ...]


@dataclass(frozen=True)
class Diagram:
    """Validated slice sequence; adjacent slices agree on their interface width."""

    slices: Tuple[Slice, ...]

    def __post_init__(self) -> None:
        for s in range(1, len(self.slices)):
            expected = sum(g.outputs for g in self.slices[s - 1])
            got = sum(g.inputs for g in self.slices[s])
            if expected != got:
                raise InterfaceMismatch(s, expected, got)

    @classmethod
    def of(cls, slices: Sequence[Sequence[Generator]]) -> "Diagram":
        return cls(tuple(tuple(s) for s in slices))

    @property
    def inputs(self) -> int:
        return sum(g.inputs for g in self.slices[0]) if self.slices else 0

    @property
    def outputs(self) -> int:
        return sum(g.outputs for g in self.slices[-1]) if self.slices else 0

    def widths(self) -> List[int]:
        """Interface widths from the top boundary to the bottom boundary."""
        return [self.inputs] + [sum(g.outputs for g in s) for s in self.slices]

    def generator_count(self, include_identity: bool = False) -> int:
        return sum(1 for s in self.slices for g in s if include_identity or g is not Generator.ID)

    def then(self, other: "Diagram") -> "Diagram":
        """Vertical composition: self on top of other."""
        return Diagram(self.slices + other.slices)

    def with_identity_slice(self, interface: int) -> "Diagram":
        """Inserts a slice of identities at the given interface (0 = top)."""
        width = self.widths()[interface]
        if width == 0:
            return self
        ids = (Generator.ID,) * width
        return Diagram(self.slices[:interface] + (ids,) + self.slices[interface:])

    def to_text(self) -> str:
        return "; ".join(",".join(g.value for g in s) for s in self.slices)

    def __str__(self) -> str:
        return self.to_text()


@dataclass(frozen=True)
class StandardForm:
    m: int
    n: int
    j: int

    def __post_init__(self) -> None:
        if min(self.m, self.n, self.j) < 0:
            raise ValueError("standard form parameters are nonnegative")


# Parsing ===========================================================================

_NAMES = {g.value: g for g in Generator}


def parse_diagram(text: str) -> Diagram:
    """
    Parses "slice; slice; ..." with comma-separated generator names.

    Raises:
        ParseError: On empty slices or unknown names, with a character offset.
        InterfaceMismatch: When adjacent slices disagree on the wire count.
    """
    if not text.strip():
        raise ParseError("empty diagram", 0)
    slices: List[Slice] = []
    offset = 0
    for chunk in text.split(";"):
        gens: List[Generator] = []
        inner = offset
        for piece in chunk.split(","):
            name = piece.strip()
            where = inner + (len(piece) - len(piece.lstrip()))
            if not name:
                raise ParseError("missing generator name", where)
            if name not in _NAMES:
                raise ParseError(f"unknown generator {name!r}", where)
            gens.append(_NAMES[name])
            inner += len(piece) + 1
        slices.append(tuple(gens))
        offset += len(chunk) + 1
    return Diagram(tuple(slices))


# Topology ===========================================================================


def incidence_graph(d: Diagram) -> nx.MultiGraph:
    """
    Generator occurrences (identities included) and boundary endpoints as
    vertices; one edge per wire segment between adjacent interfaces.
    """
    graph = nx.MultiGraph()
    producers: List[Tuple] = []
    for i in range(d.inputs):
        node = ("in", i)
        graph.add_node(node)
        producers.append(node)
    for s, slice_ in enumerate(d.slices):
        consumers: List[Tuple] = []
        outputs: List[Tuple] = []
        for p, gen in enumerate(slice_):
            node = ("gen", s, p)
            graph.add_node(node, generator=gen.value)
            consumers.extend([node] * gen.inputs)
            outputs.extend([node] * gen.outputs)
        for producer, consumer in zip(producers, consumers):
            graph.add_edge(producer, consumer)
        producers = outputs
    for i, producer in enumerate(producers):
        node = ("out", i)
        graph.add_node(node)
        graph.add_edge(producer, node)
    return graph


def connectivity(d: Diagram) -> int:
    """Number of connected components of the incidence graph."""
    graph = incidence_graph(d)
    if graph.number_of_nodes() == 0:
        return 0
    return nx.number_connected_components(graph)


def bounded_faces(d: Diagram) -> int:
    """j = E - V + 1 of a connected diagram."""
    graph = incidence_graph(d)
    if graph.number_of_nodes() == 0 or not nx.is_connected(graph):
        raise NotConnected(f"diagram {d} is not connected")
    return graph.number_of_edges() - graph.number_of_nodes() + 1


def canonical_form(d: Diagram) -> StandardForm:
    if not d.slices:
        raise EmptyDiagram("diagram has no generators")
    return StandardForm(d.inputs, d.outputs, bounded_faces(d))


def standard_diagram(f: StandardForm) -> Diagram:
    """
    Right-nested products (or a unit), j beads, then coproducts nested to the
    right (or a counit).
    """
    slices: List[Slice] = []
    if f.m == 0:
        slices.append((Generator.UNIT,))
    for width in range(f.m, 1, -1):
        slices.append((Generator.ID,) * (width - 2) + (Generator.MUL,))
    for _ in range(f.j):
        slices.append((Generator.COMUL,))
        slices.append((Generator.MUL,))
    for width in range(1, f.n):
        slices.append((Generator.ID,) * (width - 1) + (Generator.COMUL,))
    if f.n == 0:
        slices.append((Generator.COUNIT,))
    if not slices:
        slices.append((Generator.ID,))
    return Diagram(tuple(slices))


# Evaluation =========================================================================

_MAPS: "weakref.WeakKeyDictionary[FrobeniusStructure, Dict[Generator, GeneratorMap]]" = weakref.WeakKeyDictionary()


def generator_maps(F: FrobeniusStructure) -> Dict[Generator, GeneratorMap]:
    """Index tables of the seven generators on F, built once per structure."""
    cached = _MAPS.get(F)
    if cached is not None:
        return cached
    algebra = F.algebra
    N = F.dim
    mul = {
        (i, j): tuple(((k,), c) for k, c in algebra.basis_product(i, j))
        for i in range(N)
        for j in range(N)
    }
    comul = {}
    for b in range(N):
        delta = coproduct(F, algebra.basis(b))
        comul[(b,)] = tuple(sorted(delta.entries.items()))
    unit = {(): tuple(((k,), c) for k, c in enumerate(algebra.unit) if not c.is_zero())}
    counit = {(i,): (((), e),) for i, e in enumerate(F.eps) if not e.is_zero()}
    cup = {
        (i, j): (((), F.gram[i, j]),) for i in range(N) for j in range(N) if not F.gram[i, j].is_zero()
    }
    cap = {(): tuple(sorted(F.metric.entries.items()))}
    maps = {
        Generator.ID: identity_generator(F.field, N),
        Generator.MUL: GeneratorMap("mul", 2, 1, {k: v for k, v in mul.items() if v}),
        Generator.COMUL: GeneratorMap("comul", 1, 2, comul),
        Generator.UNIT: GeneratorMap("unit", 0, 1, unit),
        Generator.COUNIT: GeneratorMap("counit", 1, 0, counit),
        Generator.CUP: GeneratorMap("cup", 2, 0, cup),
        Generator.CAP: GeneratorMap("cap", 0, 2, cap),
    }
    _MAPS[F] = maps
    return maps


def evaluate(d: Diagram, F: FrobeniusStructure, max_width: Optional[int] = None) -> Tensor:
    """
    Exact tensor of d on F with the m inputs first, then the n outputs.

    Raises:
        WidthExceeded: If an interface is wider than the cap (default: the
            configured cap for the algebra's dimension).
    """
    limit = max_width if max_width is not None else CONFIG.width_for_dimension(F.dim)
    widest = max(d.widths())
    if widest > limit:
        raise WidthExceeded(widest, limit)
    maps = generator_maps(F)
    m = d.inputs
    state = Tensor.identity(F.field, F.dim, m)
    for slice_ in d.slices:
        cursor = m
        for gen in slice_:
            if gen is not Generator.ID:
                state = apply_generator(state, cursor, maps[gen])
            cursor += gen.outputs
    return state


# Fuzzing ===========================================================================

_BIASED = (Generator.MUL, Generator.COMUL)
_OTHERS = (Generator.UNIT, Generator.COUNIT, Generator.CUP, Generator.CAP)


def _pick_generator(rng: random.Random, width: int, max_width: int) -> Optional[Generator]:
    for _ in range(16):
        pool = _BIASED if rng.random() < CONFIG.SPIDER_MUL_COMUL_BIAS else _OTHERS
        gen = rng.choice(pool)
        if gen.inputs <= width and width - gen.inputs + gen.outputs <= max_width:
            return gen
    return None


def random_connected_diagram(seed: int, max_generators: int, max_width: int, max_inputs: int = 2) -> Diagram:
    """
    Deterministic random connected diagram with 1..max_generators non-identity
    generators, one per slice, padded with identities.

    Raises:
        GiveUp: After CONFIG.SPIDER_MAX_RETRIES rejected candidates.
    """
    if max_generators < 1 or max_width < 1:
        raise ValueError("diagram limits must be positive")
    rng = random.Random(seed)
    for _ in range(CONFIG.SPIDER_MAX_RETRIES):
        width = rng.randint(0, min(max_inputs, max_width))
        slices: List[Slice] = []
        target = rng.randint(1, max_generators)
        while len(slices) < target:
            gen = _pick_generator(rng, width, max_width)
            if gen is None:
                break
            position = rng.randint(0, width - gen.inputs)
            rest = width - gen.inputs - position
            slices.append((Generator.ID,) * position + (gen,) + (Generator.ID,) * rest)
            width = width - gen.inputs + gen.outputs
        if not slices:
            continue
        candidate = Diagram(tuple(slices))
        if connectivity(candidate) == 1:
            return candidate
    raise GiveUp(f"no connected diagram after {CONFIG.SPIDER_MAX_RETRIES} attempts (seed {seed})")


@dataclass
class SpiderFailure:
    diagram: str
    form: StandardForm
    lhs: Tensor
    rhs: Tensor


@dataclass
class SpiderReport:
    total: int
    passed: int
    failures: List[SpiderFailure] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.passed == self.total


def spider_check(d: Diagram, F: FrobeniusStructure, max_width: Optional[int] = None) -> Tuple[bool, StandardForm, Tensor, Tensor]:
    form = canonical_form(d)
    lhs = evaluate(d, F, max_width)
    rhs = evaluate(standard_diagram(form), F, max_width)
    return lhs == rhs, form, lhs, rhs


def run_spider(
    F: FrobeniusStructure,
    count: int = CONFIG.SPIDER_COUNT,
    seed: int = CONFIG.SPIDER_SEED,
    max_generators: int = CONFIG.SPIDER_MAX_GENERATORS,
    max_width: Optional[int] = None,
) -> SpiderReport:
    """Evaluates `count` random diagrams against their standard forms."""
    width = max_width if max_width is not None else CONFIG.width_for_dimension(F.dim)
    report = SpiderReport(total=count, passed=0)
    for case in range(count):
        d = random_connected_diagram(seed * 1_000_003 + case, max_generators, width)
        ok, form, lhs, rhs = spider_check(d, F, width)
        if ok:
            report.passed += 1
        else:
            report.failures.append(SpiderFailure(d.to_text(), form, lhs, rhs))
        if (case + 1) % 50 == 0:
            logger.info("spider: %d/%d cases evaluated", case + 1, count)
    return report


def bead_additivity(F: FrobeniusStructure, j1: int, j2: int, max_width: Optional[int] = None) -> bool:
    stacked = standard_diagram(StandardForm(1, 1, j1)).then(standard_diagram(StandardForm(1, 1, j2)))
    return evaluate(stacked, F, max_width) == evaluate(standard_diagram(StandardForm(1, 1, j1 + j2)), F, max_width)


# Identity suite ======================================================================

LEMMA_IDENTITIES: Tuple[Tuple[str, Tuple[str, ...]], ...] = (
    ("(2,1) product via cup", ("mul", "id,comul; cup,id", "comul,id; id,cup")),
    ("(1,2) coproduct via cap", ("comul", "id,cap; mul,id", "cap,id; id,mul")),
    ("(1,1) snake", ("id", "id,cap; cup,id", "cap,id; id,cup")),
    ("(1,1) unit", ("id", "unit,id; mul", "id,unit; mul")),
    ("(1,1) counit", ("id", "comul; counit,id", "comul; id,counit")),
    ("(1,1) bead", ("comul; mul", "cap,id; mul,id; mul", "id,cap; id,mul; mul")),
    ("(3,1) associativity", ("mul,id; mul", "id,mul; mul")),
    ("(1,3) coassociativity", ("comul; comul,id", "comul; id,comul")),
    ("(0,2) cap", ("cap", "unit; comul")),
    ("(2,0) cup", ("cup", "mul; counit")),
    ("(1,0) counit via cup", ("counit", "unit,id; cup", "id,unit; cup")),
    ("(0,1) unit via cap", ("unit", "cap; counit,id", "cap; id,counit")),
    ("(0,0) circle", ("cap; cup", "unit; comul; mul; counit")),
    ("(2,2) Frobenius law", ("mul; comul", "id,comul; mul,id", "comul,id; id,mul")),
    ("(3,0) invariance", ("mul,id; cup", "id,mul; cup")),
)
"""Each group lists diagrams that evaluate to the same tensor on any Frobenius algebra."""


@dataclass
class LemmaCheck:
    tag: str
    passed: bool
    witness: Optional[str] = None


def lemma_suite(F: FrobeniusStructure, raise_on_failure: bool = True) -> List[LemmaCheck]:
    """
    Evaluates every identity group on F, plus the circle = dim_1 and
    special <=> B = 1 <=> uloll = eps checks.

    Raises:
        IdentityFailed: On the first failing group when raise_on_failure.
    """
    width = CONFIG.IDENTITY_MAX_WIDTH
    checks: List[LemmaCheck] = []
    for tag, texts in LEMMA_IDENTITIES:
        reference = evaluate(parse_diagram(texts[0]), F, width)
        witness = None
        for text in texts[1:]:
            value = evaluate(parse_diagram(text), F, width)
            diff = reference.first_difference(value)
            if diff is not None:
                index, a, b = diff
                witness = f"{texts[0]!r} vs {text!r} at {index}: {a} != {b}"
                break
        checks.append(LemmaCheck(tag, witness is None, witness))
    circle = evaluate(parse_diagram("cap; cup"), F, width).scalar_value()
    dim_one = F.epsilon(F.power_of_lollipop(1))
    checks.append(
        LemmaCheck("(0,0) circle = dim_1", circle == dim_one, None if circle == dim_one else f"{circle} != {dim_one}")
    )
    is_special = F._lollipop == F.algebra.one
    bead_free = evaluate(parse_diagram("comul; mul"), F, width) == evaluate(parse_diagram("id"), F, width)
    uloll_is_eps = list(uloll(F)) == list(F.eps)
    agree = is_special == bead_free == uloll_is_eps
    checks.append(
        LemmaCheck(
            "special",
            agree,
            None if agree else f"B=1: {is_special}, bead removable: {bead_free}, uloll=eps: {uloll_is_eps}",
        )
    )
    failed = [c for c in checks if not c.passed]
    logger.info("identity suite: %d/%d groups pass", len(checks) - len(failed), len(checks))
    if failed and raise_on_failure:
        raise IdentityFailed(failed[0].tag, failed[0].witness)
    return checks
