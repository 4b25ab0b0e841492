# services/suites.py
"""
Acceptance suites run by `fwb verify`.

Every suite returns a flat list of SuiteCheck rows comparing an expected value
(from a closed-form prediction or a frozen regression value) with the value
the workbench computes. Sampling is driven by a seeded random.Random so the
tables are reproducible.
"""
import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence

from app.config import CONFIG
from app.services import uqsl2 as uq
from app.services.algebra import element_inverse, random_invertible
from app.services.builders import (
    Q,
    abelianization_order,
    block_twist_prediction,
    diagonal,
    group_class_function_series,
    group_standard_form,
    group_twist,
    matrix_frobenius,
    matrix_prediction,
    resolve_builtin,
    s3,
    s3_general_element,
    s3_predicted_fdim,
    s3_predicted_series,
    s3_special_inverse_twist,
    semisimple_algebra,
    semisimple_block_twist,
    semisimple_special_form,
    weakly_symmetric_block_form,
    weakly_symmetric_prediction,
)
from app.services.diagrams import bead_additivity, lemma_suite, run_spider
from app.services.errors import NotInvertible, Singular, UnknownBuiltin
from app.services.frobenius import (
    FrobeniusStructure,
    classify,
    fdim,
    hilbert_series,
    lollipop,
    rational_closed_form,
    trace_form,
    twist,
    twisted_lollipop,
    uloll,
)
from app.services.linalg import Matrix, invert
from app.services.scalars import FieldSpec, Scalar, format_scalar
from app.services.series import RationalSeries

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SuiteCheck:
    """One row of a verification table."""

    id: str
    expected: str
    actual: str
    passed: bool

    def to_json(self) -> Dict[str, object]:
        return {"id": self.id, "expected": self.expected, "actual": self.actual, "passed": self.passed}


def _fmt(value: object) -> str:
    if isinstance(value, Scalar):
        return format_scalar(value)
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_fmt(v) for v in value) + "]"
    return str(value)


class _Table:
    """Collects checks for one suite."""

    def __init__(self, suite: str) -> None:
        self.suite = suite
        self.checks: List[SuiteCheck] = []

    def expect(self, tag: str, expected: object, actual: object) -> bool:
        if isinstance(expected, (list, tuple)) and isinstance(actual, (list, tuple)):
            passed = len(expected) == len(actual) and all(a == b for a, b in zip(expected, actual))
        else:
            passed = expected == actual
        self.checks.append(SuiteCheck(f"{self.suite}/{tag}", _fmt(expected), _fmt(actual), bool(passed)))
        return bool(passed)

    def done(self) -> List[SuiteCheck]:
        failed = sum(1 for c in self.checks if not c.passed)
        logger.info("suite %s: %d checks, %d failed", self.suite, len(self.checks), failed)
        return self.checks


def _random_invertible_matrix(rng: random.Random, d: int) -> Matrix:
    while True:
        M = Matrix(Q, [[Q.from_value(rng.randint(-3, 3)) for _ in range(d)] for _ in range(d)])
        try:
            invert(M)
            return M
        except Singular:
            continue


# Matrix algebras ===================================================================


def matrix_suite(rng: random.Random, samples: int = 20) -> List[SuiteCheck]:
    """eps = Tr(u .) on M_2 and M_3 against the trace formulas."""
    table = _Table("matrix")
    for d in (2, 3):
        cases = [_random_invertible_matrix(rng, d) for _ in range(samples)]
        cases.append(diagonal([2] * d))
        cases.append(diagonal([1] * (d - 1) + [Fraction(-1, d - 1)]))
        for k, u in enumerate(cases):
            tag = f"d{d}/u{k:02d}"
            F = matrix_frobenius(d, u)
            prediction = matrix_prediction(u)
            tr_inv = invert(u).trace()
            table.expect(f"{tag}/lollipop", F.algebra.one * tr_inv, lollipop(F))
            table.expect(f"{tag}/counit_scale", prediction.counit_scale, F.epsilon(F.algebra.one))
            table.expect(f"{tag}/fdim", prediction.fdim, fdim(F, 1))
            table.expect(f"{tag}/series", prediction.series, rational_closed_form(F))
            kind = classify(F)
            table.expect(f"{tag}/symmetric", prediction.symmetric, kind.symmetric)
            if tr_inv.is_zero():
                table.expect(f"{tag}/asymmetric_weakly_symmetric", True, kind.weakly_symmetric and not kind.symmetric)
    return table.done()


# Semisimple sums ===================================================================


def semisimple_suite(rng: random.Random, samples: int = 5) -> List[SuiteCheck]:
    """K + K + M_2 with block twists and weakly symmetric strata."""
    table = _Table("semisimple")
    dims = (1, 1, 2)
    F = semisimple_special_form(dims)
    kind = classify(F)
    table.expect("special_form/special", True, kind.special)
    table.expect("special_form/symmetric", True, kind.symmetric)
    table.expect("special_form/fdim", 6, kind.fdim)
    table.expect("special_form/trace_form", list(F.eps), list(trace_form(semisimple_algebra(dims)).eps))

    for k in range(samples):
        blocks = [
            [[rng.choice([-2, -1, 1, 2, 3])]],
            [[rng.choice([-2, -1, 1, 2, 3])]],
            _random_invertible_matrix(rng, 2),
        ]
        twisted = semisimple_block_twist(dims, blocks)
        circle, series = block_twist_prediction(dims, blocks)
        table.expect(f"block_twist{k}/fdim", circle, fdim(twisted, 1))
        table.expect(f"block_twist{k}/series", series, rational_closed_form(twisted))

    strata = [
        ((1, 1, 2), (0, 1, 2), {}),
        ((1, 1, 2), (0, 1), {}),
        ((1, 1, 2), (0, 1, 2), {2: 3}),
        ((2, 3), (0,), {}),
        ((2, 3), (1,), {1: -2}),
    ]
    for k, (block_dims, chosen, mus) in enumerate(strata):
        W = weakly_symmetric_block_form(block_dims, chosen, mus)
        circle, series = weakly_symmetric_prediction(block_dims, chosen, mus)
        kind = classify(W)
        table.expect(f"stratum{k}/weakly_symmetric", True, kind.weakly_symmetric)
        table.expect(f"stratum{k}/fdim", circle, kind.fdim)
        table.expect(f"stratum{k}/series", series, rational_closed_form(W))
        table.expect(f"stratum{k}/symmetric", len(chosen) == len(block_dims), kind.symmetric)
    return table.done()


# Symmetric group ===================================================================


def _s3_nonscalar_weak_twist(algebra, b: Fraction):
    """Inverse of (e + rs + sr)/3 + b(r - t): B = 2(e + rs + sr)."""
    third = Fraction(1, 3)
    v = s3_general_element(algebra, third, 0, third, 0, b, 0)
    return element_inverse(v)


def s3_suite(rng: random.Random, samples: int = 10) -> List[SuiteCheck]:
    table = _Table("s3")
    G = s3()
    base = group_standard_form(G)
    algebra = base.algebra

    drawn = 0
    while drawn < samples:
        a, b, c = (Fraction(rng.randint(-2, 2), 12) for _ in range(3))
        try:
            family = s3_special_inverse_twist(algebra, a, b, c)
        except NotInvertible:
            continue
        tag = f"special{drawn}"
        drawn += 1
        table.expect(f"{tag}/inverse", family.predicted, element_inverse(family.inverse))
        F = group_twist(G, family.predicted, base)
        kind = classify(F)
        table.expect(f"{tag}/special", True, kind.special)
        table.expect(f"{tag}/fdim", family.fdim, kind.fdim)

    drawn = 0
    while drawn < 3:
        alpha, beta, gamma = (Fraction(rng.randint(1, 4)), Fraction(rng.randint(-1, 1)), Fraction(rng.randint(-3, -1)))
        try:
            F = group_twist(G, s3_general_element(algebra, alpha, beta, gamma), base)
        except NotInvertible:
            continue
        k = drawn
        drawn += 1
        kind = classify(F)
        table.expect(f"central{k}/symmetric", True, kind.symmetric)
        table.expect(f"central{k}/fdim", 6, kind.fdim)
        table.expect(f"central{k}/series", s3_predicted_series(alpha, beta, gamma), rational_closed_form(F))

    lower = abelianization_order(G)
    weak = group_twist(G, _s3_nonscalar_weak_twist(algebra, Fraction(1)), base)
    for tag, F, values in (("weak_standard", base, [6, 0, 0, 0, 0, 0]), ("weak_trivial_sign", weak, [2, 0, 0, 0, 2, 2])):
        kind = classify(F)
        table.expect(f"{tag}/uloll", values, uloll(F))
        table.expect(f"{tag}/weakly_symmetric", True, kind.weakly_symmetric)
        table.expect(f"{tag}/fdim_bounds", True, lower <= kind.fdim.rational_value() <= G.order)
    table.expect("weak_trivial_sign/symmetric", False, classify(weak).symmetric)

    series = group_class_function_series(G)
    expected = {
        "e": RationalSeries.geometric(Q.one, Q.from_value(6)),
        "r": RationalSeries.from_fraction([Q.zero, Q.from_value(2)], [Q.one, Q.zero, Q.from_value(-36)], Q),
        "rs": RationalSeries.from_fraction([Q.zero, Q.from_value(3)], [Q.one, Q.from_value(-3), Q.from_value(-18)], Q),
    }
    for label, value in expected.items():
        table.expect(f"class_series/{label}", value, series[label])
    table.expect("class_series/transpositions", True, series["r"] == series["s"] == series["t"])
    table.expect("class_series/three_cycles", True, series["rs"] == series["sr"])

    drawn = 0
    while drawn < 3:
        params = [Fraction(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(6)]
        try:
            predicted = s3_predicted_series(*params)
            F = group_twist(G, s3_general_element(algebra, *params), base)
        except NotInvertible:
            continue
        table.expect(f"general{drawn}/fdim", s3_predicted_fdim(*params), fdim(F, 1))
        table.expect(f"general{drawn}/series", predicted, rational_closed_form(F))
        drawn += 1
    return table.done()


# u_q(sl2) ==========================================================================


def uqsl2_n2_suite(rng: random.Random, samples: int = 20) -> List[SuiteCheck]:
    """The full eight-parameter moduli of u_{-1}(sl2)."""
    table = _Table("uqsl2-n2")
    base = uq.uqsl2_integral_form(2)
    algebra = base.algebra
    fe = algebra.basis_element("FE")
    table.expect("center/dimension", 3, uq.center_dimension(2))
    table.expect("center/symmetric_forms", 3, uq.symmetric_form_count(2))
    drawn = 0
    while drawn < samples:
        values = [rng.randint(-3, 3) for _ in range(8)]
        if drawn % 4 == 0:
            values[0] = values[4] = values[5] = values[6] = values[7] = 0
        p = uq.N2Parameters.of(*values)
        if (p.a * p.a - p.b * p.b).is_zero():
            continue
        tag = f"u{drawn:02d}"
        drawn += 1
        u = uq.n2_element(p)
        F = twist(base, u)
        table.expect(f"{tag}/form", uq.n2_predicted_form(p), uq.in_parameter_order(algebra, list(F.eps)))
        table.expect(f"{tag}/inverse", uq.n2_inverse_closed_form(p), element_inverse(u))
        table.expect(f"{tag}/lollipop", fe * uq.n2_predicted_lollipop_factor(p), lollipop(F))
        factor = 8 * p.b * p.b / (p.b * p.b - p.a * p.a)
        table.expect(f"{tag}/fdim", factor, fdim(F, 1))
        table.expect(f"{tag}/higher_dims", [0, 0, 0], [fdim(F, j) for j in (2, 3, 4)])
        kind = classify(F)
        table.expect(f"{tag}/special", False, kind.special)
        table.expect(f"{tag}/weakly_symmetric", True, kind.weakly_symmetric)
        symmetric = all(v == 0 for v in (p.a, p.alpha, p.beta, p.gamma, p.delta))
        table.expect(f"{tag}/symmetric", symmetric, kind.symmetric)
    return table.done()


def _random_degree_zero(rng: random.Random, algebra, n: int, cartan: Sequence[int]):
    """Cartan part u_K plus random K^i F^j E^j terms with j >= 1."""
    acc = uq.cartan_element(algebra, cartan)
    for i in range(n):
        for j in range(1, n):
            c = rng.randint(-2, 2)
            if c:
                acc = acc + algebra.basis_element(uq.monomial_label((i, j, j))) * c
    return acc


def _invertible_cartan(rng: random.Random, n: int = 3) -> List[int]:
    while True:
        coeffs = [rng.randint(-3, 3) for _ in range(n)]
        if not uq.circulant_determinant([FieldSpec.cyclotomic(n).from_value(c) for c in coeffs]).is_zero():
            return coeffs


def uqsl2_n3_suite(rng: random.Random, samples: int = 10, search: int = 200) -> List[SuiteCheck]:
    table = _Table("uqsl2-n3")
    base = uq.uqsl2_integral_form(3)
    algebra = base.algebra
    q = uq.q_of(algebra)

    symmetric = uq.uqsl2_symmetric_form(3)
    table.expect("k_twist/symmetric", True, classify(symmetric).symmetric)
    c = uq.casimir(3)
    table.expect("casimir/cube", algebra.one * 2 + c * (3 * q), c ** 3)
    for name in ("K", "E", "F"):
        g = algebra.basis_element(name)
        table.expect(f"casimir/central_{name}", g * c, c * g)
    table.expect("k_twist/lollipop", (c * c - algebra.one * q ** -2) * (3 / q), lollipop(symmetric))
    table.expect("k_twist/dims", [0, 27, 81, 729], hilbert_series(symmetric, 4))
    table.expect("center/dimension", 4, uq.center_dimension(3))
    table.expect("center/symmetric_forms", 4, uq.symmetric_form_count(3))

    top = [algebra.index(uq.monomial_label((i, 2, 2))) for i in range(3)]
    drawn = 0
    while drawn < samples:
        u0, u1, u2 = (rng.randint(-3, 3) for _ in range(3))
        try:
            prediction = uq.cartan_prediction(u0, u1, u2)
        except NotInvertible:
            continue
        tag = f"cartan{drawn}"
        drawn += 1
        F = uq.uqsl2_cartan_twist(u0, u1, u2)
        table.expect(f"{tag}/eps_top", list(prediction.eps_top), [F.eps[t] for t in top])
        table.expect(f"{tag}/dim0", 0, fdim(F, 0))
        table.expect(f"{tag}/fdim", prediction.fdim, fdim(F, 1))
        table.expect(f"{tag}/higher_dims", [prediction.higher_dim(j) for j in (2, 3)], [fdim(F, j) for j in (2, 3)])

    example = twist(base, uq.n3_example_twist_element())
    table.expect("example/dim0", Fraction(-3, 2), fdim(example, 0))
    table.expect("example/fdim", 18, fdim(example, 1))
    table.expect("example/higher_dims", [0, 0, 0], [fdim(example, j) for j in (2, 3, 4)])
    values = uq.n3_example_uloll()
    table.expect("example/uloll", [values.get(label, algebra.field.zero) for label in algebra.labels], uloll(example))
    kind = classify(example)
    table.expect("example/asymmetric_weakly_symmetric", True, kind.weakly_symmetric and not kind.symmetric)

    # v and deg_0(v) both invertible; B of the twist by v against the twist by deg_0(v)
    drawn = 0
    while drawn < samples:
        v = _random_degree_zero(rng, algebra, 3, _invertible_cartan(rng))
        for label in ("E", "F", "KE", "F^2E"):
            v = v + algebra.basis_element(label) * rng.randint(-2, 2)
        try:
            element_inverse(v)
            uq.inverse_via_degree_zero(v)
        except NotInvertible:
            continue
        table.expect(
            f"grading{drawn}/lollipop",
            twisted_lollipop(base, uq.degree_zero_part(v)),
            twisted_lollipop(base, v),
        )
        drawn += 1

    drawn = 0
    while drawn < samples:
        cartan = _invertible_cartan(rng)
        u = _random_degree_zero(rng, algebra, 3, cartan)
        try:
            u_inv = element_inverse(u)
        except NotInvertible:
            continue
        u_k = uq.cartan_element(algebra, cartan)
        table.expect(f"inverse_lemma{drawn}/cartan_part", element_inverse(u_k), uq.cartan_part(u_inv))
        drawn += 1

    special = singular = 0
    for _ in range(search):
        v = _random_degree_zero(rng, algebra, 3, _invertible_cartan(rng))
        try:
            element_inverse(v)
        except NotInvertible:
            singular += 1
            continue
        if twisted_lollipop(base, v) == algebra.one:
            special += 1
    if singular:
        logger.info("uqsl2-n3: %d of %d sampled twists were singular", singular, search)
    table.expect(f"no_special_form/{search}_samples", 0, special)
    return table.done()


def taft_suite(rng: random.Random, samples: int = 25) -> List[SuiteCheck]:
    table = _Table("taft")
    base = uq.taft_form(3)
    zeros = [0] * base.dim
    for k in range(samples):
        F = twist(base, random_invertible(rng, base.algebra))
        table.expect(f"u{k:02d}/lollipop", base.algebra.zero, lollipop(F))
        table.expect(f"u{k:02d}/uloll", zeros, uloll(F))
    return table.done()


def k_twist_suite(rng: random.Random, orders: Sequence[int] = (2, 3, 4, 5)) -> List[SuiteCheck]:
    table = _Table("k-twist")
    for n in orders:
        table.expect(f"n{n}/gram_symmetric", True, uq.k_twisted_gram(n).is_symmetric())
    return table.done()


# Structure-generic suites ==========================================================


def reference_structures() -> Dict[str, FrobeniusStructure]:
    """One representative structure per family, in a fixed order."""
    G = s3()
    base = group_standard_form(G)
    special = s3_special_inverse_twist(base.algebra, Fraction(1, 6), 0, 0)
    n2 = uq.uqsl2_integral_form(2)
    taft = uq.taft_form(3)
    return {
        "matrix:2/diag(1,2)": matrix_frobenius(2, diagonal([1, 2])),
        "matrix:3/shear": matrix_frobenius(3, [[1, 1, 0], [0, 2, 0], [0, 0, -1]]),
        "blocks:1+1+2": semisimple_special_form((1, 1, 2)),
        "group:s3/special": group_twist(G, special.predicted, base),
        "group:s3/r": group_twist(G, base.algebra.basis_element("r"), base),
        "uqsl2:2/generic": twist(n2, uq.n2_element(uq.N2Parameters.of(2, 1, 1, 1, 1, 1, 1, 1))),
        "taft:3/twisted": twist(taft, taft.algebra.one + taft.algebra.basis_element("K") * 2 + taft.algebra.basis_element("F")),
        "blocks:1+2/twist": semisimple_block_twist((1, 2), [[[2]], [[1, 1], [0, 3]]]),
        "blocks:2+3/weak": weakly_symmetric_block_form((2, 3), (0,)),
    }


def large_reference_structures() -> Dict[str, FrobeniusStructure]:
    """The 27-dimensional u_q(sl2) structures at n = 3."""
    return {
        "uqsl2:3/K": uq.uqsl2_symmetric_form(3),
        "uqsl2:3/example": twist(uq.uqsl2_integral_form(3), uq.n3_example_twist_element()),
        "uqsl2:3/cartan(1,1,0)": uq.uqsl2_cartan_twist(1, 1, 0),
    }


def _structures(builtin: Optional[str], include_large: bool = True) -> Dict[str, FrobeniusStructure]:
    if builtin is None:
        structures = reference_structures()
        if include_large:
            structures.update(large_reference_structures())
        return structures
    return {builtin: resolve_builtin(builtin).structure}


def lemma_identity_suite(rng: random.Random, builtin: Optional[str] = None, include_large: bool = True) -> List[SuiteCheck]:
    table = _Table("lemma")
    structures = _structures(builtin, include_large)
    for name, F in structures.items():
        for check in lemma_suite(F, raise_on_failure=False):
            table.expect(f"{name}/{check.tag}", True, check.passed if check.passed else check.witness)
    if builtin is None:
        F = structures["matrix:2/diag(1,2)"]
        corrupted = list(F.eps)
        corrupted[0] = corrupted[0] + 1
        bad = FrobeniusStructure.from_parts(F.algebra, corrupted, F.gram, F.metric_matrix)
        failures = [c for c in lemma_suite(bad, raise_on_failure=False) if not c.passed]
        table.expect("corrupted_form/detected", True, bool(failures) and all(c.witness for c in failures))
    return table.done()


def spider_suite(
    rng: random.Random,
    builtin: Optional[str] = None,
    count: int = CONFIG.SPIDER_COUNT,
    bead_pairs: int = 50,
) -> List[SuiteCheck]:
    table = _Table("spider")
    if builtin is None:
        every = reference_structures()
        structures = {k: every[k] for k in ("matrix:2/diag(1,2)", "group:s3/special", "uqsl2:2/generic")}
    else:
        structures = _structures(builtin)
    for name, F in structures.items():
        report = run_spider(F, count=count, seed=rng.randint(0, 10 ** 6))
        witness = report.failures[0].diagram if report.failures else f"{report.passed}/{report.total}"
        table.expect(f"{name}/fuzz", f"{report.total}/{report.total}", witness)
        bead_ok = all(bead_additivity(F, rng.randint(0, 4), rng.randint(0, 4)) for _ in range(bead_pairs))
        table.expect(f"{name}/bead_additivity", True, bead_ok)
    return table.done()


def hilbert_suite(rng: random.Random, builtin: Optional[str] = None, include_large: bool = True) -> List[SuiteCheck]:
    """Closed forms reproduce dim_0 .. dim_10; quasispecial ones are lambda'/(1 - lambda x)."""
    table = _Table("hilbert")
    structures = _structures(builtin, include_large)
    terms = CONFIG.SERIES_CHECK_TERMS
    for name, F in structures.items():
        series = rational_closed_form(F)
        table.expect(f"{name}/expansion", hilbert_series(F, terms), series.expand(terms))
        kind = classify(F)
        if kind.quasispecial is not None:
            table.expect(f"{name}/quasispecial_series", RationalSeries.geometric(kind.counit_scale, kind.quasispecial), series)
    return table.done()


SuiteRunner = Callable[..., List[SuiteCheck]]

SUITES: Dict[str, SuiteRunner] = {
    "matrix": matrix_suite,
    "semisimple": semisimple_suite,
    "s3": s3_suite,
    "uqsl2-n2": uqsl2_n2_suite,
    "uqsl2-n3": uqsl2_n3_suite,
    "taft": taft_suite,
    "k-twist": k_twist_suite,
    "lemma": lemma_identity_suite,
    "spider": spider_suite,
    "hilbert": hilbert_suite,
}
"""Suites in the order `all` runs them."""

_TAKES_BUILTIN = {"lemma", "spider", "hilbert"}


def run_suites(name: str, seed: int = CONFIG.SPIDER_SEED, builtin: Optional[str] = None) -> List[SuiteCheck]:
    """
    Runs one named suite, or every suite for "all".

    Raises:
        UnknownBuiltin: For a suite name outside SUITES.
    """
    names = list(SUITES) if name == "all" else [name]
    checks: List[SuiteCheck] = []
    for suite in names:
        if suite not in SUITES:
            raise UnknownBuiltin(f"unknown suite {suite!r}; choose from {', '.join(SUITES)} or all")
        rng = random.Random(f"{seed}:{suite}")
        if suite in _TAKES_BUILTIN:
            checks.extend(SUITES[suite](rng, builtin=builtin))
        else:
            checks.extend(SUITES[suite](rng))
    return checks
