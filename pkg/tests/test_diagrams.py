from fractions import Fraction

import pytest

from app.services.diagrams import (
    Diagram,
    Generator,
    StandardForm,
    bead_additivity,
    bounded_faces,
    canonical_form,
    connectivity,
    evaluate,
    incidence_graph,
    lemma_suite,
    parse_diagram,
    random_connected_diagram,
    run_spider,
    spider_check,
    standard_diagram,
)
from app.services.errors import (
    EmptyDiagram,
    IdentityFailed,
    InterfaceMismatch,
    NotConnected,
    ParseError,
    WidthExceeded,
)
from app.services.frobenius import FrobeniusStructure, fdim

GENUS_TWO = "cap; comul,id; id,mul; cup"


def test_parse_and_print():
    d = parse_diagram(GENUS_TWO)
    assert d.slices[1] == (Generator.COMUL, Generator.ID)
    assert d.to_text() == GENUS_TWO
    assert d.widths() == [0, 2, 3, 2, 0]
    assert d.generator_count() == 4
    assert d.generator_count(include_identity=True) == 6


@pytest.mark.parametrize("text, position", [("", 0), ("mul; foo", 5), ("mul,,id", 4), ("comul; id, twist", 11)])
def test_parse_errors(text, position):
    with pytest.raises(ParseError) as info:
        parse_diagram(text)
    assert info.value.position == position


def test_interface_mismatch():
    with pytest.raises(InterfaceMismatch) as info:
        parse_diagram("mul; mul")
    assert (info.value.slice_index, info.value.expected, info.value.got) == (1, 1, 2)


def test_faces_of_a_closed_diagram():
    d = parse_diagram(GENUS_TWO)
    graph = incidence_graph(d)
    assert graph.number_of_nodes() == 6
    assert graph.number_of_edges() == 7
    assert bounded_faces(d) == 2
    assert canonical_form(d) == StandardForm(0, 0, 2)


def test_disconnected_and_empty_diagrams():
    d = parse_diagram("id,id")
    assert connectivity(d) == 2
    with pytest.raises(NotConnected):
        canonical_form(d)
    with pytest.raises(EmptyDiagram):
        canonical_form(Diagram(()))


@pytest.mark.parametrize(
    "form, text",
    [
        (StandardForm(2, 3, 1), "mul; comul; mul; comul; id,comul"),
        (StandardForm(0, 0, 0), "unit; counit"),
        (StandardForm(1, 1, 0), "id"),
        (StandardForm(0, 2, 2), "unit; comul; mul; comul; mul; comul"),
    ],
)
def test_standard_diagrams(form, text):
    d = standard_diagram(form)
    assert d.to_text() == text
    assert canonical_form(d) == form


def test_standard_form_rejects_negative_parameters():
    with pytest.raises(ValueError):
        StandardForm(-1, 0, 0)


def test_closed_diagrams_evaluate_to_dimensions(m2_diag):
    circle = evaluate(parse_diagram("cap; cup"), m2_diag)
    assert circle.scalar_value() == fdim(m2_diag, 1) == Fraction(9, 2)
    assert evaluate(parse_diagram("unit; counit"), m2_diag).scalar_value() == 3
    genus_two = evaluate(parse_diagram(GENUS_TWO), m2_diag)
    assert genus_two.scalar_value() == fdim(m2_diag, 2)


def test_width_cap(m2_diag):
    with pytest.raises(WidthExceeded) as info:
        evaluate(parse_diagram("cap,cap"), m2_diag, max_width=3)
    assert (info.value.width, info.value.limit) == (4, 3)


def test_lemma_suite_on_asymmetric_structures(m2_diag, s3_special):
    for F in (m2_diag, s3_special):
        checks = lemma_suite(F)
        assert all(c.passed for c in checks)
    tags = {c.tag: c for c in lemma_suite(s3_special)}
    assert tags["special"].passed


def test_lemma_suite_detects_a_corrupted_form(m2_diag):
    eps = list(m2_diag.eps)
    eps[0] = eps[0] + 1
    corrupted = FrobeniusStructure.from_parts(m2_diag.algebra, eps, m2_diag.gram, m2_diag.metric_matrix)
    checks = lemma_suite(corrupted, raise_on_failure=False)
    assert not all(c.passed for c in checks)
    with pytest.raises(IdentityFailed):
        lemma_suite(corrupted)


def test_random_diagrams_are_reproducible():
    first = random_connected_diagram(42, 6, 3)
    assert first == random_connected_diagram(42, 6, 3)
    assert connectivity(first) == 1
    assert 1 <= first.generator_count() <= 6
    assert max(first.widths()) <= 3
    with pytest.raises(ValueError):
        random_connected_diagram(0, 0, 3)


def test_spider_on_a_small_sample(m2_diag):
    report = run_spider(m2_diag, count=20, seed=1, max_generators=5, max_width=3)
    assert report.total == 20
    assert report.ok
    assert report.failures == []


def test_spider_check_on_genus_two(s3_special):
    ok, form, lhs, rhs = spider_check(parse_diagram(GENUS_TWO), s3_special, max_width=3)
    assert ok and form == StandardForm(0, 0, 2)
    assert lhs == rhs


def test_bead_additivity(m2_diag, n2_generic):
    assert bead_additivity(m2_diag, 1, 2, max_width=3)
    assert bead_additivity(n2_generic, 2, 1, max_width=3)


@pytest.mark.slow
def test_full_spider_run(s3_special):
    assert run_spider(s3_special, count=200, seed=0, max_width=3).ok
