import random

import pytest

from app.services import uqsl2 as uq
from app.services.diagrams import lemma_suite
from app.services.errors import UnknownBuiltin
from app.services.suites import (
    SUITES,
    hilbert_suite,
    k_twist_suite,
    lemma_identity_suite,
    run_suites,
    semisimple_suite,
    spider_suite,
    uqsl2_n3_suite,
)


def failures(checks):
    return [(c.id, c.expected, c.actual) for c in checks if not c.passed]


@pytest.mark.parametrize("suite", ["matrix", "semisimple", "s3", "uqsl2-n2", "taft"])
def test_fast_suites_pass(suite):
    checks = run_suites(suite, seed=0)
    assert checks
    assert failures(checks) == []
    assert all(c.id.startswith(f"{suite}/") for c in checks)


def test_k_twist_suite_small_orders():
    checks = k_twist_suite(random.Random(0), orders=(2, 3))
    assert [c.id for c in checks] == ["k-twist/n2/gram_symmetric", "k-twist/n3/gram_symmetric"]
    assert failures(checks) == []


@pytest.mark.parametrize("builtin", ["matrix:2", "group:s3", "taft:3"])
def test_lemma_suite_on_builtins(builtin):
    assert failures(run_suites("lemma", builtin=builtin)) == []


def test_hilbert_suite_on_a_builtin():
    checks = run_suites("hilbert", builtin="blocks:1+2")
    assert [c.id for c in checks] == ["hilbert/blocks:1+2/expansion", "hilbert/blocks:1+2/quasispecial_series"]
    assert failures(checks) == []


def test_suites_are_reproducible():
    first = run_suites("taft", seed=7)
    assert first == run_suites("taft", seed=7)


def test_unknown_suite():
    with pytest.raises(UnknownBuiltin):
        run_suites("nope")


def test_all_covers_every_suite():
    assert list(SUITES) == [
        "matrix",
        "semisimple",
        "s3",
        "uqsl2-n2",
        "uqsl2-n3",
        "taft",
        "k-twist",
        "lemma",
        "spider",
        "hilbert",
    ]


@pytest.mark.slow
@pytest.mark.parametrize("suite", ["uqsl2-n3", "k-twist", "lemma", "spider", "hilbert"])
def test_heavy_suites_pass(suite):
    assert failures(run_suites(suite, seed=0)) == []


def test_semisimple_strata_include_traceful_outside_blocks():
    checks = {c.id: c for c in semisimple_suite(random.Random(0), samples=1)}
    for tag in ("fdim", "series", "weakly_symmetric"):
        assert checks[f"semisimple/stratum3/{tag}"].passed


@pytest.mark.parametrize("seed", [0, 11])
def test_uqsl2_n3_suite_bounded_run(seed):
    checks = uqsl2_n3_suite(random.Random(seed), samples=2, search=5)
    ids = [c.id for c in checks]
    assert "uqsl2-n3/cartan0/eps_top" in ids
    assert "uqsl2-n3/cartan0/dim0" in ids
    assert "uqsl2-n3/grading1/lollipop" in ids
    assert "uqsl2-n3/inverse_lemma1/cartan_part" in ids
    assert failures(checks) == []


def test_structure_suites_bounded_run():
    rng = random.Random(0)
    lemma = lemma_identity_suite(rng, include_large=False)
    assert any(c.id.startswith("lemma/blocks:1+2/twist/") for c in lemma)
    assert any(c.id.startswith("lemma/blocks:2+3/weak/") for c in lemma)
    assert failures(lemma) == []
    hilbert = hilbert_suite(rng, include_large=False)
    assert "hilbert/blocks:2+3/weak/expansion" in [c.id for c in hilbert]
    assert failures(hilbert) == []
    assert failures(spider_suite(rng, count=5, bead_pairs=3)) == []


@pytest.mark.slow
@pytest.mark.parametrize("make", [uq.uqsl2_symmetric_form, lambda n: uq.uqsl2_cartan_twist(1, 1, 0)], ids=["K", "cartan"])
def test_local_identities_at_n3(make):
    assert [c.tag for c in lemma_suite(make(3), raise_on_failure=False) if not c.passed] == []
