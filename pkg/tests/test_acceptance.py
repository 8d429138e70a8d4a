"""Acceptance suite: one test per criterion, each printing a verdict line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines.
All tolerances are zero: every comparison is exact rational arithmetic.
"""

import math
import random
import time

import pytest

from superseq.deformation import (
    QuasiAutomorphism,
    QuasiDerivation,
    cocycle_order,
    degree_symbol,
    exponential,
    logarithm,
    normalize_cocycle,
    verify_degeneracy,
)
from superseq.spectral import page_via_homology
from superseq.supercech import (
    SheafModel,
    build_cech_complex,
    retract_graded,
    stabilization_check,
)

from factories import (
    random_filtered_complex,
    random_nilpotent_derivation,
    sheaf_model_zoo,
)
from oracles import betti_number, line_bundle_h0, line_bundle_h1

CORPUS_SIZE = 100


@pytest.fixture(scope="module")
def corpus():
    rng = random.Random(20240801)
    complexes = [random_filtered_complex(rng, max_dim=6, max_n=4, max_p=4)
                 for _ in range(CORPUS_SIZE)]
    for c in complexes:
        assert c.validate().ok
    return complexes


@pytest.fixture(scope="module")
def zoo():
    return sheaf_model_zoo()


def fixture_model(window=2):
    return SheafModel(coordinate_twists=(-1, -1), even_twists=(0,),
                      odd_twists=(0,), window=window)


def order_two_cocycle(model):
    images = [model.monomial_section(-1, 0b11, g)
              for g in range(model.generator_count)]
    return exponential(QuasiDerivation(model, images))


def test_criterion_1_two_route_page_consistency(corpus):
    start = time.monotonic()
    for complex_ in corpus:
        for r in range(complex_.p_max + 1):
            direct = complex_.page(r + 1).dims()
            homological = page_via_homology(complex_.page(r)).dims()
            assert direct == homological
    elapsed = time.monotonic() - start
    assert elapsed < 30.0, f"corpus run took {elapsed:.1f}s"
    print(f"\ncriterion 1 PASS: {len(corpus)} random complexes, every page "
          f"matches its homology recomputation ({elapsed:.1f}s)")


def test_criterion_2_limit_page_bookkeeping(corpus):
    for complex_ in corpus:
        limit = complex_.infinity_page()
        totals = limit.total_dims()
        for n in range(complex_.n_max + 1):
            independent = betti_number(
                [list(row) for row in complex_.differential(n).entries],
                complex_.dim(n),
                [list(row) for row in complex_.differential(n - 1).entries],
                complex_.dim(n - 1))
            assert totals.get(n, 0) == independent, f"degree {n}"
        complex_.compare_graded()
    print(f"\ncriterion 2 PASS: limit page totals equal independently "
          f"eliminated cohomology on {len(corpus)} complexes, exactly")


def test_criterion_3_graded_identification_and_odd_pages(zoo):
    assert len(zoo) >= 10
    assert {len(m.coordinate_twists) for m in zoo} == {1, 2}
    for model in zoo:
        complex_ = build_cech_complex(model)
        page0 = complex_.page(0)
        data = retract_graded(model)
        for p in range(model.p_max + 1):
            c0, c1 = data.cech_dims(p)
            assert page0.dim(p, -p) == c0, (model, p)
            assert page0.dim(p, 1 - p) == c1, (model, p)
        for r in range(1, complex_.p_max + 1, 2):
            page = complex_.page(r)
            assert all(mat.is_zero() for mat in page.differentials.values()), \
                (model, r)
    print(f"\ncriterion 3 PASS: page 0 equals the graded Cech groups and "
          f"odd-page differentials vanish on {len(zoo)} models")


def test_criterion_4_split_degeneration(zoo):
    for model in zoo:
        assert stabilization_check(model).stable, model
        complex_ = build_cech_complex(model)
        limit = complex_.infinity_page()
        assert complex_.page(1).dims() == limit.dims(), model
        coh = complex_.cohomology()
        for k in range(2):
            by_lines = 0
            for g in range(model.generator_count):
                for mask in model.algebra.masks():
                    t = model.line_twist(mask, g)
                    by_lines += line_bundle_h0(t) if k == 0 else line_bundle_h1(t)
            assert coh.dim(k) == by_lines, (model, k)
    print(f"\ncriterion 4 PASS: split models degenerate at page 1 and their "
          f"cohomology matches the line-by-line count on {len(zoo)} models")


def test_criterion_5_classical_line_bundles():
    for k in range(-5, 6):
        model = SheafModel(coordinate_twists=(), even_twists=(k,),
                           odd_twists=(), window=abs(k) + 1)
        coh = build_cech_complex(model).cohomology()
        assert coh.dim(0) == line_bundle_h0(k), k
        assert coh.dim(1) == line_bundle_h1(k), k
    print("\ncriterion 5 PASS: line bundle cohomology matches "
          "max(k+1,0) / max(-k-1,0) for k in [-5, 5], exactly")


def test_criterion_6_exp_log_and_symbol_calculus():
    model = fixture_model()
    rng = random.Random(6021023)
    count = 0
    while count < 50:
        derivation = random_nilpotent_derivation(model, rng)
        assert logarithm(exponential(derivation)) == derivation
        count += 1
    for _ in range(20):
        a = exponential(random_nilpotent_derivation(model, rng))
        b = exponential(random_nilpotent_derivation(model, rng))
        assert degree_symbol(a.compose(b), 2) == \
            degree_symbol(a, 2).add(degree_symbol(b, 2))
        if degree_symbol(a, 2).is_zero():
            assert a.is_identity()
    # deeper deviations have vanishing symbol: needs a third odd coordinate
    deep_model = SheafModel(coordinate_twists=(0, 0, 0), even_twists=(0,),
                            odd_twists=(0,), window=2)
    images = [deep_model.monomial_section(1, 0b111, 1), deep_model.zero_section()]
    deep = exponential(QuasiDerivation(deep_model, images))
    assert degree_symbol(deep, 2).is_zero()
    print("\ncriterion 6 PASS: 50 exact exp/log round trips; symbol additive "
          "with the expected kernel")


def test_criterion_7_degeneracy_theorem():
    start = time.monotonic()
    model = fixture_model()

    obstructed = model.with_cocycle(order_two_cocycle(model))
    assert cocycle_order(obstructed) == 2
    report = verify_degeneracy(obstructed)
    assert report.order == 2
    assert report.vanishing.get(1) is True
    assert report.symbol_checks and all(c.ok for c in report.symbol_checks)
    assert any(not c.page_matrix.is_zero() for c in report.symbol_checks)
    assert report.passed

    images = [model.monomial_section(1, 0b11, 0), model.zero_section()]
    normalizable = model.with_cocycle(exponential(QuasiDerivation(model, images)))
    order, normalized = normalize_cocycle(normalizable)
    assert order == math.inf and normalized.is_identity()
    split_report = verify_degeneracy(normalizable)
    assert split_report.passed and all(split_report.vanishing.values())

    tampered = verify_degeneracy(
        obstructed,
        symbol_override=degree_symbol(obstructed.cocycle, 2).scale(2))
    assert not tampered.passed
    assert any("symbol action" in line for line in tampered.failures())

    elapsed = time.monotonic() - start
    assert elapsed < 10.0, f"theorem verification took {elapsed:.1f}s"
    print(f"\ncriterion 7 PASS: order 2 fixture matches its symbol action, "
          f"normalizable fixture degenerates, tamper fails ({elapsed:.1f}s)")


def test_criterion_8_twisted_differential():
    from superseq.grassmann import AlgebraDerivation

    model = fixture_model()
    field_model = SheafModel(coordinate_twists=(-2, -2), even_twists=(2,),
                             odd_twists=(), window=3)
    field_only = exponential(QuasiDerivation(
        field_model, [field_model.zero_section()],
        AlgebraDerivation(field_model.algebra,
                          field_model.algebra.monomial(-1, 0b11))))
    fixtures = [
        (model, QuasiAutomorphism.identity(model)),
        (model, order_two_cocycle(model)),
        (model, exponential(QuasiDerivation(
            model, [model.monomial_section(1, 0b11, 0),
                    model.zero_section()]))),
        (field_model, field_only),
    ]
    for base, cocycle in fixtures:
        twisted = base.with_cocycle(cocycle)
        complex_ = build_cech_complex(twisted)
        assert (complex_.differential(1) @ complex_.differential(0)).is_zero()
        assert complex_.validate().ok  # filtration preservation and parity
    with_id = build_cech_complex(model.with_cocycle(
        QuasiAutomorphism.identity(model)))
    untwisted = build_cech_complex(model)
    assert with_id == untwisted
    print("\ncriterion 8 PASS: twisted coboundaries square to zero, preserve "
          "the filtration, and the identity cocycle reproduces the split "
          "complex bit for bit")
