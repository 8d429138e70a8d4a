import random

import pytest

from superseq.grassmann import (
    AlgebraDerivation,
    AlgebraMorphism,
    GrassmannAlgebra,
    multiply_masks,
)


def random_element(alg, rng, max_terms=4):
    out = alg.zero()
    for _ in range(rng.randint(0, max_terms)):
        out = out + alg.monomial(rng.randint(-2, 2),
                                 rng.choice(alg.masks()),
                                 rng.randint(-3, 3))
    return out


class TestProducts:
    def test_generators_anticommute(self):
        alg = GrassmannAlgebra(3)
        for i in range(1, 4):
            for j in range(1, 4):
                lhs = alg.xi(i) * alg.xi(j)
                rhs = (alg.xi(j) * alg.xi(i)).scale(-1)
                assert lhs == rhs

    def test_generators_square_to_zero(self):
        alg = GrassmannAlgebra(2)
        assert (alg.xi(1) * alg.xi(1)).is_zero()
        top = alg.xi(1) * alg.xi(2)
        assert (top * top).is_zero()

    def test_ordered_product_has_positive_sign(self):
        assert multiply_masks(0b001, 0b010) == (1, 0b011)
        assert multiply_masks(0b010, 0b001) == (-1, 0b011)
        assert multiply_masks(0b011, 0b100) == (1, 0b111)
        assert multiply_masks(0b110, 0b001) == (1, 0b111)
        assert multiply_masks(0b101, 0b010) == (-1, 0b111)

    def test_product_associative(self):
        alg = GrassmannAlgebra(3)
        rng = random.Random(12)
        for _ in range(30):
            a, b, c = (random_element(alg, rng) for _ in range(3))
            assert (a * b) * c == a * (b * c)

    def test_laurent_exponents_add(self):
        alg = GrassmannAlgebra(1)
        assert alg.x(-2) * alg.x(3) == alg.x(1)

    def test_inverse_of_unit(self):
        alg = GrassmannAlgebra(2)
        u = alg.monomial(1, 0, 2) + alg.monomial(-1, 0b11, 5)
        v = u.inverse()
        assert u * v == alg.one()
        assert v * u == alg.one()

    def test_inverse_rejects_non_unit(self):
        alg = GrassmannAlgebra(1)
        with pytest.raises(ValueError):
            (alg.one() + alg.x()).inverse()

    def test_negative_power_via_inverse(self):
        alg = GrassmannAlgebra(1)
        assert alg.x().power(-3) == alg.x(-3)


class TestDerivations:
    def test_leibniz_on_random_pairs(self):
        alg = GrassmannAlgebra(3)
        rng = random.Random(21)
        d = AlgebraDerivation(
            alg,
            image_x=alg.monomial(2, 0b011),
            image_xi=(alg.monomial(0, 0b111), alg.zero(), alg.monomial(-1, 0b100)))
        for _ in range(40):
            f = random_element(alg, rng)
            g = random_element(alg, rng)
            assert d.apply(f * g) == d.apply(f) * g + f * d.apply(g)

    def test_power_rule_on_laurent_monomials(self):
        alg = GrassmannAlgebra(1)
        d = AlgebraDerivation(alg, image_x=alg.one())  # d/dx
        assert d.apply(alg.x(3)) == alg.x(2).scale(3)
        assert d.apply(alg.x(-2)) == alg.x(-3).scale(-2)

    def test_degree_shift_bound(self):
        alg = GrassmannAlgebra(3)
        d = AlgebraDerivation(alg, image_x=alg.monomial(0, 0b011),
                              image_xi=(alg.monomial(0, 0b111), alg.zero(), alg.zero()))
        assert d.odd_degree_shift() == 2


class TestMorphisms:
    def test_identity(self):
        alg = GrassmannAlgebra(2)
        ident = AlgebraMorphism.identity(alg)
        rng = random.Random(3)
        for _ in range(10):
            el = random_element(alg, rng)
            assert ident.apply(el) == el

    def test_multiplicative_on_random_pairs(self):
        alg = GrassmannAlgebra(2)
        rng = random.Random(9)
        phi = AlgebraMorphism(
            alg,
            alg.x() + alg.monomial(-1, 0b11),
            (alg.xi(1), alg.xi(2) + alg.monomial(0, 0b11).scale(0)))
        for _ in range(30):
            f = random_element(alg, rng)
            g = random_element(alg, rng)
            assert phi.apply(f * g) == phi.apply(f) * phi.apply(g)

    def test_negative_exponent_consistency(self):
        # phi(x) phi(1/x) must be 1
        alg = GrassmannAlgebra(2)
        phi = AlgebraMorphism(alg, alg.x() + alg.monomial(-2, 0b11),
                              (alg.xi(1), alg.xi(2)))
        assert phi.apply(alg.x()) * phi.apply(alg.x(-1)) == alg.one()

    def test_compose(self):
        alg = GrassmannAlgebra(2)
        phi = AlgebraMorphism(alg, alg.x() + alg.monomial(0, 0b11),
                              (alg.xi(1), alg.xi(2)))
        rng = random.Random(4)
        for _ in range(10):
            el = random_element(alg, rng)
            assert phi.compose(phi).apply(el) == phi.apply(phi.apply(el))

    def test_deviation_shift(self):
        alg = GrassmannAlgebra(2)
        phi = AlgebraMorphism(alg, alg.x() + alg.monomial(0, 0b11),
                              (alg.xi(1), alg.xi(2)))
        assert phi.deviation_shift() == 2
        assert AlgebraMorphism.identity(alg).deviation_shift() is None
