from superseq.spectral import class_parities, page_via_homology
from superseq.supercech import (
    U0,
    U01,
    U1,
    SheafModel,
    build_cech_complex,
    build_section_space,
    cech_realization,
    chart_exponents,
    graded_piece_cohomology,
    retract_graded,
    stabilization_check,
)

from oracles import line_bundle_h0, line_bundle_h1


def model_m2(window=2, coordinate_twists=(0, 0)):
    return SheafModel(coordinate_twists=coordinate_twists,
                      even_twists=(0,), odd_twists=(0,), window=window)


def line_bundle(k, window):
    """Rank 1|0 sheaf O(k) on the plain projective line."""
    return SheafModel(coordinate_twists=(), even_twists=(k,), odd_twists=(),
                      window=window)


class TestSectionSpaces:
    def test_full_space_dimension(self):
        basis = build_section_space(model_m2(), U0, 0)
        # 3 exponents x 4 subsets x 2 generators
        assert basis.dim == 24

    def test_deep_level_only_top_odd(self):
        basis = build_section_space(model_m2(), U0, 3)
        assert basis.dim == 3
        assert all(mask == 0b11 and g == 1 for (_, mask, g) in basis.keys)

    def test_level_beyond_top_is_zero(self):
        assert build_section_space(model_m2(), U0, 4).dim == 0

    def test_filtration_chain(self):
        model = model_m2()
        for chart in (U0, U1, U01):
            dims = [build_section_space(model, chart, p).dim
                    for p in range(model.p_max + 1)]
            assert dims[0] > 0 and dims[-1] == 0
            assert all(a >= b for a, b in zip(dims, dims[1:]))

    def test_chart_exponent_windows(self):
        model = SheafModel(coordinate_twists=(-1, -1), even_twists=(0,),
                           odd_twists=(0,), window=2)
        # the top even line has twist -2
        assert list(chart_exponents(model, U0, 0b11, 0)) == [0, 1, 2]
        assert list(chart_exponents(model, U1, 0b11, 0)) == [-4, -3, -2]
        assert list(chart_exponents(model, U01, 0b11, 0)) == [-4, -3, -2, -1, 0, 1, 2]


class TestRetract:
    def test_bottom_piece(self):
        data = retract_graded(model_m2())
        assert data.piece_dim(U0, 0) == 3

    def test_level_one_piece(self):
        data = retract_graded(model_m2())
        # x^k xi_i e (6) plus x^k f (3)
        assert data.piece_dim(U0, 1) == 9

    def test_reduced_ranks(self):
        data = retract_graded(model_m2())
        assert (data.reduced_even_rank, data.reduced_odd_rank) == (1, 1)

    def test_graded_sequence_dimension_identity(self):
        model = SheafModel(coordinate_twists=(-1, 2), even_twists=(1, 0),
                           odd_twists=(-2,), window=3)
        data = retract_graded(model)
        for chart in (U0, U1, U01):
            for level in range(model.p_max + 1):
                even_part = sum(
                    len(chart_exponents(model, chart, mask, g))
                    for g in range(model.generator_count)
                    if model.generator_parity(g) == 0
                    for mask in model.algebra.masks(level))
                odd_part = sum(
                    len(chart_exponents(model, chart, mask, g))
                    for g in range(model.generator_count)
                    if model.generator_parity(g) == 1
                    for mask in model.algebra.masks(level - 1)) if level >= 1 else 0
                assert data.piece_dim(chart, level) == even_part + odd_part


class TestCechComplex:
    def test_structure_sheaf_plain_line(self):
        complex_ = build_cech_complex(line_bundle(0, window=2))
        assert complex_.validate().ok
        coh = complex_.cohomology()
        assert (coh.dim(0), coh.dim(1)) == (1, 0)

    def test_degree_minus_two(self):
        complex_ = build_cech_complex(line_bundle(-2, window=2))
        coh = complex_.cohomology()
        assert (coh.dim(0), coh.dim(1)) == (0, 1)

    def test_line_bundle_sweep_matches_formula(self):
        for k in range(-5, 6):
            model = line_bundle(k, window=abs(k) + 1)
            coh = build_cech_complex(model).cohomology()
            assert coh.dim(0) == line_bundle_h0(k), k
            assert coh.dim(1) == line_bundle_h1(k), k

    def test_top_graded_piece_of_twisted_model(self):
        model = SheafModel(coordinate_twists=(-1, -1), even_twists=(0,),
                           odd_twists=(0,), window=2)
        assert graded_piece_cohomology(model, 2) == (0, 1)

    def test_built_complex_is_valid_with_parity(self):
        model = SheafModel(coordinate_twists=(-1, 1), even_twists=(0, 2),
                           odd_twists=(-1,), window=3)
        complex_ = build_cech_complex(model)
        assert complex_.validate().ok
        assert complex_.parity is not None

    def test_page0_matches_retract(self):
        model = SheafModel(coordinate_twists=(-1, -1), even_twists=(0,),
                           odd_twists=(0,), window=2)
        page0 = build_cech_complex(model).page(0)
        data = retract_graded(model)
        for p in range(model.p_max + 1):
            c0, c1 = data.cech_dims(p)
            assert page0.dim(p, -p) == c0
            assert page0.dim(p, 1 - p) == c1

    def test_split_model_degenerates_at_page_one(self):
        model = SheafModel(coordinate_twists=(-1, -1), even_twists=(0,),
                           odd_twists=(0,), window=2)
        complex_ = build_cech_complex(model)
        limit = complex_.infinity_page()
        assert complex_.page(1).dims() == limit.dims()
        coh = complex_.cohomology()
        for n in range(2):
            by_pieces = sum(graded_piece_cohomology(model, p)[n]
                            for p in range(model.p_max))
            assert coh.dim(n) == by_pieces

    def test_split_pieces_match_line_oracle(self):
        model = SheafModel(coordinate_twists=(-1, -1), even_twists=(0,),
                           odd_twists=(0,), window=2)
        for level in range(model.p_max):
            h0 = h1 = 0
            for g in range(model.generator_count):
                par = model.generator_parity(g)
                for mask in model.algebra.masks(level - par):
                    t = model.line_twist(mask, g)
                    h0 += line_bundle_h0(t)
                    h1 += line_bundle_h1(t)
            assert graded_piece_cohomology(model, level) == (h0, h1)

    def test_homology_route_on_built_complex(self):
        model = SheafModel(coordinate_twists=(-2,), even_twists=(1,),
                           odd_twists=(0,), window=3)
        complex_ = build_cech_complex(model)
        for r in range(model.p_max + 1):
            assert page_via_homology(complex_.page(r)).dims() == \
                complex_.page(r + 1).dims()

    def test_compare_graded_on_built_complex(self):
        model = SheafModel(coordinate_twists=(-1, 2), even_twists=(0, -1),
                           odd_twists=(1,), window=4)
        assert build_cech_complex(model).compare_graded().agree

    def test_page_differentials_reverse_parity(self):
        model = SheafModel(coordinate_twists=(-1, -1), even_twists=(0,),
                           odd_twists=(0,), window=2)
        complex_ = build_cech_complex(model)
        for r in range(complex_.p_max + 1):
            page = complex_.page(r)
            for (p, q), mat in page.differentials.items():
                target = page.entries.get((p + r, q - r + 1))
                if target is None or mat.is_zero():
                    continue
                src_par = class_parities(complex_, page.entries[(p, q)])
                tgt_par = class_parities(complex_, target)
                for i in range(mat.rows):
                    for j in range(mat.cols):
                        if mat.entries[i][j]:
                            assert tgt_par[i] != src_par[j]


class TestStabilization:
    def test_negative_twist_stable_immediately(self):
        assert stabilization_check(line_bundle(-2, window=1)).stable
        assert stabilization_check(line_bundle(-2, window=2)).stable

    def test_positive_twist_needs_window(self):
        report = stabilization_check(line_bundle(5, window=2))
        assert not report.stable
        assert "increase N" in str(report)
        assert stabilization_check(line_bundle(5, window=5)).stable

    def test_zero_sheaf_always_stable(self):
        empty = SheafModel(coordinate_twists=(0, 0), even_twists=(),
                           odd_twists=(), window=1)
        assert stabilization_check(empty).stable


class TestRealizationCoordinates:
    def test_encode_decode_round_trip(self):
        model = model_m2()
        real = cech_realization(model)
        s0 = model.monomial_section(1, 0b01, 0, 2)
        s1 = model.monomial_section(0, 0, 1, -3)
        vec = real.encode_zero_cochain(s0, s1)
        back0, back1 = real.decode_zero_cochain(vec)
        assert back0 == s0 and back1 == s1

    def test_one_cochain_round_trip(self):
        model = model_m2()
        real = cech_realization(model)
        s = model.monomial_section(-1, 0b11, 0, 5)
        assert real.decode_one_cochain(real.encode_one_cochain(s)) == s
