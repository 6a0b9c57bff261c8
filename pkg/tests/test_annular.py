import pytest

from annulus.annular import (
    AnnularError,
    GradedAlgebra,
    annular_stratum,
    attaching_map,
    bar_differential_squares_to_zero,
    bar_homology,
    composite_pinch,
    coskeletal_page,
    cotor_algebra,
    koszul_roundtrip,
    tangent_line,
    tensor_power_dims,
)
from annulus.coalgebra import (
    CotorObstruction,
    GradedCoalgebra,
    coideal,
    cotensor_power,
    cotor,
    curve_coalgebra,
    regular_cobimodule,
    trivial_comodule,
)
from annulus.coeffring import build_field, rank
from oracles import ideal_power_dims, tor_polynomial

F3 = build_field(3, 1)


def _indicator(n, n_prime, window):
    return {g: int(n <= g <= n_prime) for g in range(window)}


def _two_primitives(k):
    """k + V with V two-dimensional and primitive in degree 1: not a curve."""
    one = k.one
    delta = {0: ((0, 0, one),), 1: ((0, 1, one), (1, 0, one)), 2: ((0, 2, one), (2, 0, one))}
    C = GradedCoalgebra(k, ("1", "a", "b"), (0, 1, 1), delta, {0: one}, 0, 3)
    C.validate()
    return C


# --- strata ---------------------------------------------------------------------


def test_stratum_examples():
    C = curve_coalgebra(F3, 10)
    assert annular_stratum(C, 0, 9).dims == {g: 1 for g in range(10)}
    top = annular_stratum(C, 1, 9)
    assert top.dims == coideal(C).dims(10)
    four = annular_stratum(C, 4, 4)
    oracle = {g: a - b for (g, a), b in zip(ideal_power_dims(4, 10).items(), ideal_power_dims(5, 10).values())}
    assert four.dims == oracle == _indicator(4, 4, 10)
    assert four.bigraded_dims() == [[0, 4, 1]]


@pytest.mark.parametrize("p,d", [(2, 1), (3, 1), (2, 2)])
def test_strata_indicator_and_additivity(p, d):
    T = 8
    C = curve_coalgebra(build_field(p, d), T)
    dims = {}
    for n in range(T):
        for n1 in range(n, T):
            dims[(n, n1)] = annular_stratum(C, n, n1).dims
            assert dims[(n, n1)] == _indicator(n, n1, T)
    for n in range(T):
        for n1 in range(n, T):
            for n2 in range(n1 + 1, T):
                lhs = {g: dims[(n, n1)][g] + dims[(n1 + 1, n2)][g] for g in range(T)}
                assert lhs == dims[(n, n2)]


def test_strata_generators_are_reduced_classes():
    C = curve_coalgebra(F3, 6)
    gens = annular_stratum(C, 1, 5).generators
    assert gens == {g: [{f"b{g}~": 1}] for g in range(1, 6)}


def test_pinch_maps_are_surjective_in_window():
    C = curve_coalgebra(F3, 8)
    for n in range(4):
        for m in range(n, 6):
            mats = composite_pinch(C, n, m, 8)
            target = cotensor_power(C, m, 8).dims(8)
            assert all(rank(F3, mats[g]) == target[g] for g in range(8))


def test_stratum_errors():
    C = curve_coalgebra(F3, 5)
    with pytest.raises(AnnularError):
        annular_stratum(C, 3, 2)
    with pytest.raises(AnnularError):
        annular_stratum(C, 0, 5)
    with pytest.raises(AnnularError):
        annular_stratum(C, 0, 2, window=6)


# --- tangent line and multiplicativity --------------------------------------------------


def test_tangent_line_examples():
    small = tangent_line(curve_coalgebra(F3, 2))
    assert small.degree == 1 and small.generator == {"b1~": 1}
    big = tangent_line(curve_coalgebra(F3, 10))
    assert big.degree == 1 and big.dims == big.cotangent_oracle


def test_tangent_line_of_regraded_curve():
    C = curve_coalgebra(build_field(2, 1), 9, generator_degree=3)
    assert tangent_line(C).degree == 3


def test_multiplicativity_against_tensor_powers():
    T = 10
    C = curve_coalgebra(F3, T)
    line = tangent_line(C).dims
    for n in range(7):
        assert annular_stratum(C, n, n).dims == tensor_power_dims(line, n, T)


def test_non_curve_input_is_rejected():
    C = _two_primitives(F3)
    with pytest.raises((AnnularError, CotorObstruction)):
        tangent_line(C)
    with pytest.raises((AnnularError, CotorObstruction)):
        koszul_roundtrip(C)


# --- attaching data -------------------------------------------------------------------


def test_attaching_map_entries_on_curve():
    C = curve_coalgebra(F3, 6)
    am = attaching_map(C, 1, 2, 4)
    assert am.nonzero
    expected = sorted([g, f"b{g - h}", h, 1] for g in (3, 4) for h in (1, 2) if g - h >= 1)
    assert sorted(am.entries) == expected


def test_attaching_map_errors():
    C = curve_coalgebra(F3, 6)
    with pytest.raises(AnnularError):
        attaching_map(C, 1, 3, 3)


# --- coskeletal tower ----------------------------------------------------------------


def test_coskeletal_t0_column_is_cochain_dims():
    C = curve_coalgebra(F3, 8)
    M = coideal(C)
    page = coskeletal_page(M, C, M)
    tensor = {n: 0 for n in range(8)}
    for a in M.degrees:
        for b in M.degrees:
            if a + b < 8:
                tensor[a + b] += 1
    for s in page.s_range:
        if s % 2 == 0:
            assert page.values[(s, 0)] == tensor[s // 2]
        else:
            assert page.values[(s, 0)] == 0


def test_coskeletal_coideal_stabilizes_quickly():
    C = curve_coalgebra(F3, 8)
    M = coideal(C)
    page = coskeletal_page(M, C, M)
    assert page.balanced
    assert all(t0 <= 2 for t0 in page.stabilization.values())
    assert page.verdict(2)


def test_coskeletal_k_k_matches_exterior_answer():
    T = 8
    C = curve_coalgebra(F3, T)
    k = trivial_comodule(C)
    page = coskeletal_page(k, C, k)
    assert page.balanced
    oracle = tor_polynomial(T, 3)
    # the stable row values are the Cotor classes on the diagonal s = n
    assert page.stable_values == {s: oracle[(s, s)] for s in page.s_range}
    assert page.stable_values[0] == page.stable_values[1] == 1
    total = cotor(k, C, k, T)
    assert total.bigraded_dims() == [[0, 0, 1], [1, 1, 1]]


@pytest.mark.parametrize("j", [1, 2, 3])
def test_coskeletal_pro_constant_for_cotensor_powers(j):
    for T in range(1, 9):
        C = curve_coalgebra(F3, T)
        page = coskeletal_page(coideal(C), C, cotensor_power(C, j, T))
        assert page.balanced, T
        assert all(t0 <= 2 for t0 in page.stabilization.values()), (T, page.stabilization)


def test_coskeletal_regular_right_factor_indices_are_frozen():
    """Right factor C itself: the index grows with s inside the window (see decisions ledger)."""
    expected = {0: 0, 1: 0, 2: 0, 3: 0, 4: 1, 5: 2, 6: 3, 7: 4}
    C = curve_coalgebra(F3, 8)
    page = coskeletal_page(coideal(C), C, regular_cobimodule(C))
    assert page.balanced
    assert page.stabilization == expected


def test_coskeletal_errors():
    C = curve_coalgebra(F3, 4)
    M = coideal(C)
    with pytest.raises(AnnularError):
        coskeletal_page(M, C, M, t_range=[])
    with pytest.raises(AnnularError):
        coskeletal_page(M, C, M, s_range=[6], t_range=[6])


# --- Koszul round trip --------------------------------------------------------------------


def test_cotor_algebra_is_exterior():
    A = cotor_algebra(curve_coalgebra(F3, 6))
    assert len(A.bidegrees) == 2
    gen = next(i for i in range(2) if i != A.unit)
    assert A.bidegrees[gen] == (1, 1)
    assert not A.product(gen, gen)


def test_bar_homology_of_exterior_algebra():
    A = GradedAlgebra(F3, [(0, 0), (1, 1)], 0, {})
    assert bar_homology(A, 6) == {(s, s): 1 for s in range(6)}
    assert bar_differential_squares_to_zero(A, 6)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_koszul_round_trip_all_truncations(p):
    for T in range(2, 11):
        rep = koszul_roundtrip(curve_coalgebra(build_field(p, 1), T))
        assert rep.exterior and rep.split_shape and rep.round_trip, T
        assert sum(rep.cotor_dims.values()) == 2
