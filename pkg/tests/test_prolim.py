import json
import random

import pytest

from annulus.coalgebra import curve_coalgebra
from annulus.coeffring import SparseMatrix, build_field
from annulus.prolim import (
    ComoduleTower,
    TowerError,
    VectorTower,
    cobar_derived_limits,
    derived_limit,
    derived_limits,
    e2_assembly,
    extend_tower,
    extended_comodule,
    extension_commutes,
    is_mittag_leffler,
    milnor_sequence,
    random_vector_tower,
    tower_from_json,
    tower_limit,
    tower_to_json,
    two_term,
)
from oracles import brute_force_limits

F2 = build_field(2, 1)
F3 = build_field(3, 1)


def _corank_one_tower(k):
    """k^4 <- k^3 <- k^2 <- k^1, each map the standard inclusion (all in degree 0)."""
    levels = tuple((0,) * r for r in (4, 3, 2, 1))
    maps = tuple(SparseMatrix(len(levels[a]), len(levels[a + 1]), [{i: 1} if i < len(levels[a + 1]) else {}
                                                                      for i in range(len(levels[a]))])
                 for a in range(3))
    return VectorTower(k, levels, maps, "constant")


def _constant(k, degrees):
    ident = SparseMatrix(len(degrees), len(degrees), [{i: 1} for i in range(len(degrees))])
    return VectorTower(k, (degrees, degrees, degrees), (ident, ident), "constant")


def _zero_maps(k, degrees, tail="zero"):
    z = SparseMatrix(len(degrees), len(degrees))
    return VectorTower(k, (degrees, degrees, degrees), (z, z), tail)


def _dense(f: SparseMatrix) -> list:
    return [[f.rows[i].get(j, 0) for j in range(f.ncols)] for i in range(f.nrows)]


# --- limits ----------------------------------------------------------------------------------


def test_constant_tower():
    V = _constant(F3, (0, 1, 1))
    assert tower_limit(V).dims == {0: 1, 1: 2}
    ml = is_mittag_leffler(V)
    assert all(ml.holds.values()) and set(ml.offsets.values()) == {0}
    assert derived_limit(V, 0) == {0: 1, 1: 2}
    assert derived_limit(V, 1) == {0: 0, 1: 0} == derived_limit(V, 3)


def test_zero_maps_tower():
    V = _zero_maps(F3, (0, 0))
    assert tower_limit(V).dims == {0: 0}
    assert derived_limit(V, 1) == {0: 0}
    ml = is_mittag_leffler(V)
    assert ml.holds == {0: True} and ml.offsets == {0: 1}


def test_corank_one_tower():
    V = _corank_one_tower(F3)
    V.validate()
    lim = tower_limit(V)
    assert lim.dims == {0: 1} and lim.stable_image == {0: 1}
    ml = is_mittag_leffler(V)
    assert ml.holds == {0: True} and ml.offsets == {0: 3} and ml.offsets[0] <= V.length


@pytest.mark.parametrize("tail", ["constant", "zero"])
def test_limits_match_brute_force_enumeration(tail):
    rng = random.Random(42 if tail == "constant" else 43)
    for _ in range(25):
        V = random_vector_tower(F2, rng, rng.randint(1, 3), max_degree=1, max_dim=2, tail=tail)
        lim, lim1 = brute_force_limits([list(lv) for lv in V.levels], [_dense(f) for f in V.maps], tail, 2)
        window = V.top_degree() + 1
        assert {n: d for n, d in tower_limit(V, window).dims.items() if n in lim} == lim
        tt = two_term(V, window)
        assert {n: tt.r0[n] for n in lim} == lim
        assert {n: tt.r1[n] for n in lim1} == lim1


@pytest.mark.parametrize("tail", ["constant", "zero"])
def test_milnor_sequence_exact(tail):
    rng = random.Random(7)
    for _ in range(20):
        V = random_vector_tower(F3, rng, rng.randint(1, 4), tail=tail)
        mc = milnor_sequence(V)
        assert all(mc.exact.values())
        assert all(v == 0 for v in mc.lim1.values())
        for n in mc.lim:
            assert mc.lim[n] - mc.prod0[n] + mc.prod1[n] - mc.lim1[n] == 0


def test_mittag_leffler_offsets_bounded_by_length():
    rng = random.Random(3)
    for _ in range(20):
        V = random_vector_tower(F3, rng, rng.randint(1, 4))
        ml = is_mittag_leffler(V)
        assert all(ml.holds.values())
        assert all(o <= V.length + 1 for o in ml.offsets.values())


def test_derived_limit_errors():
    V = _constant(F3, (0,))
    with pytest.raises(TowerError):
        derived_limit(V, -1)
    with pytest.raises(TowerError):
        derived_limit(V, 0, route="other")


def test_tower_validation():
    bad_shape = VectorTower(F3, ((0,), (0, 0)), (SparseMatrix(1, 1),))
    with pytest.raises(TowerError):
        bad_shape.validate()
    bad_degree = VectorTower(F3, ((0,), (1,)), (SparseMatrix(1, 1, [{0: 1}]),))
    with pytest.raises(TowerError):
        bad_degree.validate()
    with pytest.raises(TowerError):
        VectorTower(F3, ((0,),), (), "sideways").validate()


# --- extended comodules ---------------------------------------------------------------------------


def test_extend_constant_line_is_constant_curve():
    C = curve_coalgebra(F3, 6)
    E = extend_tower(_constant(F3, (0,)), C)
    E.validate()
    for M in E.levels:
        assert M.dims(6) == {n: 1 for n in range(6)}
    assert tower_limit(E).dims == {n: 1 for n in range(6)}


def test_extended_comodule_is_valid():
    C = curve_coalgebra(F3, 5)
    M = extended_comodule(C, (0, 1, 1))
    M.validate()
    assert M.dims(5) == {0: 1, 1: 3, 2: 3, 3: 3, 4: 3}


def test_extension_commutes_with_limits():
    C = curve_coalgebra(F3, 6)
    rng = random.Random(6)
    for tail in ("constant", "zero"):
        V = random_vector_tower(F3, rng, 4, max_degree=2, tail=tail)
        lhs, rhs = extension_commutes(V, C)
        assert lhs == rhs


def test_comodule_tower_rejects_non_comodule_maps():
    C = curve_coalgebra(F3, 3)
    a, b = extended_comodule(C, (0,)), extended_comodule(C, (0,))
    # sends the degree-0 generator of the top onto the degree-0 generator but kills b_1|0: not C-linear
    f = SparseMatrix(len(a), len(b), [{0: 1}, {}, {}])
    with pytest.raises(TowerError):
        ComoduleTower(C, (a, b), (f,)).validate()


@pytest.mark.parametrize("seed", range(20))
def test_flasque_extended_towers_and_route_agreement(seed):
    rng = random.Random(seed)
    C = curve_coalgebra(F2 if seed % 2 else F3, 5)
    V = random_vector_tower(C.field, rng, rng.randint(1, 3), max_degree=2, tail=rng.choice(["constant", "zero"]))
    E = extend_tower(V, C)
    E.validate()
    cob = cobar_derived_limits(E)
    assert cob.stable
    two = derived_limits(E, route="two-term")
    via_cobar = derived_limits(E, route="cobar")
    for n in range(5):
        assert via_cobar[(0, n)] == two[(0, n)] == tower_limit(E).dims[n]
    assert all(d == 0 for (s, n), d in via_cobar.items() if s >= 1)
    assert all(d == 0 for (s, n), d in two.items() if s >= 1)


def test_e2_assembly_on_extended_tower():
    C = curve_coalgebra(F3, 5)
    V = random_vector_tower(F3, random.Random(9), 3, max_degree=2)
    E = extend_tower(V, C)
    e2 = e2_assembly(E)
    lim = tower_limit(V, 5).dims
    # Cotor^0(k, C (x) V_a) = V_a and higher Cotor vanishes, so E2 is the plain limit in filtration 0
    for n in range(5):
        assert e2[(0, 0, n)] == lim[n]
        assert e2[(1, 0, n)] == 0
    assert all(d == 0 for (s, t, n), d in e2.items() if t >= 1 or s >= 1)


# --- serialization ---------------------------------------------------------------------------------


def test_json_round_trip():
    V = random_vector_tower(F3, random.Random(1), 3, tail="zero")
    obj = json.loads(json.dumps(tower_to_json(V)))
    back = tower_from_json(obj)
    assert back.levels == V.levels and back.tail == "zero"
    assert [_dense(f) for f in back.maps] == [_dense(f) for f in V.maps]
    assert tower_limit(back).dims == tower_limit(V).dims
