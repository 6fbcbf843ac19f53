import itertools
import math
from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nesslab import girardeau as gd
from nesslab.exact import Exact
from nesslab.lattice import BoxSpec, LatticeMomentum, snap_velocity


def pi2(x: Fraction) -> Exact:
    return Exact.pi_power(2, x)


def brute_spectrum(N, L, window, j=0):
    """Independent oracle: every N-subset, energies as pi**2 coefficients."""
    L = Fraction(L)
    h = (N - 1) // 2
    g = sum(Fraction(2 * n * n) / L ** 2 for n in range(-h, h + 1))
    out = Counter()
    for occ in itertools.combinations(range(-window, window + 1), N):
        kin = sum(Fraction(2 * n * n) / L ** 2 for n in occ) - g
        P = sum(occ)
        boost = Fraction(4 * j * P) / L ** 2
        out[(pi2(kin + boost), P)] += 1
    return out


@pytest.mark.parametrize(
    "N, L, expected",
    [(1, 1, Exact()), (3, 3, pi2(Fraction(4, 9))), (5, 5, pi2(Fraction(4, 5)))],
)
def test_ground_state_energy(N, L, expected):
    assert gd.ground_state_energy(gd.GirardeauParams(N, L)) == expected


@pytest.mark.parametrize("N, L", [(3, 3), (5, 7), (7, 2), (9, Fraction(9, 2))])
def test_ground_state_matches_fermi_sea(N, L):
    params = gd.GirardeauParams(N, L)
    sea = sum((LatticeMomentum((n,), L).kinetic() for n in params.ground_indices()), Exact())
    assert gd.ground_state_energy(params) == sea


def test_params_validation():
    with pytest.raises(ValueError):
        gd.GirardeauParams(4, 4)
    with pytest.raises(ValueError):
        gd.GirardeauParams(3, 3, "bogus")
    p = gd.GirardeauParams(3, 3)
    assert p.kf == Exact.pi_power(1, Fraction(2, 3))
    assert gd.GirardeauParams(3, 3, "limit").kf == Exact.pi_power(1)


def test_eps1_examples():
    p = gd.GirardeauParams(3, 3)
    assert gd.eps1(1, p) == pi2(Fraction(2, 3))
    with pytest.raises(ValueError):
        gd.eps1(0, p)
    # rho = 1/2 with the limiting k_F = pi/2: k = pi gives pi^2/2 + pi^2/2
    q = gd.GirardeauParams(5, 10, "limit")
    assert gd.eps1(5, q) == pi2(Fraction(1))


def test_eps2_examples():
    p = gd.GirardeauParams(3, 3)
    assert gd.eps2(gd.UmklappMove(1, 0), p) == pi2(Fraction(2, 3))
    mv = gd.UmklappMove(2, 1)
    assert mv.momentum_index(p) == gd.UmklappMove(1, 0).momentum_index(p) == -3
    assert gd.eps2(mv, p) == pi2(Fraction(2, 9)) * 9
    with pytest.raises(ValueError):
        gd.eps2(gd.UmklappMove(1, 3), p)
    with pytest.raises(ValueError):
        gd.UmklappMove(0, 0)


@given(st.integers(0, 10).map(lambda k: 2 * k + 1), st.integers(1, 8), st.integers(0, 20))
def test_excitation_energies_non_negative(N, p, q):
    params = gd.GirardeauParams(N, N)
    assert gd.eps1(p, params) >= 0 and gd.eps1(-p, params) >= 0
    if q <= N - 1:
        for s in ("type2", "type3"):
            assert gd.eps2(gd.UmklappMove(p, q, s), params) >= 0


def test_oracle_small_examples():
    p = gd.GirardeauParams(3, 3)
    pts = gd.oracle_spectrum(p, None, 10, 30)
    table = {pt.content[1]: pt for pt in pts}
    assert table[(-1, 0, 1)].energy == 0 and table[(-1, 0, 1)].momentum.coords == (0,)
    assert table[(-1, 0, 2)].energy == pi2(Fraction(2, 3))
    assert table[(-1, 0, 2)].momentum.coords == (1,)
    umk = table[(-2, -1, 0)]
    assert umk.momentum.scalar == pytest.approx(-2 * math.pi)
    assert umk.momentum.coords[0] == -(p.kf2 + 1)


def test_oracle_rejects_small_window():
    with pytest.raises(ValueError):
        gd.oracle_spectrum(gd.GirardeauParams(7, 7), None, 2, 10)


@pytest.mark.parametrize("N, L, window, j", [(3, 3, 5, 0), (3, 3, 5, 2), (5, 5, 5, -1), (5, 4, 6, 1)])
def test_oracle_matches_brute_force(N, L, window, j):
    params = gd.GirardeauParams(N, L)
    v = LatticeMomentum((j,), L)
    pts = gd.oracle_spectrum(params, v, window, math.inf)
    got = Counter((p.energy, p.momentum.coords[0]) for p in pts)
    assert got == brute_spectrum(N, L, window, j)


def test_oracle_sorted_by_rest_energy():
    pts = gd.oracle_spectrum(gd.GirardeauParams(5, 5), LatticeMomentum((1,), 5), 7, 40)
    rests = [p.rest_energy for p in pts]
    assert all(a <= b for a, b in zip(rests, rests[1:]))


def test_oracle_independent_of_workers():
    params = gd.GirardeauParams(5, 5)
    a = gd.oracle_spectrum(params, None, 8, 30, jobs=1)
    b = gd.oracle_spectrum(params, None, 8, 30, jobs=3)
    assert a == b


def test_oracle_cap_respected():
    params = gd.GirardeauParams(5, 5)
    cap = pi2(Fraction(2))
    pts = gd.oracle_spectrum(params, None, 8, cap)
    assert all(p.rest_energy <= cap for p in pts)
    full = gd.oracle_spectrum(params, None, 8, math.inf)
    assert len(pts) == sum(1 for p in full if p.rest_energy <= cap)


def test_composite_examples():
    p = gd.GirardeauParams(5, 5)
    pt = gd.composite_point([], [gd.UmklappMove(1, 0)], None, p)
    assert pt.energy == gd.eps2(gd.UmklappMove(1, 0), p)
    assert pt.momentum.coords == (-(p.kf2 + 1),)
    k = LatticeMomentum((2,), 5)
    pt = gd.composite_point([k], [], None, p)
    assert (pt.energy, pt.momentum.coords) == (gd.eps1(k, p), (2,))
    pair = gd.composite_point([k, -k], [], None, p)
    assert pair.energy == 2 * gd.eps1(k, p) and pair.momentum.coords == (0,)
    with pytest.raises(ValueError):
        gd.composite_point([], [], None, p)
    with pytest.raises(ValueError):
        gd.composite_point([1] * 6, [], None, p)


def test_pair_composite_matches_oracle():
    # moving k_F -> k_F + k and -k_F -> -k_F - k is a genuine eigenstate
    p = gd.GirardeauParams(5, 5)
    pair = gd.composite_point([1, -1], [], None, p)
    assert pair.exact
    occ = gd.apply_moves(p, [1, -1])
    assert gd.configuration_point(occ, p).energy == pair.energy


def test_velocity_must_be_snapped():
    p = gd.GirardeauParams(3, 3)
    with pytest.raises(TypeError):
        gd.umklapp_cascade(1, 0.7, p)
    with pytest.raises(ValueError):
        gd.umklapp_cascade(1, LatticeMomentum((1,), 4), p)


def test_cascade_examples():
    p = gd.GirardeauParams(101, 101)
    assert gd.umklapp_cascade(0, None, p).energy == 0
    v = LatticeMomentum((8,), 101)
    one = gd.umklapp_cascade(1, v, p)
    assert one.energy == gd.eps2(gd.UmklappMove(1, 0), p) + v.dot(one.momentum)
    assert one.momentum.coords == (-(2 * 50 + 1),)
    with pytest.raises(ValueError):
        gd.umklapp_cascade(102, v, p)


@pytest.mark.parametrize("N", [3, 5, 7, 9])
def test_cascade_matches_switching_configuration(N):
    p = gd.GirardeauParams(N, N)
    v = LatticeMomentum((1,), N)
    for m in range(0, N + 1):
        occ = gd.cascade_configuration(m, p)
        assert occ is not None
        assert gd.configuration_point(occ, p, v).energy == gd.umklapp_cascade(m, v, p).energy


def test_printed_cascade_form_differs_by_kinetic_term():
    p = gd.GirardeauParams(11, 11)
    v = LatticeMomentum((2,), 11)
    for m in range(5):
        diff = gd.umklapp_cascade(m, v, p).energy - gd.cascade_energy_closed_form(m, v, p)
        assert diff == pi2(Fraction(2 * m, 121))


def test_cascade_minimizer_examples():
    p = gd.GirardeauParams(101, 101)
    res = gd.cascade_minimizer(LatticeMomentum((8,), 101), p)
    assert abs(res.m - 8) <= 1 and res.in_window
    assert res.energy == -LatticeMomentum((8,), 101).kinetic() * 101
    small = gd.cascade_minimizer(LatticeMomentum((1,), 101), p)
    assert small.m in (0, 1)
    rest = gd.cascade_minimizer(None, p)
    assert (rest.m, rest.energy, rest.in_window) == (0, 0, False)


@settings(max_examples=30, deadline=None)
@given(st.integers(3, 40).map(lambda k: 2 * k + 1), st.data())
def test_cascade_minimizer_near_floor(N, data):
    p = gd.GirardeauParams(N, N)
    j = data.draw(st.integers(1, N - 1))
    res = gd.cascade_minimizer(LatticeMomentum((j,), N), p)
    assert abs(res.m - j) <= 1


def test_cascade_gap():
    p = gd.GirardeauParams(101, 101)
    v = LatticeMomentum((8,), 101)
    gap = gd.cascade_gap(1, v, p)
    target = -2 * float(p.kf) * v.scalar
    # the leftover is the quadratic ladder term 3 * 2 pi^2 rho / L
    assert abs(float(gap) - target) < 3 * 2 * math.pi ** 2 / 101 + 0.05
    assert gd.cascade_gap(1, None, p) > 0
    # second difference is constant: the ladder is quadratic in m
    g = [gd.cascade_gap(m, v, p) for m in range(1, 6)]
    assert len({b - a for a, b in zip(g, g[1:])}) == 1
    with pytest.raises(ValueError):
        gd.cascade_gap(101, v, p)


def test_cascade_gap_error_scales_as_inverse_length():
    errs, Ls = [], []
    for N in (51, 101, 201, 401):
        p = gd.GirardeauParams(N, N)
        v = snap_velocity(0.5, BoxSpec.from_side(N))
        gap = gd.cascade_gap(1, v, p)
        errs.append(abs(float(gap) + 2 * float(p.kf) * v.value[0]))
        Ls.append(N)
    slope = math.log(errs[-1] / errs[0]) / math.log(Ls[-1] / Ls[0])
    assert slope <= -1 + 1e-6


@pytest.mark.parametrize("N", [3, 5, 7])
def test_closed_forms_are_oracle_points(N):
    p = gd.GirardeauParams(N, N)
    v = LatticeMomentum((1,), N)
    oracle = {(q.energy, q.momentum.coords) for q in gd.oracle_spectrum(p, v, 10, 30)}
    for pt in gd.closed_form_points(p, v, 10, 30):
        assert (pt.energy, pt.momentum.coords) in oracle


@pytest.mark.parametrize("N", [3, 5, 7])
def test_boosted_minimum_is_translated_sea(N):
    p = gd.GirardeauParams(N, N)
    for j in range(-3, 4):
        v = LatticeMomentum((j,), N)
        low = gd.oracle_minimum(p, v, 10)
        assert low.energy == -v.kinetic() * N
        assert low.content[1] == tuple(n - j for n in p.ground_indices())


def test_restricted_excitations_non_negative_at_rest():
    p = gd.GirardeauParams(11, 11)
    c, d = Exact.pi_power(2, 2), Exact.pi_power(1)
    pts = gd.restricted_excitations(p, None, c, d, 3)
    assert pts and all(q.energy >= 0 for q in pts)
    assert all(q.rest_energy <= c and abs(q.momentum.coords[0]) * Fraction(2, 11) <= 1 for q in pts)
    assert all(q.content[0] == "type1" and len(q.content[1]) <= 3 for q in pts)


def test_restricted_single_excitation_positive_below_pi():
    # |v| up to pi*rho minus a lattice spacing keeps every single excitation positive
    for N in (11, 21, 41):
        p = gd.GirardeauParams(N, N)
        c, d = Exact.pi_power(2, 2), Exact.pi_power(1)
        for j in range(0, (N - 1) // 2):
            v = LatticeMomentum((j,), N)
            assert all(q.energy >= 0 for q in gd.restricted_excitations(p, v, c, d, 1))


def test_restricted_excludes_expensive_k():
    p = gd.GirardeauParams(11, 11)
    c = gd.eps1(2, p)
    pts = gd.restricted_excitations(p, None, c, Exact.pi_power(1, 10), 1)
    assert {q.content[1] for q in pts} == {(-2,), (-1,), (1,), (2,)}
