from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nesslab import girardeau as gd
from nesslab import hyl
from nesslab.exact import Exact
from nesslab.lattice import LatticeMomentum
from nesslab.metastability import (
    SubspaceSpec,
    Verdict,
    excitation_count,
    filter_cd,
    filter_depletion,
    fit_inverse_size,
    landau_vc,
    ness_witness,
    girardeau_window_spec,
    superfluid_verdict,
)
from nesslab.points import EigenPoint


def free_dispersion(side, window):
    pts = []
    for n in range(-window, window + 1):
        if n:
            k = LatticeMomentum((n,), side)
            pts.append(EigenPoint(k.kinetic(), k, ("free", n), k.kinetic()))
    return pts


# -- landau_vc -------------------------------------------------------------

def test_landau_free_gas():
    assert landau_vc(free_dispersion(100, 20)) == Exact.pi_power(1, Fraction(1, 100))
    values = [float(landau_vc(free_dispersion(L, 5))) for L in (10, 100, 1000)]
    assert values == sorted(values, reverse=True) and values[-1] < 1e-2


def test_landau_girardeau_unit_density():
    p = gd.GirardeauParams(101, 101)
    pts = [
        EigenPoint(gd.eps1(n, p), LatticeMomentum((n,), 101), ("type1", n))
        for n in range(-30, 31) if n
    ]
    # k_F + pi/L with the finite-size k_F = pi (N - 1)/L
    assert landau_vc(pts) == Exact.pi_power(1)


def test_landau_single_point_and_errors():
    assert landau_vc([EigenPoint(2.0, (1.0,), ("x",))]) == 2.0
    assert landau_vc([EigenPoint(-2.0, (1.0,), ("x",))]) == 0.0
    with pytest.raises(ValueError):
        landau_vc([])
    with pytest.raises(ValueError):
        landau_vc([EigenPoint(1.0, (0.0,), ("x",))])


@given(st.fractions(Fraction(1, 50), 50), st.integers(2, 40))
def test_landau_scale_covariance(s, side):
    pts = free_dispersion(side, 4)
    scaled = [EigenPoint(p.energy * s, p.momentum, p.content) for p in pts]
    assert landau_vc(scaled) == landau_vc(pts) * s


# -- filters ---------------------------------------------------------------

def girardeau_cloud(N=21):
    p = gd.GirardeauParams(N, N)
    return gd.closed_form_points(p, None, (N - 1) // 2 + 4, 40, max_cascade=3)


def test_filter_identity_without_caps():
    pts = girardeau_cloud()
    assert filter_cd(pts, SubspaceSpec()) == pts


def test_filter_removes_umklapp():
    pts = girardeau_cloud()
    assert any(p.content[0] == "cascade" for p in pts)
    kept = filter_cd(pts, girardeau_window_spec(1, 3))
    assert kept and not any(p.content[0] == "cascade" for p in kept)


caps = st.one_of(st.none(), st.fractions(Fraction(1, 4), 40))


@settings(max_examples=60, deadline=None)
@given(caps, caps, st.one_of(st.none(), st.integers(1, 4)), st.fractions(Fraction(1, 2), 1), st.fractions(Fraction(1, 2), 1))
def test_filter_cd_monotone_and_idempotent(c, d, r, sc, sd):
    pts = girardeau_cloud(11)
    spec = SubspaceSpec(c, d, r)
    kept = filter_cd(pts, spec)
    assert filter_cd(kept, spec) == kept
    stricter = SubspaceSpec(None if c is None else c * sc, None if d is None else d * sd, r)
    assert set(filter_cd(pts, stricter)) <= set(kept)


def test_filter_cd_excitation_count():
    p = gd.GirardeauParams(11, 11)
    pts = gd.restricted_excitations(p, None, Exact.pi_power(2, 8), Exact.pi_power(1, 2), 3)
    assert {excitation_count(q) for q in filter_cd(pts, SubspaceSpec(r=2))} == {1, 2}


def test_filter_depletion_examples():
    p = hyl.HylParams(100, 100, 1, 1)
    pts = hyl.two_mode_points(p, LatticeMomentum((16,), 100))
    everything = filter_depletion(pts, SubspaceSpec(rho_max=Fraction(3, 2)), 100)
    assert everything == pts
    kept = filter_depletion(pts, SubspaceSpec(rho_max=Fraction(1, 4)), 100)
    assert max(q.depletion for q in kept) == 25


def test_filter_depletion_window_leaves_non_negative_energies():
    p = hyl.HylParams(100, 100, 1, 1)
    v = LatticeMomentum((16,), 100)
    cap = hyl.rho_max(p, v)
    assert cap.valid
    pts = hyl.two_mode_points(p, v)
    kept = filter_depletion(pts, SubspaceSpec(rho_max=cap.value), p.volume)
    assert kept and all(q.energy >= 0 for q in kept)
    assert any(q.energy < 0 for q in pts)


@given(st.fractions(Fraction(1, 100), 2), st.fractions(Fraction(1, 100), 2))
def test_filter_depletion_monotone_and_idempotent(a, b):
    p = hyl.HylParams(40, 40, 1, 1)
    pts = hyl.two_mode_points(p, LatticeMomentum((3,), 40))
    lo, hi = sorted((a, b))
    small = filter_depletion(pts, SubspaceSpec(rho_max=lo), 40)
    big = filter_depletion(pts, SubspaceSpec(rho_max=hi), 40)
    assert set(small) <= set(big)
    assert filter_depletion(big, SubspaceSpec(rho_max=hi), 40) == big


def test_filter_depletion_needs_cap():
    with pytest.raises(ValueError):
        filter_depletion([], SubspaceSpec(), 10)


def test_spec_validation():
    with pytest.raises(ValueError):
        SubspaceSpec(c=0)
    with pytest.raises(ValueError):
        SubspaceSpec(r=0)
    spec = girardeau_window_spec(1)
    assert spec.c == Exact.pi_power(2, 2) and spec.d == Exact.pi_power(1) and spec.r == 3


# -- witnesses -------------------------------------------------------------

def test_no_witness_for_non_negative_spectrum():
    assert ness_witness(girardeau_cloud()) is None
    assert ness_witness([]) is None


def test_girardeau_cascade_witness():
    p = gd.GirardeauParams(101, 101)
    v = LatticeMomentum((8,), 101)
    single = ness_witness([gd.umklapp_cascade(1, v, p)])
    target = -2 * float(p.kf) * v.scalar
    assert single is not None and abs(float(single.energy) - target) < 1.0
    ladder = [gd.umklapp_cascade(m, v, p) for m in range(0, 102)]
    best = ness_witness(ladder)
    assert best.energy == -v.kinetic() * 101


def test_hyl_witness_at_full_transfer():
    p = hyl.HylParams(100, 100, 1, 1)
    v = LatticeMomentum((16,), 100)
    w = ness_witness(hyl.two_mode_points(p, v))
    assert w.content == ("two_mode", 100)
    assert w.energy == -v.kinetic() * 100


def test_witness_threshold_for_floats():
    noisy = [EigenPoint(-1e-13, (1.0,), ("a",)), EigenPoint(0.5, (1.0,), ("b",))]
    assert ness_witness(noisy) is None
    assert ness_witness(noisy[:1] + [EigenPoint(-1e-6, (1.0,), ("c",))], scale=1.0).content == ("c",)
    assert ness_witness([EigenPoint(-1e-6, (1.0,), ("c",))], scale=1e4) is None
    exact_tiny = EigenPoint(Exact.rational(Fraction(-1, 10 ** 30)), (1.0,), ("d",))
    assert ness_witness([exact_tiny]) is exact_tiny


# -- verdicts ---------------------------------------------------------------

def synthetic(sizes, levels):
    """Clouds with E = eps + c/L for each (eps, c, rest) level."""
    out = []
    for L in sizes:
        pts = [
            EigenPoint(eps + c / L, (1.0,), ("lvl", i), rest)
            for i, (eps, c, rest) in enumerate(levels)
        ]
        out.append((L, pts))
    return out


def test_fit_inverse_size_exact():
    eps, c = fit_inverse_size([1, 2, 4, 8], [3 + 5 / L for L in (1, 2, 4, 8)])
    assert eps == pytest.approx(3) and c == pytest.approx(5)


def test_verdict_superfluid_and_trivial():
    v = superfluid_verdict(synthetic([10, 20, 40], [(1.0, 2.0, 1.0), (0.0, 1.0, 2.0)]), SubspaceSpec(), 0.5)
    assert v.is_superfluid and not v.is_ness and v.empirical_vc == 0.5
    assert v.extrapolated["lvl:0"] == pytest.approx(1.0)
    flat = superfluid_verdict(synthetic([10, 20, 40], [(0.0, 0.0, 1.0)]), SubspaceSpec(), 0.5)
    assert not flat.is_superfluid and not flat.nontrivial


def test_verdict_negative_level():
    v = superfluid_verdict(synthetic([10, 20, 40], [(1.0, 0.0, 1.0), (-0.5, 1.0, 1.0)]), SubspaceSpec(), 1.0)
    assert not v.is_superfluid and v.is_ness and v.empirical_vc == 0.0
    assert v.witness.content == ("lvl", 1)
    capped = superfluid_verdict(
        synthetic([10, 20, 40], [(1.0, 0.0, 1.0), (-0.5, 1.0, 3.0)]), SubspaceSpec(c=2), 1.0
    )
    assert capped.is_superfluid and capped.is_ness


def test_verdict_requires_three_sizes():
    with pytest.raises(ValueError):
        superfluid_verdict(synthetic([10, 20], [(1.0, 0.0, 1.0)]), SubspaceSpec(), 1.0)


def test_verdict_invariants():
    with pytest.raises(ValueError):
        Verdict("m", 1.0, True, False, 0.0)
    with pytest.raises(ValueError):
        Verdict("m", 1.0, False, False, -1.0)


def test_verdict_vc_from_scan():
    v = superfluid_verdict(
        synthetic([10, 20, 40], [(1.0, 0.0, 1.0)]), SubspaceSpec(), 1.0, vc_scan={0.5: True, 1.0: True, 2.0: False}
    )
    assert v.empirical_vc == 1.0


level = st.tuples(
    st.floats(-2, 2, allow_nan=False), st.floats(-3, 3, allow_nan=False), st.integers(1, 10)
)


@settings(max_examples=80, deadline=None)
@given(st.lists(level, min_size=1, max_size=6), st.integers(1, 10))
def test_verdict_consistent_under_stricter_spec(levels, c_cap):
    sizes = synthetic([8, 16, 32, 64], [(e, c, Fraction(r)) for e, c, r in levels])
    loose = superfluid_verdict(sizes, SubspaceSpec(), 1.0)
    strict = superfluid_verdict(sizes, SubspaceSpec(c=c_cap), 1.0)
    if loose.is_superfluid and strict.nontrivial:
        assert strict.is_superfluid
