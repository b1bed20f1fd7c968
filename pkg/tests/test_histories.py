import numpy as np
import pytest

from prepost import (
    CVec,
    FailureMode,
    Family,
    History,
    Projector,
    State,
    UndefinedABL,
    UndefinedWeight,
    UnknownEigenvalue,
    abl_from_weak_values,
    abl_probability,
    abl_weight_agreement,
    as_observable,
    conditional_weight,
    consistency,
    history_weight,
    rank_one_vector,
    spectral_decompose,
    three_box,
    weak_value,
)
from prepost.errors import DimensionError

from conftest import (
    projector_containing,
    projector_orthogonal_to,
    random_hermitian,
    random_projector,
    random_state,
    random_state_pair,
)


def _three_box_family(obs_name="C"):
    sc = three_box()
    return sc, sc.family_for(obs_name)


def test_history_requires_matching_dimensions():
    d2 = Projector.identity(("a", "b"))
    d3 = Projector.identity(("x", "y", "z"))
    with pytest.raises(DimensionError):
        History(d2, d3, d2)


def test_family_requires_rank_one_endpoints():
    ident = Projector.identity(("a", "b", "c"))
    e = Projector.on_labels(("a", "b", "c"), ("a",))
    with pytest.raises(ValueError):
        Family.build(ident, e, ident)


def test_family_complement_partitions_identity():
    sc, fam = _three_box_family()
    total = fam.base.e.mat.entries + fam.complement.e.mat.entries
    assert np.allclose(total, np.eye(3))
    assert fam.d.rank == 1 and fam.f.rank == 1


def test_rank_one_vector_recovers_direction(rng):
    s = random_state(rng, 4)
    vec = rank_one_vector(Projector.onto(s))
    overlap = abs(np.vdot(vec.amps, s.vec.amps))
    assert overlap == pytest.approx(1.0, abs=1e-10)
    with pytest.raises(ValueError):
        rank_one_vector(Projector.identity(("a", "b")))


def test_box_c_family_is_inconsistent_and_strange():
    sc, fam = _three_box_family()
    report = consistency(fam)
    assert not report.consistent
    assert report.failure_mode is FailureMode.STRANGE
    assert report.functional == pytest.approx(-2.0 / 9.0, abs=1e-12)
    assert report.factor_overlap_sq == pytest.approx(1.0 / 9.0, abs=1e-12)
    assert report.factor_wv == pytest.approx(-1.0, abs=1e-12)
    assert report.factor_wv_conj == pytest.approx(2.0, abs=1e-12)


def test_event_absorbing_the_preselection_gives_consistency(rng):
    for dim in (2, 3, 4):
        pre, post = random_state_pair(rng, dim)
        e = projector_containing(rng, pre.vec)
        fam = Family.from_states(pre, e, post)
        report = consistency(fam)
        assert report.consistent
        assert report.failure_mode is FailureMode.NONE
        assert report.factor_wv == pytest.approx(1.0, abs=1e-9)


def test_event_orthogonal_to_the_preselection_gives_consistency(rng):
    pre, post = random_state_pair(rng, 4)
    e = projector_orthogonal_to(rng, pre.vec)
    report = consistency(Family.from_states(pre, e, post))
    assert report.consistent
    assert report.factor_wv == pytest.approx(0.0, abs=1e-9)


def test_repeated_endpoint_gives_unsharp_failure(rng):
    # d == f turns the functional into p(1-p) for p strictly inside (0, 1)
    pre = random_state(rng, 3)
    e = random_projector(rng, 3, rank=1)
    p = float(np.real(np.vdot(pre.vec.amps, e.mat.entries @ pre.vec.amps)))
    assert 0.0 < p < 1.0
    report = consistency(Family.from_states(pre, e, pre))
    assert not report.consistent
    assert report.failure_mode is FailureMode.UNSHARP
    assert report.functional == pytest.approx(p * (1 - p), abs=1e-10)


def test_orthogonal_endpoints_leave_factors_undefined():
    labels = ("a", "b")
    d = Projector.onto(CVec.basis_vector("a", labels))
    f = Projector.onto(CVec.basis_vector("b", labels))
    e = Projector.onto(CVec(np.array([1.0, 1.0]), labels))
    report = consistency(Family.build(d, e, f))
    assert report.factor_wv is None
    assert report.factor_wv_conj is None
    assert report.factor_overlap_sq == pytest.approx(0.0)
    assert report.functional == pytest.approx(-0.25, abs=1e-12)
    assert report.failure_mode is FailureMode.STRANGE


def test_trace_and_factored_forms_agree_on_random_families(rng):
    for _ in range(200):
        dim = int(rng.integers(2, 7))
        pre, post = random_state_pair(rng, dim)
        e = random_projector(rng, dim)
        report = consistency(Family.from_states(pre, e, post))
        factored = (
            report.factor_overlap_sq * report.factor_wv * report.factor_wv_conj
        )
        assert abs(factored - report.functional) <= 1e-10


def test_abl_probability_three_box():
    sc = three_box()
    obs = sc.observables["C"]
    assert abl_probability(obs, sc.pre, sc.post, 1.0) == pytest.approx(0.2, abs=1e-12)
    assert abl_probability(obs, sc.pre, sc.post, 0.0) == pytest.approx(0.8, abs=1e-12)


def test_abl_probability_identity_observable(rng):
    pre, post = random_state_pair(rng, 3)
    obs = as_observable(Projector.identity(pre.labels))
    assert abl_probability(obs, pre, post, 1.0) == pytest.approx(1.0)


def test_abl_probability_unknown_outcome():
    sc = three_box()
    with pytest.raises(UnknownEigenvalue):
        abl_probability(sc.observables["C"], sc.pre, sc.post, 2.0)


def test_abl_probability_normalizes_over_outcomes(rng):
    for _ in range(20):
        dim = int(rng.integers(2, 6))
        pre, post = random_state_pair(rng, dim)
        obs = spectral_decompose(random_hermitian(rng, dim))
        total = sum(
            abl_probability(obs, pre, post, lam) for lam in obs.eigenvalues
        )
        assert total == pytest.approx(1.0, abs=1e-10)


def test_abl_probability_undefined_when_no_route():
    labels = ("a", "b")
    pre = State(CVec.basis_vector("a", labels))
    post = State(CVec.basis_vector("b", labels))
    obs = as_observable(Projector.identity(labels))
    with pytest.raises(UndefinedABL):
        abl_probability(obs, pre, post, 1.0)


def test_abl_from_weak_values_fixed_points():
    assert abl_from_weak_values(-1.0) == pytest.approx(0.2, abs=1e-12)
    assert abl_from_weak_values(1.0) == pytest.approx(1.0, abs=1e-12)
    assert abl_from_weak_values(0.0) == pytest.approx(0.0, abs=1e-12)
    assert abl_from_weak_values(0.5) == pytest.approx(0.5, abs=1e-12)


def test_abl_from_weak_values_depends_only_on_moduli(rng):
    for _ in range(50):
        wv = complex(rng.standard_normal(), rng.standard_normal())
        assert abl_from_weak_values(wv) == pytest.approx(
            abl_from_weak_values(np.conj(wv)), abs=1e-14
        )


def test_abl_routes_agree_for_projector_outcomes(rng):
    for _ in range(100):
        dim = int(rng.integers(2, 6))
        pre, post = random_state_pair(rng, dim)
        p = random_projector(rng, dim)
        wv = weak_value(p, pre, post).value
        direct = abl_probability(as_observable(p), pre, post, 1.0)
        assert abl_from_weak_values(wv) == pytest.approx(direct, abs=1e-10)


def test_history_weight_identity_is_dimension():
    ident = Projector.identity(("a", "b", "c"))
    assert history_weight(History(ident, ident, ident)) == pytest.approx(3.0)


def test_history_weight_three_box_transition():
    sc = three_box()
    h = History(
        Projector.onto(sc.pre),
        sc.observables["C"].projector_for(1.0),
        Projector.onto(sc.post),
    )
    assert history_weight(h) == pytest.approx(1.0 / 9.0, abs=1e-12)


def test_history_weight_vanishes_for_blocked_event(rng):
    pre = random_state(rng, 4)
    e = projector_orthogonal_to(rng, pre.vec)
    f = Projector.onto(random_state(rng, 4))
    w = history_weight(History(Projector.onto(pre), e, f))
    assert w == pytest.approx(0.0, abs=1e-12)


def test_conditional_weight_three_box_is_unity():
    sc = three_box()
    for name in ("A", "B", "C"):
        fam = sc.family_for(name)
        assert conditional_weight(fam.e, fam.d, fam.f) == pytest.approx(
            1.0, abs=1e-12
        )


def test_conditional_weight_zero_weak_value(rng):
    pre, post = random_state_pair(rng, 4)
    e = projector_orthogonal_to(rng, pre.vec)
    w = conditional_weight(e, Projector.onto(pre), Projector.onto(post))
    assert w == pytest.approx(0.0, abs=1e-10)


def test_conditional_weight_requires_overlapping_endpoints():
    labels = ("a", "b")
    d = Projector.onto(CVec.basis_vector("a", labels))
    f = Projector.onto(CVec.basis_vector("b", labels))
    e = Projector.identity(labels)
    with pytest.raises(UndefinedWeight):
        conditional_weight(e, d, f)


def test_conditional_weight_accepts_higher_rank_endpoints():
    labels = ("a", "b")
    ident = Projector.identity(labels)
    e = Projector.onto(CVec.basis_vector("a", labels))
    assert conditional_weight(e, ident, ident) == pytest.approx(0.5)


def test_conditional_weight_is_squared_weak_value(rng):
    for _ in range(100):
        dim = int(rng.integers(2, 7))
        pre, post = random_state_pair(rng, dim)
        e = random_projector(rng, dim)
        wv = weak_value(e, pre, post).value
        w = conditional_weight(e, Projector.onto(pre), Projector.onto(post))
        assert w == pytest.approx(abs(wv) ** 2, abs=1e-10)


def test_abl_weight_agreement_on_consistent_family(rng):
    pre, post = random_state_pair(rng, 4)
    fam = Family.from_states(pre, projector_containing(rng, pre.vec), post)
    assert abl_weight_agreement(fam)


def test_abl_weight_disagreement_on_box_c():
    sc, fam = _three_box_family()
    assert not abl_weight_agreement(fam)
