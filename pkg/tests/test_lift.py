import numpy as np
import pytest

from jacobilift import exact
from jacobilift.errors import DimensionError, DomainError
from jacobilift.forms import EisensteinSpec, ThetaForm, TruncationPolicy, theta_eval
from jacobilift.lift import (
    LiftSpec,
    gamma1_generators,
    identity_I_check,
    identity_II_check,
    lift_fP,
    lift_fP_fd,
    lift_ftau,
    main_theorem_check,
    random_gamma1_word,
)
from jacobilift.matgroup import SiegelPoint, siegel_action
from jacobilift.polyharm import QuadFormS, SparsePoly, pluriharmonic_basis

from oracles import cauchy_derivative, eisenstein_E4, ramanujan_delta

GENS = gamma1_generators()
Z0 = [[0.3 + 1.1j]]


@pytest.fixture(scope="module")
def theta2():
    return ThetaForm.e8(np.eye(8, 2, dtype=np.int64))


@pytest.fixture(scope="module")
def spec8(theta2):
    return LiftSpec.for_source(theta2, 8)


def test_liftspec_validation(theta_e8):
    with pytest.raises(DomainError):
        LiftSpec(theta_e8, pluriharmonic_basis(QuadFormS(exact.identity(1)), 1, 1))
    with pytest.raises(DimensionError):
        LiftSpec(theta_e8, pluriharmonic_basis(QuadFormS(exact.identity(2) / 2), 1, 1))
    spec = LiftSpec.for_source(theta_e8, 1)
    assert spec.k == 4 and len(spec.basis) == 1
    with pytest.raises(DomainError):
        lift_fP(spec, SparsePoly.var(1, 1, 0, 0) ** 2, Z0)


def test_degree0_lift_is_E4(theta_e8):
    spec = LiftSpec.for_source(theta_e8, 0)
    for z in (1j, 0.3 + 1.1j):
        assert abs(lift_fP(spec, spec.basis[0], [[z]]).value - eisenstein_E4(z)) < 1e-12


def test_termwise_derivative_matches_contour_oracle(theta_e8):
    spec = LiftSpec.for_source(theta_e8, 1)
    W = SparsePoly.var(1, 1, 0, 0)
    for d in (1, 2, 3, 4):
        got = lift_fP(spec, W ** d, Z0, check=False).value
        ref = cauchy_derivative(lambda w: complex(theta_eval(theta_e8, Z0, [[w]]).value), d,
                                radius=0.1, nodes=64)
        assert abs(got - ref) < 1e-9 * max(1.0, abs(ref)), d


def test_termwise_matches_central_difference(theta_e8):
    spec = LiftSpec.for_source(theta_e8, 1)
    P = SparsePoly.var(1, 1, 0, 0) ** 2
    a = lift_fP(spec, P, Z0, check=False).value
    assert abs(a - lift_fP_fd(spec, P, Z0, h=1e-4)) < 1e-6 * abs(a)


def test_odd_lifts_vanish(theta_e8, theta2):
    for f in (theta_e8, theta2):
        for d in (1, 3):
            spec = LiftSpec.for_source(f, d)
            for P in spec.basis:
                v = lift_fP(spec, P, Z0)
                assert abs(v.value) < 1e-12


def test_low_weight_lifts_vanish(theta2):
    # degrees 2..6 give weights 6..10, which carry no cusp forms
    for d in (2, 4):
        spec = LiftSpec.for_source(theta2, d)
        assert np.abs(lift_ftau(spec, Z0).array()).max() < 1e-8


def test_degree8_lift_is_weight12_modular(spec8):
    # two values fix the combination of E4^3 and Delta; check the prediction elsewhere
    P = max(spec8.basis, key=lambda Q: abs(lift_fP(spec8, Q, Z0).value))
    pts = [1j, 0.3 + 1.1j, -0.2 + 0.9j]
    vals = [lift_fP(spec8, P, [[z]]).value for z in pts]
    A = np.array([[eisenstein_E4(z) ** 3, ramanujan_delta(z)] for z in pts])
    coef = np.linalg.solve(A[:2], vals[:2])
    assert abs(vals[0]) > 1e3
    assert abs(A[2] @ coef - vals[2]) < 1e-9 * abs(vals[2])
    # lifts of pluriharmonic polynomials are cusp forms: no E4^3 component
    assert abs(coef[0]) < 1e-9 * abs(coef[1])


def test_main_theorem_degree8(spec8):
    assert len(spec8.basis) == 2 and spec8.k == 4
    for name, M in GENS.items():
        rep = main_theorem_check(spec8, M, Z0, 1e-6)
        assert rep.passed, (name, rep.summary())
    rep = main_theorem_check(spec8, GENS["S"], Z0, 1e-6, k=3)
    assert not rep.passed and rep.max_residual > 0.1


def test_main_theorem_degree0_and_negative_control(theta_e8):
    spec = LiftSpec.for_source(theta_e8, 0)
    rep = main_theorem_check(spec, GENS["S"], Z0, 1e-6)
    assert rep.passed
    assert not main_theorem_check(spec, GENS["S"], Z0, 1e-6, k=3).passed


def test_main_theorem_eisenstein_degree4():
    E = EisensteinSpec(8, exact.identity(2))
    spec = LiftSpec.for_source(E, 4, policy=TruncationPolicy(cmax=32, lmax=8))
    vals = lift_ftau(spec, Z0).array()
    assert np.abs(vals).max() > 1.0
    for M in GENS.values():
        rep = main_theorem_check(spec, M, Z0, 1e-4)
        assert rep.passed, rep.summary()


def test_lift_ftau_serializes(spec8):
    v = lift_ftau(spec8, Z0)
    d = v.to_dict()
    assert len(d["values"]) == 2 and set(d["values"][0]) == {"value", "tail_bound", "terms_used"}


def test_identity_I(theta_e8, theta2):
    W = SparsePoly.var(1, 1, 0, 0)
    for P in (SparsePoly.const(1, 1, 1), W):
        for M in GENS.values():
            assert identity_I_check(theta_e8, P, M, Z0).passed
    P = pluriharmonic_basis(QuadFormS(exact.identity(2) / 2), 2, 1)[0]
    assert identity_I_check(theta2, P, GENS["S"], Z0).passed
    with pytest.raises(DomainError):
        identity_I_check(theta_e8, W ** 2, GENS["S"], Z0)


def test_identity_II_reindex_and_direct():
    E = EisensteinSpec(8, [[1]])
    one = SparsePoly.const(1, 1, 1)
    pol = TruncationPolicy(cmax=16, lmax=10)
    for M in GENS.values():
        assert identity_II_check(E, one, M, Z0, pol).max_residual < 1e-12
        assert identity_II_check(E, one, M, Z0, pol, reindex=False).passed
    E2 = EisensteinSpec(8, exact.identity(2))
    P = pluriharmonic_basis(QuadFormS(exact.identity(2) / 2), 2, 1)[0]
    assert identity_II_check(E2, P, GENS["S"], Z0, TruncationPolicy(cmax=16, lmax=6)).passed


def test_random_words_stay_high(rng):
    for _ in range(20):
        word, g = random_gamma1_word(rng, Z0)
        assert 1 <= len(word) <= 3
        assert siegel_action(g, SiegelPoint(Z0)).y_min >= 0.4


def test_main_theorem_words_coherence(spec8, rng):
    # generator passes imply longer words pass at ten times the tolerance
    for _ in range(4):
        _, M = random_gamma1_word(rng, Z0, max_len=4)
        assert main_theorem_check(spec8, M, Z0, 1e-5).passed


def test_main_theorem_basis_independence(spec8):
    a, b = spec8.basis
    scrambled = LiftSpec(spec8.source, spec8.basis.with_basis([a + b.scale(2), a.scale(-3) + b]))
    r1 = main_theorem_check(spec8, GENS["S"], Z0, 1e-6)
    r2 = main_theorem_check(scrambled, GENS["S"], Z0, 1e-6)
    assert r1.passed and r2.passed
    assert not main_theorem_check(scrambled, GENS["S"], Z0, 1e-6, k=5).passed
