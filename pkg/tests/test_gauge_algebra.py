import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from errors import (ConfigError, DomainError, InvalidElementError,
                    SingularInvariantError, UnknownPresetError)
from gauge_algebra import (FIELDS, AffineGaugeElement, CoefficientVector,
                           Family, GaugeElement, InvariantVector, Preset,
                           act_on_coefficients, action_matrix,
                           affine_from_gauge, affine_inverse, affine_matrix,
                           classify, closure_coefficients, compose,
                           compose_affine, embed_linear, family_f1,
                           family_f3, family_f5, galilei_invariant,
                           identify_preset, in_r_family, intertwine,
                           invariants, inverse, is_restricted, linear_gauge,
                           matrix_rep, orbit_dimension, preset,
                           property_suite, r_family,
                           time_translation_invariant)
from timefn import PhaseField, TimeFn

TIMES = np.linspace(0.0, 1.0, 5)

gammas = st.floats(-5, 5, allow_nan=False)
lams = st.one_of(st.floats(0.1, 10), st.floats(-10, -0.1))
positive_lams = st.floats(0.2, 5)
thetas = st.lists(st.floats(-3, 3, allow_nan=False), max_size=3)
coefs = st.floats(-2, 2, allow_nan=False)
nu1s = st.one_of(st.floats(0.1, 2), st.floats(-2, -0.1))


@st.composite
def elements(draw, theta=True, lam=lams):
    return GaugeElement(draw(gammas), draw(lam),
                        draw(thetas) if theta else None)


@st.composite
def coefficient_vectors(draw):
    return CoefficientVector(draw(nu1s), *[draw(coefs) for _ in FIELDS[1:]])


def values(g, x=np.array([-1.0, 0.5, 2.0])):
    return np.concatenate([g.gamma(TIMES), g.lam(TIMES),
                           np.ravel([g.theta(x, t) for t in TIMES])])


def linear_free():
    return embed_linear(-0.5, 1.0)


# ----------------------------------------------------------------------
# group
# ----------------------------------------------------------------------
@given(elements(), elements(), elements())
def test_composition_is_associative(a, b, c):
    assert_allclose(values(compose(compose(a, b), c)),
                    values(compose(a, compose(b, c))),
                    rtol=1e-12, atol=1e-12)


@given(elements())
def test_inverse_law(a):
    ident = values(GaugeElement.identity())
    assert_allclose(values(compose(a, inverse(a))), ident, atol=1e-12)
    assert_allclose(values(compose(inverse(a), a)), ident, atol=1e-12)


@given(elements(), elements(), st.floats(0, 1), st.floats(-3, 3))
def test_matrix_representation_is_a_homomorphism(a, b, t, x):
    assert_allclose(matrix_rep(compose(a, b), t, x),
                    matrix_rep(a, t, x) @ matrix_rep(b, t, x),
                    rtol=1e-12, atol=1e-12)


def test_time_dependent_composition():
    a = GaugeElement(TimeFn.linear(0.2), TimeFn.exponential(0.5, 2.0))
    b = GaugeElement(1.0, TimeFn.linear(1.0, 1.0), [0.0, 1.0])
    ab = compose(a, b)
    t = 0.7
    assert_allclose(ab.gamma(t), 0.2 * t + 2 * np.exp(0.5 * t))
    assert_allclose(ab.lam(t), 2 * np.exp(0.5 * t) * (1 + t))
    assert_allclose(ab.theta(3.0, t), 2 * np.exp(0.5 * t) * 3.0)


def test_degenerate_elements_are_rejected():
    with pytest.raises(InvalidElementError, match='vanishes'):
        GaugeElement(0.0, 0.0)
    with pytest.raises(InvalidElementError, match='vanishes'):
        GaugeElement(0.0, TimeFn.linear(-2.0, 1.0))
    # a zero outside the window is fine
    GaugeElement(0.0, TimeFn.linear(-2.0, 3.0))


def test_identity_and_subgroups():
    assert GaugeElement.identity().is_identity
    assert is_restricted(GaugeElement(0.3))
    assert not is_restricted(GaugeElement(0.3, 2.0))
    u = linear_gauge([0.0, 1.5])
    assert not u.is_identity and u.lam(0.5) == 1.0


def test_gauge_element_dict_form():
    g = GaugeElement(TimeFn.linear(0.2), 2.0, [1.0, 0.5])
    assert GaugeElement.from_dict(g.to_dict()) == g
    with pytest.raises(ConfigError) as e:
        GaugeElement.from_dict({'lambda': {'kind': 'tabulated', 'params': {
            't0': 0.0, 'values': [1.0, 1.0, 1.0]}}})
    assert e.value.path == 'gauge.lambda.params.step'


# ----------------------------------------------------------------------
# (k, λ) form
# ----------------------------------------------------------------------
def test_affine_composition_and_matrix():
    a = AffineGaugeElement(lambda R, x, t: 0.3 * np.log(R) + x, 2.0)
    b = AffineGaugeElement(lambda R, x, t: x * t, lambda x, t: 1.0 + x**2)
    R, x, t = 0.4, 0.7, 0.2
    ab = compose_affine(a, b)
    assert_allclose(affine_matrix(ab, R, x, t),
                    affine_matrix(a, R, x, t) @ affine_matrix(b, R, x, t))
    e = compose_affine(a, affine_inverse(a))
    assert_allclose(affine_matrix(e, R, x, t), np.eye(2), atol=1e-15)


def test_affine_form_of_gauge_element():
    g = GaugeElement(0.5, 2.0, [0.1])
    a = affine_from_gauge(g)
    k, lam = a.at(np.e, 1.0, 0.0)
    assert_allclose(k, 0.5 + 0.1)
    assert_allclose(lam, 2.0)


def test_affine_lambda_zero():
    with pytest.raises(InvalidElementError):
        AffineGaugeElement(0.0, 0.0)
    a = AffineGaugeElement(0.0, lambda x, t: x)
    with pytest.raises(InvalidElementError, match='vanishes'):
        a.lam(np.array([0.0, 1.0]), 0.0)


def test_intertwining_phase():
    g = GaugeElement(0.5, 3.0)
    theta = PhaseField([0.0, 1.0])
    assert intertwine(g, theta) == PhaseField([0.0, 3.0])
    a = AffineGaugeElement(0.0, 2.0)
    assert_allclose(intertwine(a, theta)(np.array([1.5]), 0.0), 3.0)


# ----------------------------------------------------------------------
# action on coefficients
# ----------------------------------------------------------------------
def test_worked_example():
    out = act_on_coefficients(GaugeElement(1.0, 1.0), linear_free())
    assert out.nu2 == TimeFn.constant(0.25)
    assert out.mu1 == TimeFn.constant(0.5)
    assert out.mu2 == TimeFn.constant(-0.5)
    assert out.mu4 == TimeFn.constant(-0.5)
    assert out.mu5 == TimeFn.constant(0.25)
    iv = invariants(out)
    assert iv.iota0(0.0) == -0.5
    assert iv.iota1(0.0) == 0.125


@given(coefficient_vectors(), gammas, lams)
def test_action_agrees_with_matrix(c, gamma, lam):
    out = act_on_coefficients(GaugeElement(gamma, lam), c)
    assert_allclose(out.at(0.5)[:8], action_matrix(gamma, lam) @ c.at(0.5)[:8],
                    rtol=1e-12, atol=1e-12)


@settings(deadline=None)
@given(coefficient_vectors(), elements(theta=False, lam=positive_lams),
       elements(theta=False, lam=positive_lams))
def test_action_of_composition(c, g, h):
    once = act_on_coefficients(compose(g, h), c)
    twice = act_on_coefficients(g, act_on_coefficients(h, c))
    assert_allclose(once.at(0.5), twice.at(0.5), rtol=1e-9, atol=1e-9)


@settings(deadline=None)
@given(coefficient_vectors(), elements(theta=False, lam=positive_lams))
def test_invariants_are_invariant(c, g):
    before = invariants(c).at(0.5)
    after = invariants(act_on_coefficients(g, c)).at(0.5)
    assert_allclose(after, before, rtol=1e-10,
                    atol=1e-10 * max(1.0, np.abs(before).max()))


def test_alpha_transforms_affinely():
    g = GaugeElement(TimeFn.linear(0.2), TimeFn.exponential(0.3))
    c = linear_free().replace(alpha1=0.4, alpha2=0.1)
    out = act_on_coefficients(g, c)
    t = 0.6
    lam = np.exp(0.3 * t)
    assert_allclose(out.alpha1(t), lam * 0.4 - 0.5 * 0.2 * t * 0.1
                    + 0.5 * (0.2 * t * 0.3 - 0.2))
    assert_allclose(out.alpha2(t), 0.1 - 0.3)
    assert_allclose(invariants(out).at(t), invariants(c).at(t), atol=1e-14)


def test_theta_part_does_not_act():
    with pytest.raises(InvalidElementError, match='theta'):
        act_on_coefficients(GaugeElement(0.0, 1.0, [1.0]), linear_free())


def test_tabulated_gauge_leaves_boundary_warning():
    gamma = TimeFn.tabulated(0.0, 0.25, [0.0, 0.1, 0.3, 0.4, 0.6])
    out = act_on_coefficients(GaugeElement(gamma), linear_free())
    assert any('one-sided' in w for w in out.meta['warnings'])


def test_windows_must_overlap():
    g = GaugeElement(0.5, window=(2.0, 3.0))
    with pytest.raises(DomainError, match='overlap'):
        act_on_coefficients(g, linear_free())


def test_closure_of_linear_equation():
    g = GaugeElement(TimeFn.linear(0.2), 1.0)
    out = closure_coefficients(-0.5, 1.0, g)
    assert_allclose(out.alpha1(0.5), -0.1)
    direct = act_on_coefficients(g, linear_free())
    for t in TIMES:
        assert_allclose(out.at(t), direct.at(t), atol=1e-15)
    # the closure of the linear equation is linearizable
    assert classify(invariants(out)) is Family.F0

    g = GaugeElement(0.5, 2.0)
    out = closure_coefficients(-0.5, 1.0, g)
    assert_allclose(out.kappa(0.0), (0.25 + 4 - 1) * -0.5 / 4)
    assert_allclose(out.xi(0.0), -0.5 * out.kappa(0.0))


# ----------------------------------------------------------------------
# invariants and classification
# ----------------------------------------------------------------------
def test_linear_invariants():
    iv = invariants(preset('linear'))
    assert_allclose(iv.at(0.3), [-0.5, 0.125, 0, 0, 0, 0, 0, 0], atol=0)


def test_invariants_of_vanishing_nu1():
    c = CoefficientVector(TimeFn.linear(1.0, -0.5))
    with pytest.raises(SingularInvariantError):
        invariants(c)


@pytest.mark.parametrize('c, family', [
    (embed_linear(-0.5, 1.0), Family.F0),
    (family_f1(-0.5, 1.0, mu1=0.3, kappa=0.2, alpha1=0.1), Family.F1),
    (family_f3(-0.5, 0.1, 1.0, mu1=0.3, kappa=0.2, xi=0.4), Family.F3),
    (family_f5(-0.5, 0.1, 1.0, mu3=0.7), Family.F5),
])
def test_f_chain(c, family):
    assert classify(invariants(c)) is family


@pytest.mark.parametrize('c, family', [
    (r_family(0, -0.5, 1.0), Family.R0),
    (r_family(1, -0.5, 1.0, mu1=0.3, kappa=0.2, alpha1=0.1), Family.R1),
    (r_family(3, -0.5, 1.0, nu2=0.1, mu1=0.3), Family.R3),
    (r_family(5, -0.5, 1.0, mu4=0.7), Family.R5),
    (preset('Kostin', f=0.1), Family.UNCLASSIFIED),
    (embed_linear(TimeFn.linear(0.1, -0.5), 1.0), Family.UNCLASSIFIED),
])
def test_r_chain(c, family):
    assert classify(invariants(c), chain='R') is family


def test_r_family_membership():
    assert in_r_family(r_family(3, -0.5, 1.0, nu2=0.1))
    assert not in_r_family(preset('Kostin', f=0.1))
    with pytest.raises(DomainError):
        r_family(1, TimeFn.linear(0.1, -0.5), 1.0)
    with pytest.raises(ValueError, match='R2'):
        r_family(2, -0.5, 1.0)


def test_classification_tolerance():
    c = family_f3(-0.5, 0.1, 1.0).replace(mu3=TimeFn.constant(0.5 + 1e-12))
    assert classify(invariants(c)) is Family.F3
    assert classify(invariants(c), eps=1e-14) is Family.F5


def test_invariant_vector_dict_form():
    iv = invariants(preset('DG', D=0.05, c2=0.3))
    d = iv.to_dict(flat=True)
    assert d['iota0'] == -0.5
    assert InvariantVector.from_dict(d) == iv
    with pytest.raises(ConfigError) as e:
        InvariantVector.from_dict({'iota0': 1.0})
    assert e.value.path == 'invariants.iota1'


def test_coefficient_vector_dict_form():
    c = preset('DG', D=0.05, c1=0.2, c2=0.3)
    assert CoefficientVector.from_dict(c.to_dict(flat=True)) == c
    with pytest.raises(ConfigError, match='nu1'):
        CoefficientVector.from_dict({'mu0': 1.0})


def test_symmetries():
    assert time_translation_invariant(preset('linear'))
    assert galilei_invariant(preset('linear'))
    assert galilei_invariant(preset('BM', b=0.3))
    assert not galilei_invariant(preset('Kostin', f=0.1))
    assert not galilei_invariant(family_f5(-0.5, mu0=1.0, mu3=0.7))


def test_orbits_are_two_dimensional():
    assert orbit_dimension(preset('linear'), 0.0) == 2
    assert orbit_dimension(preset('DG', D=0.05, c2=0.3), 0.5, 0.3, 1.5) == 2


# ----------------------------------------------------------------------
# presets
# ----------------------------------------------------------------------
def test_dg_preset_coefficients():
    c = preset('DG', D=0.05, Dp=0.1, c1=1.0, c2=2.0, c3=3.0, c4=4.0, c5=5.0)
    assert_allclose(c.at(0.0), [-0.5, 0.025, 1.0, 0.1, 0.2 - 0.25,
                                0.3 + 0.5, 0.4, 0.5 + 0.125, 0.0, 0.0])


def test_presets_with_units():
    c = preset('BM', hbar=2.0, m=4.0, b=0.3)
    assert c.nu1(0.0) == -0.25
    assert c.mu0(0.0) == 0.5
    assert c.alpha1(0.0) == -0.15
    assert preset('kostin', m=2.0, f=0.1).alpha2(0.0) == 0.05


@pytest.mark.parametrize('hbar', [0.5, 1.0, 2.0])
def test_dg_diffusion_is_independent_of_hbar(hbar):
    c = preset('DG', hbar=hbar, m=2.0, D=0.05, Dp=0.1, c1=1.0, c2=2.0)
    # ∂tρ = 2ν1∇·J + 2ν2Δρ against −(ħ/m)∇·J + DΔρ
    assert 2 * c.nu1(0.0) == pytest.approx(-hbar / 2.0)
    assert 2 * c.nu2(0.0) == pytest.approx(0.05)
    assert c.mu1(0.0) == pytest.approx(0.1)
    assert c.mu2(0.0) == pytest.approx(0.2 - hbar / 8.0)


@pytest.mark.parametrize('name, params', [
    ('Linear', {}),
    ('BM', {'b': 0.3}),
    ('Kostin', {'f': 0.1}),
    ('DG', {'D': 0.05, 'c2': 0.3}),
    ('GuerraPusterla', {'c2': 0.3}),
])
def test_identify_preset(name, params):
    assert identify_preset(preset(name, **params)) is Preset.lookup(name)


def test_identify_preset_none():
    assert identify_preset(family_f5(-0.3, mu0=1.0)) is None


def test_preset_errors():
    with pytest.raises(UnknownPresetError, match='expected one of'):
        preset('Schrodinger')
    with pytest.raises(ValueError, match='no parameter'):
        preset('BM', f=0.1)
    with pytest.raises(ValueError, match='positive'):
        preset('linear', hbar=0.0)


# ----------------------------------------------------------------------
# seeded suite
# ----------------------------------------------------------------------
def test_property_suite():
    report = property_suite(1000, seed=0)
    assert report['passed'], report
    assert report['max_associativity_err'] <= 1e-12
    assert report['max_invariance_err'] <= 1e-10


def test_property_suite_is_deterministic():
    assert property_suite(20, seed=3) == property_suite(20, seed=3)
