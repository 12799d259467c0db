import math

import numpy as np
import pytest

from nondivhom import constructions as cons
from nondivhom.errors import (
    DegenerateError,
    PositivityError,
    TraceError,
    UnknownName,
)
from nondivhom.field import WaveTerm, constant_field, derivative, field_from_expr, field_from_terms
from nondivhom.homogenize import Verdict, classify, third_order_tensor
from nondivhom.periodic_solver import solve_invariant_measure


def test_gallery_names_and_unknown():
    assert set(cons.GALLERY_NAMES) >= {"st_2d", "const_trace_typeeps_2d", "cbad_trace_3d",
                                       "rate_example_3d", "a_plus_identity_2d",
                                       "r_one_diagonal_2d"}
    with pytest.raises(UnknownName) as info:
        cons.gallery("nope")
    assert "nope" in str(info.value)
    assert isinstance(info.value, KeyError)


@pytest.mark.parametrize("name", ["st_2d", "separable_diag", "shifted_even", "r_one_diagonal_2d"])
def test_gallery_references_hold(name):
    entry = cons.gallery(name)
    T = third_order_tensor(entry.field)
    for ref in entry.reference:
        assert ref.check(T.c), (ref, T.c[ref.index])


def test_st_2d_density_and_effective_in_closed_form():
    entry = cons.gallery("st_2d")
    r, _ = solve_invariant_measure(entry.field)
    assert np.abs(r.values - entry.measure.at_resolution(64).values).max() < 1e-10
    T = third_order_tensor(entry.field)
    assert np.allclose(T.effective, entry.effective, atol=1e-12)


@pytest.mark.parametrize("printed,lo,hi", [
    ("0.003", 0.0025, 0.0045),
    ("0.0005", 0.00045, 0.00065),
    ("-0.00001", -2.5e-5, -0.5e-5),
])
def test_digits_intervals(printed, lo, hi):
    ref = cons.digits_ref((0, 0, 0), printed)
    assert ref.value - ref.tol == pytest.approx(lo, abs=2e-9)
    assert ref.value + ref.tol == pytest.approx(hi, abs=2e-9)


def test_trace_integral_oracle_value():
    # one-dimensional formula vs the periodic pipeline (see the acceptance suite)
    assert cons.trace_integral_oracle() == pytest.approx(0.0032650871574768855, abs=1e-14)


def test_c_plus_am_closed_forms():
    rng = np.random.default_rng(7)
    C, M, a = cons.random_c_plus_am(rng, 2, 32)
    cam = cons.build_c_plus_am(C, M, a)
    T = third_order_tensor(cam.assembled)
    assert T.max_c < 1e-12
    assert (T.measure - cam.r_pred).sup_norm() < 1e-10
    assert cam.identity_defect() < 1e-9


def test_c_plus_am_rejects_nonsymmetric():
    a = field_from_expr(2, "0.1*sin(2*pi*y1)", 16)
    with pytest.raises(ValueError):
        cons.build_c_plus_am(np.eye(2), np.array([[0.0, 1.0], [0.0, 0.0]]), a)


def test_scalar_product_harmonic_mean():
    rng = np.random.default_rng(11)
    B = cons.random_coefficient(rng, 2, 32)
    a = cons.random_positive(rng, 2, 32)
    sp = cons.scalar_product(a, B)
    T = third_order_tensor(sp.assembled)
    assert np.abs(T.effective - sp.effective_pred).max() < 1e-10
    assert np.abs(T.c - sp.tensor_pred()).max() < 1e-9


def test_designed_scalar_rejects_large_s():
    B = cons.random_coefficient(np.random.default_rng(2), 2, 16)
    phi = field_from_expr(2, "sin(2*pi*y1)", 16)
    with pytest.raises(PositivityError):
        cons.designed_scalar(B, phi, 10.0)


def test_characterization_matches_pipeline():
    A = cons.gallery("st_2d").field
    a, b = cons.split_diagonal(A)
    cd = cons.characterize_2d_diagonal(a, b)
    T = third_order_tensor(A)
    assert np.abs(cd.c_pred - T.c).max() < 1e-10
    assert cd.verdict() is Verdict.TYPE_EPS
    assert cd.abar == pytest.approx(1.0, abs=1e-12)


def test_special_structure_zero_case():
    from nondivhom.suites import diagonal_wave_data

    sp = cons.q_criterion_special(*diagonal_wave_data(64), 64)
    assert max(abs(sp.Q1), abs(sp.Q2)) < 1e-12


def test_orbit_scaling_keeps_vanishing_tensor():
    rng = np.random.default_rng(5)
    A = cons.build_c_plus_am(*cons.random_c_plus_am(rng, 2, 64)).assembled
    T = third_order_tensor(A)
    orb = cons.orbit_scale(A, np.eye(2), gamma_bar_from=T.effective)
    assert third_order_tensor(orb.scaled).max_c < 1e-10


def test_orbit_scaling_of_general_field_is_not_trivial():
    A = cons.random_coefficient(np.random.default_rng(5), 2, 64)
    assert third_order_tensor(cons.orbit_scale(A, np.eye(2)).scaled).max_c > 1e-8


def test_perturbation_prediction_and_degenerate():
    a = field_from_terms(2, [WaveTerm((1, 1), "sin", 0.5)], 32)
    p = cons.perturb_type_eps(a, 0.05)
    assert p.predicted_c111 == pytest.approx(-0.003125, abs=1e-12)
    with pytest.raises(DegenerateError):
        cons.perturb_type_eps(field_from_expr(2, "0.3*sin(2*pi*y2)", 32), 0.05)
    with pytest.raises(PositivityError):
        cons.perturb_type_eps(a, 50.0)


def test_density_perturb_keeps_density():
    A0 = cons.gallery("a_plus_identity_2d", 32).companions["base"][0]
    p = cons.density_perturb(A0, 0.1, 0.05)
    rep = classify(p.field, 32)
    assert rep.verdict is Verdict.TYPE_EPS
    assert abs(rep.tensor.c[0, 0, 0] - p.predicted_c111) < 1e-8


def test_constant_trace_generator():
    a = field_from_expr(2, "0.3*sin(2*pi*(y1 + y2))", 32)
    A = cons.CoefficientField({(0, 0): 0.5 + a * 0.5, (1, 1): 0.5 - a * 0.5}, 2, 32)
    Am, d, tB = cons.constant_trace_type_eps(A, 0.1)
    assert (Am.trace() - 1.0).sup_norm() < 1e-12
    assert 0.1 / 32 <= d <= 0.1
    assert classify(Am, 32).verdict is Verdict.TYPE_EPS


def test_lift_trace_error_and_success():
    B = cons.gallery("st_2d", 16).field
    with pytest.raises(TraceError):
        cons.lift_to_3d_constant_trace(B, 1.0)
    L = cons.lift_to_3d_constant_trace(B, 8.0)
    assert (L.trace() - 8.0).sup_norm() < 1e-12


@pytest.mark.parametrize("seed", range(5))
@pytest.mark.parametrize("n", [2, 3])
def test_random_generators_are_elliptic(seed, n):
    rng = np.random.default_rng(seed)
    N = 16 if n == 2 else 8
    assert cons.random_coefficient(rng, n, N).eigenvalue_range()[0] >= cons.MIN_EIGENVALUE
    C, M, a = cons.random_c_plus_am(rng, n, N)
    A = cons.build_c_plus_am(C, M, a).assembled
    assert A.eigenvalue_range()[0] >= cons.MIN_EIGENVALUE
    p = cons.random_positive(rng, n, N)
    assert 0.75 - 1e-12 <= p.min() and p.max() <= 1.25 + 1e-12


def test_hessian_contract_constant_matrix():
    w = field_from_expr(2, "sin(2*pi*y1)*cos(2*pi*y2)", 16)
    M = np.array([[1.0, 0.5], [0.5, 2.0]])
    got = cons.hessian_contract(M, w)
    want = derivative(w, (0, 0)) + derivative(w, (0, 1)) * 1.0 + derivative(w, (1, 1)) * 2.0
    assert np.abs((got - want).values).max() < 1e-11
    assert constant_field(2, 0.0, 16).is_zero()


def test_gallery_json_uses_one_based_indices():
    obj = cons.gallery("st_2d", 16).to_json_obj()
    assert obj["expected_verdict"] == "TypeEps"
    assert obj["reference"][0]["index"] == [1, 1, 1]
    assert math.isclose(obj["reference"][0]["value"], -1 / (128 * math.pi))
