"""Acceptance criteria, each at its stated tolerance with one status line."""

import math
import time

import numpy as np
import pytest
from scipy.integrate import quad

from nondivhom import constructions as cons
from nondivhom import dirichlet_lab as lab
from nondivhom.field import WaveTerm, field_from_terms
from nondivhom.homogenize import Verdict, classify, third_order_tensor
from nondivhom.periodic_solver import dense_invariant_measure, solve_invariant_measure
from nondivhom.suites import (
    special_structure_data,
    run_lemma22,
    run_thm11,
    run_thm12,
    run_thm13,
)

EXACT = -1.0 / (128.0 * math.pi)


def test_01_explicit_diagonal_reference(announce):
    t0 = time.perf_counter()
    rep = classify(cons.gallery("st_2d", 128).field, 128)
    elapsed = time.perf_counter() - t0
    c = rep.tensor.c
    err_main = max(abs(c[0, 0, 0] - EXACT), abs(c[0, 1, 1] - EXACT))
    err_second = max(abs(c[1, 0, 0]), abs(c[1, 1, 1]))
    err_mixed = max(abs(c[j, 0, 1]) for j in range(2))
    ok = (err_main <= 1e-8 and err_second <= 1e-9 and err_mixed <= 1e-9 and elapsed < 5.0
          and rep.verdict is Verdict.TYPE_EPS)
    announce("1 explicit diagonal field", ok,
             f"c111={c[0, 0, 0]:.9e} err={err_main:.1e}, c211 err={err_second:.1e}, "
             f"mixed={err_mixed:.1e}, {elapsed:.2f}s, {rep.verdict}")
    assert ok


def _q_by_quadrature():
    """Q-integrals from one-dimensional adaptive quadrature only.

    R_i' is the mean-zero antiderivative of r_i - mean(r_i); the double
    integral collapses to one along the diagonal against the average of a
    over each line y1 + y2 = t (or y1 - y2 = t).
    """
    opts = dict(epsabs=1e-14, epsrel=1e-13, limit=200)

    def a(y1, y2):
        return 1.0 - 0.5 * math.sin(2 * math.pi * y1) * math.sin(2 * math.pi * y2)

    def r1(t):
        return (math.sin(2 * math.pi * t) + 2 * math.cos(2 * math.pi * t)) / 8

    def r2(t):
        return 1.0 - r1(t)

    def slope(r):
        m = quad(r, 0, 1, **opts)[0]

        def F(t):
            return quad(lambda s: r(s) - m, 0, t, **opts)[0]

        shift = quad(F, 0, 1, **opts)[0]
        return lambda t: F(t) - shift

    dR1, dR2 = slope(r1), slope(r2)
    a_plus = lambda t: quad(lambda y: a(y, t - y), 0, 1, **opts)[0]  # noqa: E731
    a_minus = lambda t: quad(lambda y: a(y, y - t), 0, 1, **opts)[0]  # noqa: E731
    q1 = quad(lambda t: dR1(t) * a_plus(t), 0, 1, **opts)[0]
    q2 = quad(lambda t: dR2(t) * a_minus(t), 0, 1, **opts)[0]
    return q1, q2


def test_02_q_integrals_oracle(announce):
    q1, q2 = _q_by_quadrature()
    sp = cons.q_criterion_special(*special_structure_data(64), 64)
    T = third_order_tensor(cons.gallery("st_2d").field)
    err_q = max(abs(q1 - EXACT), abs(q2 - EXACT), abs(sp.Q1 - EXACT), abs(sp.Q2 - EXACT))
    err_c = float(np.abs(sp.c_pred - T.c).max())
    ok = err_q <= 1e-10 and err_c <= 1e-8
    announce("2 Q-integral oracle", ok,
             f"quad Q1={q1:.12e} Q2={q2:.12e}, |Q-exact|<={err_q:.1e}, "
             f"predicted vs pipeline {err_c:.1e}")
    assert ok


def test_03_c_plus_am_suite(announce):
    t0 = time.perf_counter()
    res = run_thm11(trials=50, seed=2024)
    elapsed = time.perf_counter() - t0
    ok = res.passed and elapsed < 120.0
    announce("3 C + aM suite (50 fields, n=2,3)", ok,
             f"max|c|={res.worst('max_c['):.1e}, r err={res.worst('r['):.1e}, "
             f"v err={res.worst('v['):.1e}, identity={res.worst('identity['):.1e}, "
             f"{elapsed:.1f}s")
    assert ok, res.failures


def test_04_scalar_product_suite(announce):
    res = run_lemma22(trials=20, seed=2024)
    ok = res.passed
    announce("4 scalar-product identities (20 pairs)", ok,
             f"r={res.worst('r['):.1e}, Abar={res.worst('effective['):.1e}, "
             f"v={res.worst('v['):.1e}, c={res.worst('c['):.1e}")
    assert ok, res.failures


def test_05_orbit_suite(announce):
    res = run_thm13(trials=20, seed=2024)
    ok = res.passed
    announce("5 orbit scaling (20 fields + diagonal inputs)", ok,
             f"max|c(scaled)|={res.worst('max_c['):.1e}, w closed form={res.worst('w['):.1e}, "
             f"{len(res.failures)} failures")
    assert ok, res.failures


def test_06_constant_trace_offdiagonal(announce):
    A = cons.gallery("const_trace_typeeps_2d").field
    c64 = third_order_tensor(A, 64).c[1, 0, 1]
    c128 = third_order_tensor(A, 128).c[1, 0, 1]
    oracle = cons.trace_integral_oracle()
    stable = abs(c64 - c128) <= 0.05 * abs(c128)
    ok = 0.0025 <= c128 <= 0.0045 and c128 > 0 and stable and abs(oracle - c128) <= 1e-6
    announce("6 constant-trace off-diagonal field", ok,
             f"c212(64)={c64:.12e}, c212(128)={c128:.12e}, 1D integral={oracle:.12e}, "
             f"diff={abs(oracle - c128):.1e}")
    assert ok


def test_07_lifted_3d_tensor(announce):
    T = third_order_tensor(cons.gallery("cbad_trace_3d", 32).field, 32)
    g_third = np.zeros((3, 3, 3))
    # g = 8 x1^3 - 3 x1 x3^2: d111 g = 48, d133 g = -6 (all orderings)
    g_third[0, 0, 0] = 48.0
    for idx in ((0, 2, 2), (2, 0, 2), (2, 2, 0)):
        g_third[idx] = -6.0
    source = T.contract(g_third)
    e1 = abs(T.c[0, 0, 0] - EXACT)
    e3 = abs(T.c[0, 2, 2] - 1.0 / (64.0 * math.pi))
    es = abs(source + 15.0 / (32.0 * math.pi))
    ok = max(e1, e3, es) <= 1e-7
    announce("7 lifted 3D tensor", ok,
             f"c111 err={e1:.1e}, c133 err={e3:.1e}, contracted source={source:.10f} "
             f"err={es:.1e}")
    assert ok


def test_08_identity_shift_pair(announce):
    base = cons.special_structure_field(64)
    rb = classify(base)
    shifted = cons.gallery("a_plus_identity_2d", 64).field
    r64 = classify(shifted, 64)
    c64 = r64.tensor.c[0, 0, 0]
    c128 = r64.refined.c[0, 0, 0]
    ok = (rb.verdict is Verdict.TYPE_EPS2 and rb.max_C <= 1e-7
          and r64.verdict is Verdict.TYPE_EPS and 3e-4 <= c64 <= 8e-4 and 3e-4 <= c128 <= 8e-4
          and abs(c64 - c128) <= 1e-3 * abs(c128))
    announce("8 identity-shift verdict pair", ok,
             f"base {rb.verdict} max_C={rb.max_C:.1e}; shifted {r64.verdict} "
             f"c111(64)={c64:.10e} c111(128)={c128:.10e}")
    assert ok


def test_09_unit_density_small_value(announce):
    A = cons.gallery("r_one_diagonal_2d", 64).field
    rep = classify(A, 64)
    r = rep.refined.measure
    c64, c128 = rep.tensor.c[0, 0, 0], rep.refined.c[0, 0, 0]
    r_err = float(np.abs(r.values - 1.0).max())
    eff_err = float(np.abs(rep.refined.effective - np.eye(2)).max())
    gap = abs(c64 - c128)
    ok = (r_err <= 1e-10 and eff_err <= 1e-9 and c128 < 0 and 3e-6 <= -c128 <= 3e-5
          and gap < 0.2 * abs(c128) and rep.verdict is Verdict.TYPE_EPS)
    announce("9 unit-density small value", ok,
             f"|r-1|={r_err:.1e}, |Abar-I|={eff_err:.1e}, c111={c128:.10e}, gap={gap:.1e}, "
             f"{rep.verdict}")
    assert ok


def test_10_multiplicative_perturbation(announce):
    a = field_from_terms(2, [WaveTerm((1, 1), "sin", 0.5)], 64)
    p = cons.perturb_type_eps(a, 0.05)
    c = third_order_tensor(p.field).c[0, 0, 0]
    err = abs(c - p.predicted_c111)
    ok = err <= 1e-8 and c < 0
    announce("10 multiplicative perturbation", ok,
             f"solver c111={c:.12e}, closed form={p.predicted_c111:.12e}, diff={err:.1e}")
    assert ok


def test_11_diagonal_characterization(announce):
    res = run_thm12(trials=20, seed=2024)
    n_agree = sum(c.passed for c in res.checks if c.label.startswith("verdict"))
    ok = res.passed
    announce("11 diagonal characterization vs classifier", ok,
             f"{n_agree}/20 verdicts agree, predicted tensor err={res.worst('c_pred['):.1e}")
    assert ok, res.failures


@pytest.fixture(scope="module")
def lifted_rate():
    t0 = time.perf_counter()
    ex = lab.run_rate_experiment(lab.preset("rate_example_3d"), interior=True, workers=4)
    return ex, time.perf_counter() - t0


def test_12a_rate_lifted_3d(announce, lifted_rate):
    ex, elapsed = lifted_rate
    fu, fz = ex.fit_u, ex.fit_z
    ok = (fu.usable and fz.usable and 0.85 <= fu.slope <= 1.15 and fz.slope >= 1.6
          and elapsed < 600.0)
    announce("12a rate, lifted 3D field", ok,
             f"rate_u={fu.slope:.3f} (res {fu.residual:.3f}), rate_z={fz.slope:.3f} "
             f"(res {fz.residual:.3f}), errors_u={['%.2e' % e for e in ex.errors_u]}, "
             f"{elapsed:.0f}s")
    assert ok


def test_12b_rate_diagonal_harmonic(announce):
    t0 = time.perf_counter()
    ex = lab.run_rate_experiment(lab.preset("diagonal_harmonic_2d"), interior=True)
    elapsed = time.perf_counter() - t0
    f = ex.fit_u
    ok = f.usable and 1.8 <= f.slope <= 2.2 and elapsed < 600.0
    announce("12b rate, diagonal 2D field with f = 0", ok,
             f"rate_u={f.slope:.3f} (res {f.residual:.3f}), {elapsed:.0f}s")
    assert ok


def _two_dimensional_gallery():
    out = []
    for name in cons.GALLERY_NAMES:
        e = cons.gallery(name, 16)
        if e.field.dimension == 2:
            out.append((name, e.field))
            out += [(f"{name}/{k}", f) for k, (f, _) in e.companions.items()]
    return out


def test_13_dense_oracle(announce):
    worst = 0.0
    rows = []
    for name, A in _two_dimensional_gallery():
        r_k, _ = solve_invariant_measure(A, 16)
        r_d, sv = dense_invariant_measure(A, 16)
        err = float(np.abs(r_k.values - r_d.values).max())
        worst = max(worst, err)
        rows.append(f"{name}={err:.1e}")
    ok = worst <= 1e-10
    announce("13 Krylov vs dense null vector (N=16)", ok, ", ".join(rows))
    assert ok
