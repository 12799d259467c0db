import csv
import io
import json
import math

import numpy as np
import pytest
import scipy.sparse.linalg as spla

from nondivhom import constructions as cons
from nondivhom import dirichlet_lab as lab
from nondivhom.errors import DomainError, UnknownName
from nondivhom.field import CoefficientField, field_from_expr


def _interior(a):
    return a[tuple(slice(1, -1) for _ in range(a.ndim))]


def _smooth_full_field(N=16):
    a12 = field_from_expr(2, "0.3*sin(2*pi*(y1 + y2))", N)
    a11 = field_from_expr(2, "1.5 + 0.4*cos(2*pi*y1)", N)
    return CoefficientField({(0, 0): a11, (0, 1): a12, (1, 1): 1.2}, 2, N)


@pytest.mark.parametrize("eps,m", [(0.25, 4), (1 / 7, 7), (1 / 32, 32)])
def test_period_count(eps, m):
    assert lab.period_count(eps) == m


@pytest.mark.parametrize("eps", [0.3, 1 / 3, 0.5])
def test_period_count_rejects(eps):
    with pytest.raises(DomainError):
        lab.period_count(eps)


def test_spec_validation():
    A = _smooth_full_field()
    with pytest.raises(DomainError):
        lab.BvpSpec(A, epsilons=(1 / 8, 1 / 8, 1 / 12, 1 / 16))
    with pytest.raises(DomainError):
        lab.BvpSpec(A, cells_per_period=8)
    with pytest.raises(ValueError):
        lab.BvpSpec(A, g="x4 + 1")


def test_cells_use_coarse_x3_for_planar_fields():
    spec = lab.preset("rate_example_3d")
    assert spec.cells(1 / 8) == (128, 128, 64)
    assert lab.y3_independent(spec.A)


def test_preset_unknown():
    with pytest.raises(UnknownName):
        lab.preset("nope")


@pytest.mark.parametrize("g", ["1 + 2*x1 - x2", "x1**2 - x1*x2 + 3*x2**2"])
def test_stencil_exact_on_quadratics(g):
    A = _smooth_full_field()
    cells = (64, 64)
    coeffs = lab.oscillating_coeffs(A, 1 / 4, cells)
    x1, x2 = lab.node_coords(cells)
    u = eval(g.replace("x1", "X").replace("x2", "Y"), {"X": x1, "Y": x2})
    D = {"1 + 2*x1 - x2": (0, 0, 0), "x1**2 - x1*x2 + 3*x2**2": (2, -1, 6)}[g]
    expected = coeffs[(0, 0)] * D[0] + 2 * coeffs[(0, 1)] * D[1] + coeffs[(1, 1)] * D[2]
    assert np.abs(lab.apply_stencil(coeffs, u, cells) - expected).max() < 1e-8


def test_linear_boundary_data_reproduced():
    spec = lab.BvpSpec(_smooth_full_field(), f="0", g="0.5 + x1 - 2*x2",
                       epsilons=(1 / 4, 1 / 5, 1 / 6, 1 / 8))
    sol = lab.solve_oscillatory(spec, 1 / 4)
    x1, x2 = lab.node_coords(sol.cells)
    assert np.abs(sol.values - (0.5 + x1 - 2 * x2)).max() < 1e-11


def test_matrix_matches_stencil():
    A = _smooth_full_field()
    cells = (32, 32)
    coeffs = lab.oscillating_coeffs(A, 1 / 4, cells)
    rng = np.random.default_rng(0)
    u = np.zeros((33, 33))
    u[1:-1, 1:-1] = rng.normal(size=(31, 31))
    L = lab.assemble(coeffs, cells)
    assert np.allclose(L @ u[1:-1, 1:-1].ravel(),
                       lab.apply_stencil(coeffs, u, cells).ravel(), atol=1e-8)


def test_small_dense_oracle():
    # -(D11 + 2 D22) u = 3 on an 8x8 grid: dense solve of the written-out system
    cells = (8, 8)
    h = 1 / 8
    n = 7
    idx = lambda i, j: i * n + j  # noqa: E731
    M = np.zeros((n * n, n * n))
    for i in range(n):
        for j in range(n):
            M[idx(i, j), idx(i, j)] = (2 + 4) / h**2
            for di, w in ((-1, 1.0), (1, 1.0)):
                if 0 <= i + di < n:
                    M[idx(i, j), idx(i + di, j)] = -w / h**2
                if 0 <= j + di < n:
                    M[idx(i, j), idx(i, j + di)] = -2.0 / h**2
    want = np.linalg.solve(M, 3.0 * np.ones(n * n)).reshape(n, n)
    got = lab.solve_dirichlet({(0, 0): 1.0, (1, 1): 2.0}, 3.0 * np.ones((n, n)), cells)
    assert np.abs(got - want).max() < 1e-13


def test_sine_transform_matches_sparse():
    cells = (48, 40)
    rng = np.random.default_rng(2)
    rhs = rng.normal(size=(47, 39))
    coeffs = {(0, 0): 1.3, (1, 1): 0.7}
    fast = lab.solve_dirichlet(coeffs, rhs, cells)
    slow = spla.spsolve(-lab.assemble(coeffs, cells), rhs.ravel()).reshape(rhs.shape)
    assert np.abs(fast - slow).max() < 1e-12 * np.abs(slow).max()


def test_maximum_principle_diagonal():
    A = cons.gallery("st_2d", 16).field
    spec = lab.BvpSpec(A, f="1 + x1", g="0", epsilons=(1 / 4, 1 / 5, 1 / 6, 1 / 8))
    sol = lab.solve_oscillatory(spec, 1 / 4)
    assert sol.values.min() >= 0.0
    assert sol.values.max() > 0.0


def test_x3_modes_match_krylov():
    A = cons.gallery("cbad_trace_3d", 8).field
    cells = (32, 32, 16)
    coeffs = lab.oscillating_coeffs(A, 1 / 4, cells)
    assert coeffs[(0, 0)].shape == (31, 31, 15)
    rhs = np.random.default_rng(3).normal(size=(31, 31, 15))
    a = lab._solve_x3_modes(coeffs, rhs, cells, workers=2)
    b = lab._krylov_solve(-lab.assemble(coeffs, cells), rhs)
    assert np.abs(a - b).max() < 1e-9 * np.abs(a).max()


def test_lattice_constant_field():
    A = CoefficientField({(0, 0): 2.0, (0, 1): 0.3, (1, 1): 1.0}, 2, 16)
    L = lab.lattice_homogenization(A, 16)
    assert np.allclose(L.measure, 1.0)
    assert np.allclose(L.effective, [[2.0, 0.3], [0.3, 1.0]])
    assert np.abs(L.c).max() < 1e-12


def test_lattice_tensor_approaches_continuum():
    A = cons.gallery("st_2d").field
    exact = -1 / (128 * math.pi)
    errs = [abs(lab.lattice_homogenization(A, K).c[0, 0, 0] - exact) for K in (16, 32, 64)]
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 0.01 * abs(exact)
    # second-order lattice consistency
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.15)


def test_homogenized_solution_check():
    spec = lab.preset("rate_example_3d")
    assert lab.is_homogenized_solution(spec, np.diag([1.0, 1.0, 8.0]))
    assert not lab.is_homogenized_solution(spec, np.eye(3))
    assert not lab.is_homogenized_solution(lab.preset("diagonal_harmonic_2d"), np.eye(2))


def test_contracted_source_symbolic_vs_fd():
    A = cons.gallery("st_2d", 16).field
    spec = lab.BvpSpec(A, f="0", g="x1**3 - 3*x1*x2**2", epsilons=(1 / 4, 1 / 5, 1 / 6, 1 / 8))
    c = np.zeros((2, 2, 2))
    c[0, 0, 0] = 0.7
    c[1, 0, 1] = c[1, 1, 0] = -0.2
    cells = (32, 32)
    u = lab.solve_homogenized(spec, np.eye(2), cells)
    sym = lab.contracted_source(spec, c, cells)
    fd = lab.contracted_source(spec, c, cells, u)
    # d111 g = 6 and d122 g = -6, so the sum is 0.7*6 + 2*(-0.2)*(-6)
    assert np.abs(sym - 6.6).max() < 1e-12
    assert np.abs((fd - sym)[u.interior_mask()]).max() < 1e-6


def test_z_vanishes_for_zero_tensor():
    spec = lab.preset("diagonal_harmonic_2d")
    u = lab.solve_homogenized(spec, np.eye(2), (32, 32))
    z = lab.solve_z(spec, np.eye(2), np.zeros((2, 2, 2)), u)
    assert np.abs(z.values).max() == 0.0


def test_self_convergence_of_oscillatory_solve():
    A = cons.gallery("st_2d").field
    errs = []
    ref = None
    for K in (64, 32, 16):
        spec = lab.BvpSpec(A, f="1", g="0", cells_per_period=K, epsilons=(1 / 4, 1 / 5, 1 / 6, 1 / 8))
        sol = lab.solve_oscillatory(spec, 1 / 4)
        mid = sol.values[sol.values.shape[0] // 2, sol.values.shape[1] // 2]
        if ref is None:
            ref = mid
        else:
            errs.append(abs(mid - ref))
    assert errs[1] > 2.5 * errs[0]


def test_fit_rate_synthetic():
    eps = np.array([1 / 8, 1 / 12, 1 / 16, 1 / 24])
    fit = lab.fit_rate(eps, 3.0 * eps**2)
    assert fit.slope == pytest.approx(2.0, abs=1e-12)
    assert fit.residual < 1e-12 and fit.usable
    noisy = lab.fit_rate(eps, eps * np.array([1.0, 3.0, 0.5, 2.0]))
    assert not noisy.usable
    assert not lab.fit_rate(eps, np.zeros(4)).usable


def test_constant_coefficient_flags_and_csv():
    ex = lab.run_rate_experiment(lab.preset("constant_2d"))
    assert "Degenerate" in ex.flags
    assert max(ex.errors_u) < 1e-12
    rows = list(csv.reader(io.StringIO(ex.to_csv())))
    assert rows[0] == ["epsilon", "error_u", "error_z"]
    assert len(rows) == 5
    json.loads(ex.to_json())


def test_rate_needs_four_points():
    spec = lab.BvpSpec(_smooth_full_field(), epsilons=(1 / 4, 1 / 5, 1 / 6))
    with pytest.raises(DomainError):
        lab.run_rate_experiment(spec)


def test_low_contrast_full_field_rejected():
    a12 = field_from_expr(2, "0.95*(1 + 0.01*sin(2*pi*y1))", 16)
    A = CoefficientField({(0, 0): 1.0, (0, 1): a12, (1, 1): 1.0}, 2, 16)
    spec = lab.BvpSpec(A, epsilons=(1 / 4, 1 / 5, 1 / 6, 1 / 8))
    with pytest.raises(DomainError):
        lab.solve_oscillatory(spec, 1 / 4)
