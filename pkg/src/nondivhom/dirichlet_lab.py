"""Finite-difference Dirichlet experiments on the unit square and cube.

The oscillatory problem ``-A(x/eps) : D^2 u = f`` is discretized with
centered second differences and the four-point cross for mixed
derivatives, with ``cells_per_period`` grid cells per period of A.  Because
that discretization is itself a periodic lattice operator, the matching
homogenized data (density, effective matrix, third-order tensor) are those
of the periodic lattice cell problems on the same stencil; they converge to
the continuum values as the number of cells per period grows, and using them
removes an O(1) discretization bias from the rate fits.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np
import scipy.fft as sfft
import scipy.sparse as sps
import scipy.sparse.linalg as spla

from ._expr import compile_expression, parse
from .errors import DomainError, SingularSystemError, UnknownName
from .field import CoefficientField

#: Largest grid (cells per axis) handled by sparse direct factorization.
MAX_CELLS_2D = 1024
#: Largest 3D grid handled by preconditioned Krylov.
MAX_CELLS_3D = 128
MIN_CELLS_PER_PERIOD = 16
MIN_CONTRAST = 0.1
INTERIOR = (0.25, 0.75)


# -- specs ----------------------------------------------------------------------------

@dataclass(frozen=True)
class BvpSpec:
    """Dirichlet problem on (0,1)^n with an oscillating coefficient.

    ``f`` and ``g`` are expressions in x1..xn.  ``epsilons`` must be
    reciprocals of integers m >= 4 in decreasing order.  In three dimensions
    with coefficients independent of y3, ``x3_cells`` fixes the grid along
    x3 (no microstructure there); otherwise every axis uses
    ``cells_per_period / eps`` cells.
    """

    A: CoefficientField
    f: str = "0"
    g: str = "0"
    epsilons: tuple = (1 / 8, 1 / 12, 1 / 16, 1 / 24, 1 / 32)
    cells_per_period: int = MIN_CELLS_PER_PERIOD
    x3_cells: int = 64
    name: str = "custom"

    def __post_init__(self):
        n = self.A.dimension
        if n not in (2, 3):
            raise DomainError("Dirichlet experiments need n in {2, 3}")
        if self.cells_per_period < MIN_CELLS_PER_PERIOD:
            raise DomainError(f"need at least {MIN_CELLS_PER_PERIOD} cells per period")
        ms = [period_count(e) for e in self.epsilons]
        if any(b >= a for a, b in zip(ms[::-1], ms[-2::-1])):
            raise DomainError("epsilons must be strictly decreasing")
        for name, expr in (("f", self.f), ("g", self.g)):
            parse(expr, [f"x{i + 1}" for i in range(n)])

    @property
    def dimension(self):
        return self.A.dimension

    def cells(self, eps):
        """Cells per axis for a given eps."""
        m = period_count(eps)
        M = self.cells_per_period * m
        shape = [M] * self.dimension
        if self.dimension == 3 and y3_independent(self.A):
            shape[2] = self.x3_cells
        return tuple(shape)

    def to_dict(self):
        return {"name": self.name, "dimension": self.dimension, "f": self.f, "g": self.g,
                "epsilons": list(self.epsilons), "cells_per_period": self.cells_per_period,
                "x3_cells": self.x3_cells, "A": self.A.to_json_obj()}


def period_count(eps):
    """Integer m with eps = 1/m; raises :class:`DomainError` otherwise."""
    m = round(1.0 / eps)
    if m < 4 or abs(1.0 / m - eps) > 1e-12:
        raise DomainError(f"eps = {eps!r} is not 1/m with integer m >= 4")
    return m


def y3_independent(A, tol=1e-13):
    if A.dimension != 3:
        return False
    K = 8
    for _, f in A.items():
        v = f.sample(K)
        if np.abs(v - v[:, :, :1]).max() > tol * max(1.0, np.abs(v).max()):
            return False
    return True


# -- stencils ----------------------------------------------------------------------------

def _second(M, h):
    """Dirichlet second difference on the M-1 interior nodes."""
    k = M - 1
    return sps.diags([np.ones(k - 1), -2.0 * np.ones(k), np.ones(k - 1)], [-1, 0, 1]) / h**2


def _central(M, h):
    k = M - 1
    return sps.diags([-np.ones(k - 1), np.ones(k - 1)], [-1, 1]) / (2.0 * h)


def _kron_axes(ops):
    out = ops[0]
    for op in ops[1:]:
        out = sps.kron(out, op, format="csr")
    return sps.csr_matrix(out)


def assemble(coeffs, cells):
    """Sparse matrix of ``sum a_kl D_kl`` on interior nodes.

    ``coeffs[(k, l)]`` are arrays over interior nodes (or scalars);
    ``cells`` the number of cells per axis.
    """
    hs = [1.0 / M for M in cells]
    eye = [sps.identity(M - 1, format="csr") for M in cells]
    size = int(np.prod([M - 1 for M in cells]))
    L = sps.csr_matrix((size, size))
    for (k, l), a in coeffs.items():
        if np.isscalar(a) and a == 0.0:
            continue
        ops = list(eye)
        if k == l:
            ops[k] = _second(cells[k], hs[k])
            w = 1.0
        else:
            ops[k] = _central(cells[k], hs[k])
            ops[l] = _central(cells[l], hs[l])
            w = 2.0
        D = _kron_axes(ops)
        diag = np.broadcast_to(np.asarray(a, dtype=float), tuple(M - 1 for M in cells)).ravel()
        L = L + sps.diags(w * diag) @ D
    return L.tocsc()


def apply_stencil(coeffs, u, cells):
    """``sum a_kl D_kl u`` at interior nodes for u given on the full grid."""
    n = len(cells)
    hs = [1.0 / M for M in cells]
    inner = tuple(slice(1, -1) for _ in range(n))

    def shifted(shifts):
        return u[tuple(slice(1 + s, u.shape[i] - 1 + s) for i, s in enumerate(shifts))]

    out = np.zeros(tuple(M - 1 for M in cells))
    for (k, l), a in coeffs.items():
        if np.isscalar(a) and a == 0.0:
            continue
        if k == l:
            e = [0] * n
            e[k] = 1
            em = [-x for x in e]
            d = (shifted(e) - 2.0 * u[inner] + shifted(em)) / hs[k] ** 2
            out += a * d
        else:
            def s(sk, sl):
                e = [0] * n
                e[k], e[l] = sk, sl
                return shifted(e)
            d = (s(1, 1) - s(1, -1) - s(-1, 1) + s(-1, -1)) / (4.0 * hs[k] * hs[l])
            out += 2.0 * a * d
    return out


def _dst_solve_constant_diagonal(diag, rhs, cells):
    """Solve ``-sum d_k D_kk w = rhs`` with zero boundary values by sine transforms."""
    n = len(cells)
    hat = sfft.dstn(rhs, type=1)
    lam = np.zeros(rhs.shape)
    for k in range(n):
        M = cells[k]
        p = np.arange(1, M)
        ev = 4.0 / (1.0 / M) ** 2 * np.sin(p * np.pi / (2 * M)) ** 2
        shape = [1] * n
        shape[k] = M - 1
        lam = lam + diag[k] * ev.reshape(shape)
    return sfft.idstn(hat / lam, type=1)


def _splu(L):
    try:
        return spla.splu(L)
    except RuntimeError as exc:
        raise SingularSystemError(f"sparse factorization failed: {exc}") from exc


def solve_dirichlet(coeffs, rhs, cells, *, workers=1):
    """Solve ``-sum a_kl D_kl w = rhs`` with zero Dirichlet values.

    Chooses sine transforms for constant diagonal coefficients, a sine
    transform along x3 plus per-mode sparse factorizations when the 3D
    coefficients do not vary along x3 and have no x3 coupling, sparse direct
    factorization in 2D, and preconditioned Krylov otherwise.
    """
    n = len(cells)
    const = all(np.ndim(a) == 0 or np.ptp(a) == 0.0 for a in coeffs.values())
    offdiag = any(k != l and np.any(np.asarray(a) != 0.0) for (k, l), a in coeffs.items())
    if const and not offdiag:
        diag = [float(np.asarray(coeffs.get((k, k), 0.0)).flat[0]) for k in range(n)]
        return _dst_solve_constant_diagonal(diag, rhs, cells)
    if n == 2:
        if max(cells) > MAX_CELLS_2D:
            raise DomainError(f"2D grid above {MAX_CELLS_2D} cells per axis")
        lu = _splu(-assemble(coeffs, cells))
        return lu.solve(rhs.ravel()).reshape(rhs.shape)
    if _x3_separable(coeffs):
        return _solve_x3_modes(coeffs, rhs, cells, workers)
    if max(cells) > MAX_CELLS_3D:
        raise DomainError(f"3D grid above {MAX_CELLS_3D} cells per axis")
    return _krylov_solve(-assemble(coeffs, cells), rhs)


def _x3_separable(coeffs):
    for (k, l), a in coeffs.items():
        a = np.asarray(a)
        if k != l and 2 in (k, l) and np.any(a != 0.0):
            return False
        if a.ndim == 3 and np.ptp(a, axis=2).max() > 0.0:
            return False
    return True


def _solve_x3_modes(coeffs, rhs, cells, workers=1):
    M1, M2, M3 = cells
    shape2 = (M1 - 1, M2 - 1)

    def plane(a):
        a = np.asarray(a, dtype=float)
        return a[:, :, 0] if a.ndim == 3 else np.broadcast_to(a, shape2)

    c2 = {kl: plane(a) for kl, a in coeffs.items() if 2 not in kl}
    a33 = plane(coeffs.get((2, 2), 0.0))
    L2 = assemble(c2, (M1, M2))
    hat = sfft.dst(rhs, type=1, axis=2)
    p = np.arange(1, M3)
    lam = 4.0 * M3**2 * np.sin(p * np.pi / (2 * M3)) ** 2
    A33 = sps.diags(a33.ravel())
    out = np.empty_like(hat)

    def one(i):
        lu = _splu((-L2 + lam[i] * A33).tocsc())
        out[:, :, i] = lu.solve(np.ascontiguousarray(hat[:, :, i]).ravel()).reshape(shape2)

    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(workers) as ex:
            list(ex.map(one, range(M3 - 1)))
    else:
        for i in range(M3 - 1):
            one(i)
    return sfft.idst(out, type=1, axis=2)


def _krylov_solve(L, rhs, tol=1e-12):
    import pyamg

    ml = pyamg.smoothed_aggregation_solver(L.tocsr(), symmetry="nonsymmetric")
    x, info = spla.gmres(L, rhs.ravel(), M=ml.aspreconditioner(), rtol=tol, restart=50,
                         maxiter=200)
    if info != 0:
        raise SingularSystemError(f"preconditioned GMRES did not converge (info={info})")
    return x.reshape(rhs.shape)


# -- grids and data --------------------------------------------------------------------

def node_coords(cells):
    axes = [np.linspace(0.0, 1.0, M + 1) for M in cells]
    return np.meshgrid(*axes, indexing="ij")


def _interior(arr):
    return arr[tuple(slice(1, -1) for _ in range(arr.ndim))]


def oscillating_coeffs(A, eps, cells):
    """Values of ``A(x/eps)`` at interior nodes.

    Every axis carries ``cells[0] / m`` nodes per period, except a coarse x3
    axis for fields independent of y3.
    """
    m = period_count(eps)
    n = A.dimension
    per = cells[0] // m
    aligned = all(M == per * m for M in cells)
    out = {}
    for (k, l), f in A.items():
        if f.is_zero():
            continue
        vals = f.sample(per)
        if aligned:
            full = np.tile(vals, (m + 1,) * n)[tuple(slice(0, M + 1) for M in cells)]
        else:
            plane = np.tile(vals[..., 0], (m + 1, m + 1))[: cells[0] + 1, : cells[1] + 1]
            full = np.broadcast_to(plane[..., None], tuple(M + 1 for M in cells))
        out[(k, l)] = np.ascontiguousarray(_interior(full))
    return out


def _eval(expr, n, cells):
    coords = node_coords(cells)
    return compile_expression(expr, [f"x{i + 1}" for i in range(n)])(*coords)


# -- lattice homogenization --------------------------------------------------------------

@dataclass(frozen=True)
class LatticeData:
    """Homogenization data of the periodic finite-difference cell problems."""

    cells_per_period: int
    measure: np.ndarray
    effective: np.ndarray
    c: np.ndarray
    cells: dict = field(compare=False, repr=False, default_factory=dict)

    def contract(self, third):
        return float(np.einsum("jkl,jkl->", self.c, third))


def _periodic_ops(K, n):
    h = 1.0 / K
    e = np.ones(K)
    T = sps.diags([e[:-1], -2 * e, e[:-1]], [-1, 0, 1], format="lil")
    T[0, K - 1] = T[K - 1, 0] = 1.0
    C = sps.diags([-e[:-1], e[:-1]], [-1, 1], format="lil")
    C[0, K - 1], C[K - 1, 0] = -1.0, 1.0
    S = sps.diags([e[:-1], e[:-1]], [-1, 1], format="lil")  # neighbour sum
    S[0, K - 1] = S[K - 1, 0] = 1.0
    I = sps.identity(K, format="csr")
    return T.tocsr() / h**2, C.tocsr() / (2 * h), S.tocsr() * 0.5, I


def lattice_homogenization(A, K=MIN_CELLS_PER_PERIOD, planar=None):
    """Density, effective matrix and tensor of the periodic FD operator.

    ``planar`` (default: detected) treats a 3D field independent of y3 on a
    two-dimensional lattice with the third direction continuous.
    """
    n = A.dimension
    if planar is None:
        planar = n == 3 and y3_independent(A)
    m = 2 if planar else n
    T, C, S, I = _periodic_ops(K, m)

    def op(axis_ops):
        mats = [axis_ops.get(i, I) for i in range(m)]
        return _kron_axes(mats)

    vals = {}
    for (k, l), f in A.items():
        v = f.sample(K)
        if planar:
            v = v[..., 0]
        vals[(k, l)] = v.ravel()
    L = sps.csr_matrix((K**m, K**m))
    for (k, l), a in vals.items():
        if k >= m or l >= m:
            continue
        if k == l:
            L = L + sps.diags(a) @ op({k: T})
        else:
            L = L + 2.0 * sps.diags(a) @ op({k: C, l: C})
    size = K**m
    ones = np.ones((size, 1))
    border = sps.bmat([[L.T, sps.csr_matrix(ones)], [sps.csr_matrix(ones.T), None]], format="csc")
    rhs = np.zeros(size + 1)
    rhs[-1] = size
    sol = spla.spsolve(border, rhs)
    r = sol[:size]
    if r.min() <= 0.0:
        raise SingularSystemError("lattice density is not positive")
    eff = np.zeros((n, n))
    for (k, l), a in vals.items():
        eff[k, l] = eff[l, k] = float(np.mean(r * a))
    lu = spla.splu(sps.bmat([[L, sps.csr_matrix(ones)], [sps.csr_matrix(ones.T), None]],
                            format="csc"))
    cells = {}
    for k in range(n):
        for l in range(k, n):
            a = vals.get((k, l), np.zeros(size))
            b = np.concatenate([-(a - eff[k, l]), [0.0]])
            cells[(k, l)] = lu.solve(b)[:size]
    # gradient-like operators from the first-order terms of the stencils
    G = {}
    for j in range(m):
        for q in range(m):
            G[(j, q)] = op({j: C}) if j == q else op({q: C, j: S})
    c = np.zeros((n, n, n))
    for j in range(n):
        for k in range(n):
            for l in range(k, n):
                total = 0.0
                for q in range(m):
                    a = vals.get((min(j, q), max(j, q)))
                    if a is None or j >= m:
                        continue
                    total += float(np.mean(r * a * (G[(j, q)] @ cells[(k, l)])))
                c[j, k, l] = c[j, l, k] = total
    shape = (K,) * m
    return LatticeData(K, r.reshape(shape), eff, c,
                       {kl: v.reshape(shape) for kl, v in cells.items()})


# -- solves ------------------------------------------------------------------------------

@dataclass(frozen=True)
class GridSolution:
    eps: float | None
    cells: tuple
    values: np.ndarray

    def interior_mask(self, box=INTERIOR):
        coords = node_coords(self.cells)
        mask = np.ones(self.values.shape, dtype=bool)
        for x in coords:
            mask &= (x >= box[0] - 1e-12) & (x <= box[1] + 1e-12)
        return mask


def _check_contrast(A):
    if not A.is_diagonal() and A.contrast() < MIN_CONTRAST:
        raise DomainError(f"ellipticity contrast {A.contrast():.3g} below {MIN_CONTRAST} "
                          "for a field with mixed derivatives")


def _dirichlet_solve(coeffs, f_vals, g_full, cells, workers=1):
    rhs = f_vals + apply_stencil(coeffs, g_full, cells)
    w = solve_dirichlet(coeffs, rhs, cells, workers=workers)
    u = g_full.copy()
    u[tuple(slice(1, -1) for _ in cells)] += w
    return u


def solve_oscillatory(spec, eps, workers=1):
    """FD solution of ``-A(x/eps) : D^2 u = f``, ``u = g`` on the boundary."""
    _check_contrast(spec.A)
    n = spec.dimension
    cells = spec.cells(eps)
    coeffs = oscillating_coeffs(spec.A, eps, cells)
    f = _interior(_eval(spec.f, n, cells))
    g = _eval(spec.g, n, cells)
    return GridSolution(eps, cells, _dirichlet_solve(coeffs, f, g, cells, workers))


def _const_coeffs(Abar):
    n = Abar.shape[0]
    return {(k, l): float(Abar[k, l]) for k in range(n) for l in range(k, n)
            if Abar[k, l] != 0.0 or k == l}


def solve_homogenized(spec, effective, cells):
    """FD solution of ``-Abar : D^2 u = f`` with ``u = g`` on the grid ``cells``."""
    n = spec.dimension
    f = _interior(_eval(spec.f, n, cells))
    g = _eval(spec.g, n, cells)
    return GridSolution(None, cells, _dirichlet_solve(_const_coeffs(effective), f, g, cells))


def contracted_source(spec, tensor_c, cells, u=None):
    """``sum c_j^{kl} d^3_{jkl} u`` at all nodes.

    Third derivatives come from the symbolic g when ``u`` is None (valid when
    g itself solves the homogenized problem), otherwise from finite
    differences of the discrete u.
    """
    import sympy as sp

    n = spec.dimension
    names = [f"x{i + 1}" for i in range(n)]
    c = np.asarray(tensor_c)
    coords = node_coords(cells)
    out = np.zeros(coords[0].shape)
    if u is None:
        g, syms = parse(spec.g, names)
        for j in range(n):
            for k in range(n):
                for l in range(n):
                    if c[j, k, l] == 0.0:
                        continue
                    d = sp.diff(g, syms[j], syms[k], syms[l])
                    fn = sp.lambdify(syms, d, modules="numpy")
                    out = out + c[j, k, l] * np.broadcast_to(np.asarray(fn(*coords), float),
                                                             out.shape)
        return out
    hs = [1.0 / M for M in cells]
    first = np.gradient(u.values, *hs, edge_order=2)
    for j in range(n):
        for k in range(n):
            second = np.gradient(first[j], hs[k], axis=k, edge_order=2)
            for l in range(n):
                if c[j, k, l] != 0.0:
                    out = out + c[j, k, l] * np.gradient(second, hs[l], axis=l, edge_order=2)
    return out


def is_homogenized_solution(spec, effective, tol=1e-12):
    """Whether g solves ``-Abar : D^2 g = f`` symbolically."""
    import sympy as sp

    n = spec.dimension
    names = [f"x{i + 1}" for i in range(n)]
    g, syms = parse(spec.g, names)
    f, _ = parse(spec.f, names)
    expr = -sum(float(effective[k, l]) * sp.diff(g, syms[k], syms[l])
                for k in range(n) for l in range(n)) - f
    expr = sp.expand(sp.nsimplify(expr, tolerance=tol, rational=True))
    return expr == 0


def solve_z(spec, effective, tensor_c, u):
    """FD solution of ``-Abar : D^2 z = -sum c d^3 u`` with zero boundary values."""
    cells = u.cells
    src = contracted_source(spec, tensor_c, cells, None if is_homogenized_solution(
        spec, effective) else u)
    zero = np.zeros(tuple(M + 1 for M in cells))
    z = _dirichlet_solve(_const_coeffs(effective), -_interior(src), zero, cells)
    return GridSolution(None, cells, z)


# -- rate experiments ----------------------------------------------------------------------

@dataclass(frozen=True)
class RateFit:
    slope: float
    intercept: float
    residual: float

    @property
    def usable(self):
        return self.residual < 0.05


def fit_rate(eps, errors):
    """Least-squares slope of log(error) against log(eps); RMS residual.

    Returns an unusable fit (nan slope, infinite residual) when some error
    is not positive, e.g. for a constant coefficient where u^eps = u.
    """
    errors = np.asarray(errors, dtype=float)
    if not np.all(errors > 0.0):
        return RateFit(float("nan"), float("nan"), float("inf"))
    x = np.log(np.asarray(eps, dtype=float))
    y = np.log(errors)
    slope, intercept = np.polyfit(x, y, 1)
    resid = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    return RateFit(float(slope), float(intercept), resid)


@dataclass(frozen=True)
class RateExperiment:
    spec_name: str
    epsilons: tuple
    errors_u: tuple
    errors_z: tuple
    fit_u: RateFit
    fit_z: RateFit
    flags: tuple
    interior: bool
    lattice: LatticeData | None = field(default=None, compare=False, repr=False)
    reports: tuple = ()

    @property
    def fitted_rate_u(self):
        return self.fit_u.slope

    @property
    def fitted_rate_z(self):
        return self.fit_z.slope

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["epsilon", "error_u", "error_z"])
        for e, a, b in zip(self.epsilons, self.errors_u, self.errors_z):
            w.writerow([repr(float(e)), repr(float(a)), repr(float(b))])
        return buf.getvalue()

    def to_dict(self):
        return {
            "spec": self.spec_name, "interior": self.interior,
            "epsilons": list(self.epsilons), "errors_u": list(self.errors_u),
            "errors_z": list(self.errors_z),
            "fitted_rate_u": self.fit_u.slope, "fit_residual_u": self.fit_u.residual,
            "fitted_rate_z": self.fit_z.slope, "fit_residual_z": self.fit_z.residual,
            "flags": list(self.flags),
            "lattice_effective": None if self.lattice is None else self.lattice.effective.tolist(),
            "reports": list(self.reports),
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _is_constant(A):
    return all(float(np.ptp(f.sample(8))) == 0.0 for _, f in A.items())


def run_rate_experiment(spec, interior=True, workers=1):
    """Errors of ``u^eps - u`` and ``u^eps - u + 2 eps z`` over the eps list."""
    if len(spec.epsilons) < 4:
        raise DomainError("rate fits need at least 4 values of eps")
    lat = lattice_homogenization(spec.A, spec.cells_per_period)
    errs_u, errs_z, reports = [], [], []
    for eps in spec.epsilons:
        ue = solve_oscillatory(spec, eps, workers=workers)
        u = solve_homogenized(spec, lat.effective, ue.cells)
        z = solve_z(spec, lat.effective, lat.c, u)
        mask = ue.interior_mask() if interior else np.ones(ue.values.shape, dtype=bool)
        du = ue.values - u.values
        errs_u.append(float(np.abs(du[mask]).max()))
        errs_z.append(float(np.abs((du + 2.0 * eps * z.values)[mask]).max()))
        reports.append({"epsilon": eps, "cells": list(ue.cells)})
    flags = []
    if _is_constant(spec.A):
        flags.append("Degenerate")
    if any(b > a for a, b in zip(errs_u, errs_u[1:])):
        flags.append("NonMonotone")
    return RateExperiment(spec.name, tuple(spec.epsilons), tuple(errs_u), tuple(errs_z),
                          fit_rate(spec.epsilons, errs_u), fit_rate(spec.epsilons, errs_z),
                          tuple(flags), interior, lat, tuple(reports))


# -- presets ------------------------------------------------------------------------------

def preset(name):
    """Named Dirichlet experiments built on gallery fields."""
    from . import constructions as cons

    if name == "rate_example_3d":
        e = cons.gallery("rate_example_3d")
        return BvpSpec(e.field, f=e.bvp["f"], g=e.bvp["g"], epsilons=tuple(e.bvp["epsilons"]),
                       name=name)
    if name == "diagonal_harmonic_2d":
        e = cons.gallery("st_2d")
        return BvpSpec(e.field, f="0", g="x1**3 + x2**3", name=name)
    if name == "constant_2d":
        from .field import constant_field

        A = CoefficientField({(0, 0): constant_field(2, 1.0, 16), (1, 1): 2.0}, 2, 16)
        return BvpSpec(A, f="1", g="x1**3 + x2**3", epsilons=(1 / 4, 1 / 5, 1 / 6, 1 / 8),
                       name=name)
    raise UnknownName(f"unknown preset {name!r}; known: {', '.join(PRESETS)}")


PRESETS = ("rate_example_3d", "diagonal_harmonic_2d", "constant_2d")
