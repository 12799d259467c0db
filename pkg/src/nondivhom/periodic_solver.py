"""Spectral solvers for the periodic problems of non-divergence homogenization.

Both the forward operator ``v -> A : D^2 v`` and its formal adjoint
``r -> D^2 : (r A)`` are discretized by a Fourier-Galerkin method on the modes
``|k_i| <= N/2 - 1``.  Coefficient products are formed on a doubled grid, so
the two discrete operators are exact adjoints of each other and the discrete
Fredholm alternative holds to roundoff.

Linear systems are solved with restarted GMRES, left-preconditioned by the
inverse of the constant-coefficient operator with the mean of ``A``.  A small
dense Galerkin assembly, independent of the FFT machinery, serves as an oracle
at low resolution.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
import scipy.linalg as sla
from scipy.sparse.linalg import LinearOperator, gmres

from . import _fourier as fr
from .errors import CompatibilityError, ConvergenceError, PositivityError
from .field import CoefficientField, PeriodicScalarField, field_from_coeffs, field_from_values

#: Residual target, relative to :meth:`GalerkinOperator.residual_scale`.
DEFAULT_TOL = 1e-11
#: Fraction of the operator norm below which residuals are pure roundoff.
ROUNDOFF_FLOOR = 1e-4
#: Tolerated solvability defect before a cell problem is rejected.
COMPATIBILITY_TOL = 1e-8
GMRES_RESTART = 50
GMRES_MAXITER = 500
DENSE_MAX_RESOLUTION = 24


@dataclass(frozen=True)
class SolveReport:
    """Diagnostics of one periodic solve.

    ``residual_linf`` is the sup norm of the discrete residual on the grid,
    ``compatibility_defect`` the constant removed from the right-hand side to
    make it solvable (zero for the invariant measure).
    """

    residual_linf: float
    iterations: int
    compatibility_defect: float
    resolution_used: int

    def to_dict(self):
        return asdict(self)


class GalerkinOperator:
    """FFT-based Galerkin discretization of ``A : D^2`` at resolution N."""

    def __init__(self, A: CoefficientField, N: int):
        self.n = A.dimension
        self.N = N
        self.M = 2 * N
        A = A.at_resolution(N)
        n, M = self.n, self.M
        ks = fr.wavenumbers(N, n)
        self.terms = []
        for k in range(n):
            for l in range(k, n):
                f = A.entry(k, l)
                if f.is_zero():
                    continue
                vals = fr.backward(fr.resample(f.coeffs, N, M), M)
                weight = 1.0 if k == l else 2.0
                hess = -4.0 * np.pi**2 * ks[k] * ks[l] * weight
                self.terms.append((k, l, vals, hess))
        self.mean = A.mean()
        symbol = np.zeros((N,) * (n - 1) + (N // 2 + 1,))
        for k in range(n):
            for l in range(n):
                symbol = symbol - 4.0 * np.pi**2 * self.mean[k, l] * ks[k] * ks[l]
        mask = fr.kept_mask(N, n).copy()
        mask.flat[0] = False
        inv = np.zeros_like(symbol)
        inv[mask] = 1.0 / symbol[mask]
        self._inv_symbol = inv
        self.shape = (N,) * n

    def apply(self, c):
        """Coefficients of ``P_N(A : D^2 v)`` for coefficients ``c`` of v."""
        N, M = self.N, self.M
        acc = np.zeros((M,) * self.n)
        for _, _, vals, hess in self.terms:
            acc += vals * fr.backward(fr.resample(hess * c, N, M), M)
        return fr.resample(fr.forward(acc), M, N)

    def apply_adjoint(self, c):
        """Coefficients of ``P_N(D^2 : (r A))`` for coefficients ``c`` of r."""
        N, M = self.N, self.M
        rv = fr.backward(fr.resample(c, N, M), M)
        out = np.zeros_like(c)
        for _, _, vals, hess in self.terms:
            out += hess * fr.resample(fr.forward(rv * vals), M, N)
        return out

    @property
    def norm(self):
        """Upper bound for the sup-norm gain of the discrete operator."""
        K = self.N // 2 - 1
        amax = sum(float(np.abs(vals).max()) * (1.0 if k == l else 2.0)
                   for k, l, vals, _ in self.terms)
        return amax * (2.0 * np.pi * K) ** 2

    def residual_scale(self, rhs_norm):
        """Scale for residual targets: the rhs size, floored by the roundoff level.

        FFT roundoff in the highest kept modes is amplified by ``(2 pi K)^2``,
        so an absolute residual target is unattainable at large N.
        """
        return max(1.0, rhs_norm, ROUNDOFF_FLOOR * self.norm)

    def precondition(self, c):
        return self._inv_symbol * c


def _norm_inf(c, N):
    return float(np.abs(fr.backward(c, N)).max())


def _krylov(op, apply, rhs, tol, x0=None):
    """Solve ``apply(x) = rhs`` up to constants; x has zero mean.

    Returns coefficients, total iterations and the sup-norm residual of
    ``apply(x) - rhs`` (the constant part included).  ``x0`` is an optional
    initial guess in coefficient form.
    """
    N, n = op.N, op.n
    size = N**n
    shape = op.shape

    def mv(x):
        return fr.backward(op.precondition(apply(fr.forward(x.reshape(shape)))), N).ravel()

    lin = LinearOperator((size, size), matvec=mv, dtype=float)
    if x0 is None:
        x = np.zeros_like(rhs)
        target = rhs
    else:
        x = x0.copy()
        x.flat[0] = 0.0
        target = rhs - apply(x)
        if _norm_inf(target, N) <= tol:
            return x, 0, _norm_inf(target, N)
    iterations = 0
    residual = math.inf
    for _ in range(4):
        b = fr.backward(op.precondition(target), N).ravel()
        bnorm = float(np.linalg.norm(b))
        if bnorm == 0.0:
            res = apply(x) - rhs
            residual = _norm_inf(res, N)
            break
        count = [0]

        def cb(_):
            count[0] += 1

        budget = GMRES_MAXITER - iterations
        if budget <= 0:
            break
        # ask GMRES only for the reduction that the true residual still needs
        need = tol / max(_norm_inf(target, N), 1e-300)
        rtol = min(1e-2, max(1e-13, 1e-2 * need))
        dx, _info = gmres(lin, b, rtol=rtol, atol=0.0, restart=GMRES_RESTART,
                          maxiter=max(1, math.ceil(budget / GMRES_RESTART)),
                          callback=cb, callback_type="pr_norm")
        iterations += count[0]
        x = x + fr.forward(dx.reshape(shape))
        x.flat[0] = 0.0
        res = apply(x) - rhs
        residual = _norm_inf(res, N)
        if residual <= tol:
            break
        target = -res
    return x, iterations, residual


def _initial(guess, N):
    if guess is None:
        return None
    return guess.at_resolution(N).coeffs if guess.resolution != N else guess.coeffs


def solve_invariant_measure(A, N=None, tol=DEFAULT_TOL, *, operator=None, initial=None):
    """Periodic density r > 0 with ``D^2 : (r A) = 0`` and mean one.

    ``initial`` may carry a density from a coarser solve as starting guess.

    Returns ``(r, SolveReport)``.  Raises :class:`ConvergenceError` if the
    residual target is missed and :class:`PositivityError` if the computed
    density is not positive on the grid.
    """
    op = operator or GalerkinOperator(A, N if N is not None else A.resolution)
    N = op.N
    one = np.zeros((N,) * (op.n - 1) + (N // 2 + 1,), dtype=complex)
    one.flat[0] = 1.0
    rhs = -op.apply_adjoint(one)
    scale = op.residual_scale(_norm_inf(rhs, N))
    x0 = _initial(initial, N)
    if x0 is not None:
        x0 = x0.copy()
        x0.flat[0] = 0.0
    s, its, _ = _krylov(op, op.apply_adjoint, rhs, tol * scale, x0)
    r = s.copy()
    r.flat[0] = 1.0
    residual = _norm_inf(op.apply_adjoint(r), N)
    report = SolveReport(residual, its, 0.0, N)
    if residual > tol * scale:
        raise ConvergenceError(f"invariant measure residual {residual:.3g} above "
                               f"{tol * scale:.3g} after {its} iterations")
    field = field_from_coeffs(r, N)
    if field.min() <= 0.0:
        raise PositivityError(f"invariant measure has minimum {field.min():.3g}")
    return field, report


def _rhs_coeffs(rhs, N):
    if isinstance(rhs, PeriodicScalarField):
        return rhs.at_resolution(N).coeffs
    return np.asarray(rhs)


def solve_cell(A, r, rhs, N=None, tol=DEFAULT_TOL, *, strict=True, operator=None,
               initial=None):
    """Mean-zero v with ``-A : D^2 v = rhs - c``, where c = integral of r*rhs.

    ``c`` is the solvability defect; it is reported in the returned
    :class:`SolveReport`.  With ``strict`` (default) a defect above
    :data:`COMPATIBILITY_TOL` raises :class:`CompatibilityError`.
    """
    op = operator or GalerkinOperator(A, N if N is not None else A.resolution)
    N = op.N
    b = _rhs_coeffs(rhs, N)
    rc = _rhs_coeffs(r, N)
    defect = fr.inner(rc, b) / rc.flat[0].real
    scale = op.residual_scale(_norm_inf(b, N))
    if strict and abs(defect) > COMPATIBILITY_TOL * max(1.0, _norm_inf(b, N)):
        raise CompatibilityError(f"right-hand side violates solvability by {defect:.3g}",
                                 defect=abs(defect))
    target = -b.copy()
    target.flat[0] += defect
    v, its, residual = _krylov(op, op.apply, target, tol * scale, _initial(initial, N))
    report = SolveReport(residual, its, abs(defect), N)
    if residual > tol * scale:
        raise ConvergenceError(f"cell residual {residual:.3g} above {tol * scale:.3g}")
    return field_from_coeffs(v, N), report


def solve_with_shift(A, rhs, N=None, tol=DEFAULT_TOL, *, operator=None):
    """Mean-zero w and constant c with ``-A : D^2 w = rhs - c``.

    The constant is found by the solver itself, without the invariant
    measure; returns ``(w, c, SolveReport)``.
    """
    op = operator or GalerkinOperator(A, N if N is not None else A.resolution)
    N = op.N
    b = _rhs_coeffs(rhs, N)
    scale = op.residual_scale(_norm_inf(b, N))
    target = -b
    w, its, _ = _krylov(op, op.apply, target, math.inf)
    res = op.apply(w) - target
    shift = float(res.flat[0].real)
    res.flat[0] = 0.0
    residual = _norm_inf(res, N)
    if residual > tol * scale:
        # one refinement pass on the non-constant part
        dw, its2, _ = _krylov(op, op.apply, -res, tol * scale)
        w = w + dw
        its += its2
        res = op.apply(w) - target
        shift = float(res.flat[0].real)
        res.flat[0] = 0.0
        residual = _norm_inf(res, N)
    report = SolveReport(residual, its, 0.0, N)
    if residual > tol * scale:
        raise ConvergenceError(f"residual {residual:.3g} above {tol * scale:.3g}")
    # A:D^2 w + b = shift, i.e. -A:D^2 w = rhs - shift
    return field_from_coeffs(w, N), shift, report


def solve_poisson(rhs, N=None):
    """Mean-zero w with ``-Laplace w = rhs`` by exact spectral division.

    Term-list inputs give term-list outputs.  Raises
    :class:`CompatibilityError` unless ``rhs`` has zero mean (1e-12).
    """
    N = rhs.resolution if N is None else N
    mean = rhs.mean()
    if abs(mean) > 1e-12 * max(1.0, rhs.sup_norm()):
        raise CompatibilityError(f"Poisson right-hand side has mean {mean:.3g}", defect=abs(mean))
    n = rhs.dimension
    if rhs.terms is not None:
        from .field import WaveTerm, field_from_terms

        out = []
        for t in rhs.terms:
            k2 = sum(c * c for c in t.wavevector)
            if k2 == 0:
                continue
            out.append(WaveTerm(t.wavevector, t.phase, t.amplitude / (4.0 * np.pi**2 * k2)))
        return field_from_terms(n, out, rhs.resolution if N is None else N)
    ks = fr.wavenumbers(N, n)
    k2 = sum(k * k for k in ks).astype(float)
    k2.flat[0] = 1.0
    c = rhs.at_resolution(N).coeffs / (4.0 * np.pi**2 * k2)
    c.flat[0] = 0.0
    return field_from_coeffs(c, N)


# -- dense oracle -------------------------------------------------------------------

def _modes(N, n):
    K = N // 2 - 1
    rng = np.arange(-K, K + 1)
    return np.array(np.meshgrid(*([rng] * n), indexing="ij")).reshape(n, -1).T


def dense_galerkin_matrix(A, N):
    """Complex Galerkin matrix of ``A : D^2`` on modes ``|k_i| <= N/2 - 1``.

    Built entry by entry from the Fourier coefficients of A by discrete
    convolution; no FFT-based product is involved.  Returns ``(L, modes)``.
    Limited to ``N <= 24`` and ``n <= 2``.
    """
    n = A.dimension
    if n > 2 or N > DENSE_MAX_RESOLUTION:
        raise ValueError("dense oracle is limited to n <= 2 and N <= 24")
    A = A.at_resolution(N)
    K = N // 2 - 1
    modes = _modes(N, n)
    D = modes[:, None, :] - modes[None, :, :]
    inside = np.all(np.abs(D) <= K, axis=-1)
    idx = tuple((D[..., i] % N) for i in range(n))
    L = np.zeros((len(modes), len(modes)), dtype=complex)
    for a in range(n):
        for b in range(n):
            hat = np.fft.fftn(A.entry(a, b).values) / N**n
            symbol = -4.0 * np.pi**2 * modes[:, a] * modes[:, b]
            L += np.where(inside, hat[idx], 0.0) * symbol[None, :]
    return L, modes


def _to_field(vec, modes, N):
    n = modes.shape[1]
    full = np.zeros((N,) * n, dtype=complex)
    full[tuple((modes[:, i] % N) for i in range(n))] = vec
    vals = np.fft.ifftn(full * N**n)
    return field_from_values(vals.real), float(np.abs(vals.imag).max())


def dense_invariant_measure(A, N):
    """Invariant measure from the null vector of the dense adjoint matrix.

    Returns ``(r, singular_values)`` where the two smallest singular values of
    the adjoint matrix are reported (the first should vanish).
    """
    L, modes = dense_galerkin_matrix(A, N)
    _, s, vh = sla.svd(L.conj().T)
    null = vh[-1].conj()
    zero = int(np.flatnonzero(np.all(modes == 0, axis=1))[0])
    null = null / null[zero]
    r, _ = _to_field(null, modes, N)
    return r, (float(s[-1]), float(s[-2]))


def dense_cell_solve(A, rhs, N):
    """Mean-zero v with ``-A : D^2 v = rhs - c`` by dense least squares."""
    L, modes = dense_galerkin_matrix(A, N)
    n = A.dimension
    full = np.fft.fftn(rhs.at_resolution(N).values) / N**n
    b = -full[tuple((modes[:, i] % N) for i in range(n))]
    zero = int(np.flatnonzero(np.all(modes == 0, axis=1))[0])
    # unknowns: v-hat on all modes plus the constant c; the mean of v is pinned
    P = len(modes)
    big = np.zeros((P + 1, P + 1), dtype=complex)
    big[:P, :P] = L
    big[zero, P] = -1.0
    big[P, zero] = 1.0
    rhs_vec = np.concatenate([b, [0.0]])
    sol = np.linalg.solve(big, rhs_vec)
    v, _ = _to_field(sol[:P], modes, N)
    return v, float(sol[P].real)
