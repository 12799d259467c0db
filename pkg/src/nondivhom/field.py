"""Periodic scalar and symmetric-matrix fields on the unit torus T^n.

A :class:`PeriodicScalarField` is a real 1-periodic function known through
a pointwise sampler together with a working resolution ``N``.  Its grid
``values`` are those of the Galerkin projection onto the modes
``|k_i| <= N/2 - 1``.  Fields built from a finite list of :class:`WaveTerm`
objects additionally keep the exact term list, which products preserve.

Products of projected fields are formed on a grid twice as fine and then
truncated, so no aliased energy ever reaches the kept modes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from . import _fourier as fr
from .errors import AliasError, CanonicalError, EllipticityError

#: Largest resolution per axis, indexed by dimension.
RESOLUTION_CAP = {1: 1 << 16, 2: 2048, 3: 256}

#: Term lists longer than this are dropped in products (the field stays exact
#: through its sampler; only the symbolic bookkeeping is abandoned).
MAX_TERMS = 4096

PHASES = ("cos", "sin")


def _check_resolution(N, n):
    if n not in RESOLUTION_CAP:
        raise ValueError(f"dimension must be 1, 2 or 3, got {n}")
    if not fr.is_power_of_two(N):
        raise ValueError(f"resolution must be a power of two, got {N}")
    if N > RESOLUTION_CAP[n]:
        raise AliasError(f"resolution {N} exceeds the cap {RESOLUTION_CAP[n]} for n={n}")


@dataclass(frozen=True)
class WaveTerm:
    """``amplitude * phase(2 pi k . y)`` in canonical orientation.

    The leading nonzero component of ``wavevector`` is made positive on
    construction; for sin terms the sign change is absorbed in the amplitude.
    """

    wavevector: tuple
    phase: str
    amplitude: float

    def __post_init__(self):
        k = tuple(int(c) for c in self.wavevector)
        if self.phase not in PHASES:
            raise CanonicalError(f"phase must be 'cos' or 'sin', got {self.phase!r}")
        if self.phase == "sin" and not any(k):
            raise CanonicalError("a sin term needs a nonzero wavevector")
        amp = float(self.amplitude)
        lead = next((c for c in k if c), 0)
        if lead < 0:
            k = tuple(-c for c in k)
            if self.phase == "sin":
                amp = -amp
        object.__setattr__(self, "wavevector", k)
        object.__setattr__(self, "amplitude", amp)

    @property
    def dimension(self):
        return len(self.wavevector)

    @property
    def bandwidth(self):
        return max((abs(c) for c in self.wavevector), default=0)

    def evaluate(self, coords):
        theta = 2.0 * np.pi * sum(k * y for k, y in zip(self.wavevector, coords))
        trig = np.cos if self.phase == "cos" else np.sin
        return self.amplitude * trig(theta)

    def to_dict(self):
        return {"k": list(self.wavevector), "phase": self.phase, "amp": self.amplitude}


def _term(k, phase, amp):
    if phase == "sin" and not any(k):
        return None
    return WaveTerm(tuple(k), phase, amp)


def merge_terms(terms):
    """Combine like terms and drop exact zeros; deterministic order."""
    acc = {}
    for t in terms:
        if t is None:
            continue
        key = (t.wavevector, t.phase)
        acc[key] = acc.get(key, 0.0) + t.amplitude
    out = [WaveTerm(k, p, a) for (k, p), a in acc.items() if a != 0.0]
    out.sort(key=lambda t: (sum(abs(c) for c in t.wavevector), t.wavevector, t.phase))
    return tuple(out)


def _term_product(t1, t2):
    k1, k2 = np.array(t1.wavevector), np.array(t2.wavevector)
    plus, minus = tuple(k1 + k2), tuple(k1 - k2)
    h = 0.5 * t1.amplitude * t2.amplitude
    p1, p2 = t1.phase, t2.phase
    if p1 == "cos" and p2 == "cos":
        return [_term(minus, "cos", h), _term(plus, "cos", h)]
    if p1 == "sin" and p2 == "sin":
        return [_term(minus, "cos", h), _term(plus, "cos", -h)]
    if p1 == "sin":
        return [_term(plus, "sin", h), _term(minus, "sin", h)]
    return [_term(plus, "sin", h), _term(minus, "sin", -h)]


def _evaluate_terms(terms, coords, shape):
    out = np.zeros(shape)
    for t in terms:
        out += t.evaluate(coords)
    return out


class PeriodicScalarField:
    """Real periodic field on T^n at working resolution ``N``.

    Use the module-level constructors (:func:`field_from_terms`,
    :func:`field_from_expr`, :func:`field_from_function`,
    :func:`constant_field`) rather than calling this directly.
    """

    __slots__ = ("dimension", "resolution", "terms", "expr", "_pointwise",
                 "_coeffs", "_values", "_bandlimit")

    def __init__(self, dimension, resolution, pointwise, *, terms=None, expr=None,
                 coeffs=None, bandlimit=None):
        _check_resolution(resolution, dimension)
        self.dimension = dimension
        self.resolution = resolution
        self.terms = terms
        self.expr = expr
        self._pointwise = pointwise
        self._coeffs = coeffs
        self._values = None
        # Resolution at which the field is exactly band-limited, if any.
        self._bandlimit = bandlimit

    # -- sampling -----------------------------------------------------------

    def sample(self, M):
        """Pointwise values of the underlying function on the M^n grid."""
        return self._pointwise(M)

    @property
    def coeffs(self):
        """Normalized rfft coefficients of the projection at ``resolution``."""
        if self._coeffs is None:
            N = self.resolution
            if self._bandlimit is not None and self._bandlimit <= N:
                M = N
            elif self.terms is not None:
                M = max(N, fr.next_power_of_two(2 * (self.bandwidth + 1)))
            else:
                M = 2 * N
            c = fr.forward(self._pointwise(M))
            self._coeffs = fr.resample(c, M, N)
        return self._coeffs

    @property
    def values(self):
        if self._values is None:
            self._values = fr.backward(self.coeffs, self.resolution)
        return self._values

    @property
    def bandwidth(self):
        """Largest |k_i| carried by the field (exact for term fields)."""
        if self.terms is not None:
            return max((t.bandwidth for t in self.terms), default=0)
        if self._bandlimit is not None:
            return self._bandlimit // 2 - 1
        return self.resolution // 2 - 1

    @property
    def is_exact(self):
        return self.terms is not None

    def mean(self):
        return float(self.coeffs.flat[0].real)

    def min(self):
        return float(self.values.min())

    def max(self):
        return float(self.values.max())

    def sup_norm(self):
        return float(np.abs(self.values).max())

    def is_zero(self):
        if self.terms is not None:
            return len(self.terms) == 0
        return not np.any(self.coeffs)

    # -- resolution ---------------------------------------------------------

    def at_resolution(self, M):
        """Same underlying function, projected at resolution M."""
        if M == self.resolution:
            return self
        coeffs = None
        if self._bandlimit is not None and self._bandlimit <= min(M, self.resolution):
            coeffs = fr.resample(self.coeffs, self.resolution, M)
        return PeriodicScalarField(self.dimension, M, self._pointwise, terms=self.terms,
                                   expr=self.expr, coeffs=coeffs, bandlimit=self._bandlimit)

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, PeriodicScalarField):
            if other.dimension != self.dimension:
                raise ValueError("dimension mismatch")
            return other
        return constant_field(self.dimension, float(other), self.resolution)

    def __add__(self, other):
        return add(self, self._coerce(other))

    __radd__ = __add__

    def __neg__(self):
        return self.scale(-1.0)

    def __sub__(self, other):
        return add(self, self._coerce(other).scale(-1.0))

    def __rsub__(self, other):
        return add(self._coerce(other), self.scale(-1.0))

    def __mul__(self, other):
        if isinstance(other, PeriodicScalarField):
            return multiply(self, other)
        return self.scale(float(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, PeriodicScalarField):
            return multiply(self, other.reciprocal())
        return self.scale(1.0 / float(other))

    def __rtruediv__(self, other):
        return self.reciprocal().scale(float(other))

    def scale(self, s):
        s = float(s)
        terms = None if self.terms is None else merge_terms(
            WaveTerm(t.wavevector, t.phase, s * t.amplitude) for t in self.terms)
        pw = self._pointwise
        coeffs = None if self._coeffs is None else s * self._coeffs
        return PeriodicScalarField(self.dimension, self.resolution, lambda M: s * pw(M),
                                   terms=terms, coeffs=coeffs, bandlimit=self._bandlimit)

    def apply(self, func):
        """Pointwise ``func(field)``; the result is projected like any sampler."""
        pw = self._pointwise
        return PeriodicScalarField(self.dimension, self.resolution, lambda M: func(pw(M)))

    def reciprocal(self):
        return self.apply(lambda v: 1.0 / v)

    def embed(self, dimension):
        """Lift to T^dimension, constant along the added trailing axes."""
        if dimension < self.dimension:
            raise ValueError("cannot embed into a lower dimension")
        if dimension == self.dimension:
            return self
        n0 = self.dimension
        pw = self._pointwise
        pad = (0,) * (dimension - n0)
        terms = None if self.terms is None else tuple(
            WaveTerm(t.wavevector + pad, t.phase, t.amplitude) for t in self.terms)
        N = min(self.resolution, RESOLUTION_CAP[dimension])

        def sample(M):
            v = pw(M)
            return np.broadcast_to(v.reshape(v.shape + (1,) * (dimension - n0)),
                                   (M,) * dimension).copy()

        return PeriodicScalarField(dimension, N, sample, terms=terms,
                                   bandlimit=self._bandlimit)

    # -- exports ------------------------------------------------------------

    def to_terms(self, atol=1e-14):
        """Term list of the projection, dropping amplitudes below ``atol``."""
        if self.terms is not None:
            return self.terms
        N, n = self.resolution, self.dimension
        full = np.fft.fftn(self.values) / N**n
        K = N // 2 - 1
        out = []
        for idx in np.ndindex(*(2 * K + 1,) * n):
            k = tuple(i - K for i in idx)
            lead = next((c for c in k if c), 0)
            if lead < 0:
                continue
            ch = full[tuple(c % N for c in k)]
            if not any(k):
                if abs(ch.real) > atol:
                    out.append(WaveTerm(k, "cos", ch.real))
                continue
            a_cos, a_sin = 2.0 * ch.real, -2.0 * ch.imag
            if abs(a_cos) > atol:
                out.append(WaveTerm(k, "cos", a_cos))
            if abs(a_sin) > atol:
                out.append(WaveTerm(k, "sin", a_sin))
        return merge_terms(out)

    def to_json_obj(self, atol=1e-14):
        if self.expr is not None and self.terms is None:
            return {"dimension": self.dimension, "expr": self.expr}
        return {"dimension": self.dimension,
                "terms": [t.to_dict() for t in self.to_terms(atol)]}

    def __repr__(self):
        kind = "terms" if self.terms is not None else ("expr" if self.expr else "sampled")
        return f"PeriodicScalarField(n={self.dimension}, N={self.resolution}, {kind})"


# -- constructors -------------------------------------------------------------

def field_from_terms(dimension, terms, resolution):
    """Exact field from a finite cos/sin series.

    Raises :class:`AliasError` when ``resolution < 2 (max|k_i| + 1)``.
    """
    terms = merge_terms(t if isinstance(t, WaveTerm) else WaveTerm(**t) for t in terms)
    for t in terms:
        if t.dimension != dimension:
            raise ValueError(f"term {t} does not have dimension {dimension}")
    bw = max((t.bandwidth for t in terms), default=0)
    if resolution < 2 * (bw + 1):
        raise AliasError(f"resolution {resolution} cannot carry bandwidth {bw}")
    _check_resolution(resolution, dimension)

    def sample(M):
        return _evaluate_terms(terms, fr.grid(M, dimension), (M,) * dimension)

    return PeriodicScalarField(dimension, resolution, sample, terms=terms)


def constant_field(dimension, value, resolution):
    terms = () if value == 0.0 else (WaveTerm((0,) * dimension, "cos", value),)
    return field_from_terms(dimension, terms, resolution)


def field_from_function(dimension, func, resolution):
    """Field sampled from ``func(y1, ..., yn)`` acting on coordinate arrays."""
    def sample(M):
        v = np.asarray(func(*fr.grid(M, dimension)), dtype=float)
        return np.broadcast_to(v, (M,) * dimension).copy()

    return PeriodicScalarField(dimension, resolution, sample)


def field_from_expr(dimension, expr, resolution):
    """Field from a sympy-parsable expression in ``y1, ..., yn``."""
    from ._expr import compile_expression

    func = compile_expression(expr, [f"y{i + 1}" for i in range(dimension)])
    fld = field_from_function(dimension, func, resolution)
    fld.expr = str(expr)
    return fld


def field_from_coeffs(coeffs, N):
    """Band-limited field from normalized rfft coefficients at resolution N."""
    n = coeffs.ndim
    c = coeffs.copy()
    c[~fr.kept_mask(N, n)] = 0.0

    def sample(M):
        if M >= N:
            return fr.backward(fr.resample(c, N, M), M)
        step = N // M
        return fr.backward(c, N)[(slice(None, None, step),) * n]

    return PeriodicScalarField(n, N, sample, coeffs=c, bandlimit=N)


def field_from_values(values):
    """Band-limited field whose projection interpolates grid values."""
    values = np.asarray(values, dtype=float)
    return field_from_coeffs(fr.forward(values), values.shape[0])


# -- operations ----------------------------------------------------------------

def add(f, g):
    if f.dimension != g.dimension:
        raise ValueError("dimension mismatch")
    N = max(f.resolution, g.resolution)
    terms = None
    if f.terms is not None and g.terms is not None:
        terms = merge_terms(f.terms + g.terms)
    pf, pg = f._pointwise, g._pointwise
    band = None
    if f._bandlimit is not None and g._bandlimit is not None:
        band = max(f._bandlimit, g._bandlimit)
    coeffs = None
    if f._coeffs is not None and g._coeffs is not None and (terms is not None or band):
        coeffs = fr.resample(f._coeffs, f.resolution, N) + fr.resample(g._coeffs, g.resolution, N)
    return PeriodicScalarField(f.dimension, N, lambda M: pf(M) + pg(M), terms=terms,
                               coeffs=coeffs, bandlimit=band)


def multiply(f, g):
    """Product of two fields.

    Exact term lists are convolved symbolically; the working resolution is
    raised to carry the product bandwidth, and :class:`AliasError` is raised
    if that would exceed the resolution cap.  Otherwise the product of the
    two projections is formed on a doubled grid and truncated, which is free
    of aliasing.
    """
    if f.dimension != g.dimension:
        raise ValueError("dimension mismatch")
    n = f.dimension
    N = max(f.resolution, g.resolution)
    if f.terms is not None and g.terms is not None:
        if len(f.terms) * len(g.terms) <= MAX_TERMS:
            terms = merge_terms(p for a in f.terms for b in g.terms for p in _term_product(a, b))
            bw = max((t.bandwidth for t in terms), default=0)
            need = fr.next_power_of_two(2 * (bw + 1))
            if need > RESOLUTION_CAP[n]:
                raise AliasError(f"product bandwidth {bw} needs resolution {need}, "
                                 f"above the cap {RESOLUTION_CAP[n]}")
            return field_from_terms(n, terms, max(N, need))
    pf, pg = f._pointwise, g._pointwise
    band = None
    if f._bandlimit is not None and g._bandlimit is not None:
        band = 2 * max(f._bandlimit, g._bandlimit)
    return PeriodicScalarField(n, N, lambda M: pf(M) * pg(M), bandlimit=band)


def product_coeffs(c1, c2, N):
    """Truncated coefficients of the product of two projected fields."""
    M = 2 * N
    v = fr.backward(fr.resample(c1, N, M), M) * fr.backward(fr.resample(c2, N, M), M)
    return fr.resample(fr.forward(v), M, N)


def derivative(f, axes):
    """Spectral derivative along ``axes`` (0-based axis indices).

    ``derivative(f, (0, 1))`` is the mixed derivative in y1 and y2.
    """
    axes = tuple(int(a) for a in axes)
    n = f.dimension
    if any(a < 0 or a >= n for a in axes):
        raise ValueError(f"axes {axes} out of range for dimension {n}")
    if f.terms is not None:
        out = []
        for t in f.terms:
            amp = t.amplitude
            phase = t.phase
            for a in axes:
                factor = 2.0 * np.pi * t.wavevector[a]
                if phase == "cos":
                    phase, amp = "sin", -amp * factor
                else:
                    phase, amp = "cos", amp * factor
            out.append(_term(t.wavevector, phase, amp))
        return field_from_terms(n, [t for t in out if t is not None and t.amplitude != 0.0],
                                f.resolution)
    N = f.resolution
    return field_from_coeffs(f.coeffs * fr.derivative_multiplier(N, n, axes), N)


def inner_product(f, g):
    """Mean over T^n of ``f * g`` (exact for the projections)."""
    N = max(f.resolution, g.resolution)
    return fr.inner(f.at_resolution(N).coeffs, g.at_resolution(N).coeffs)


# -- matrix fields ----------------------------------------------------------------

class CoefficientField:
    """Symmetric, uniformly elliptic n x n field of periodic scalars.

    ``entries`` maps index pairs ``(k, l)`` with ``k <= l`` (0-based) to scalar
    fields or numbers; missing pairs are zero.  Ellipticity is checked on the
    resolution-N grid at construction.
    """

    def __init__(self, entries, dimension, resolution=None, *, check=True):
        n = int(dimension)
        fields = {}
        for (k, l), v in entries.items():
            k, l = min(k, l), max(k, l)
            if not (0 <= k < n and 0 <= l < n):
                raise ValueError(f"entry {(k, l)} out of range for n={n}")
            fields[(k, l)] = v
        if resolution is None:
            resolution = max((v.resolution for v in fields.values()
                              if isinstance(v, PeriodicScalarField)), default=16)
        self.dimension = n
        self.resolution = int(resolution)
        self._entries = {}
        for k in range(n):
            for l in range(k, n):
                v = fields.get((k, l), 0.0)
                if not isinstance(v, PeriodicScalarField):
                    v = constant_field(n, float(v), self.resolution)
                elif v.dimension != n:
                    raise ValueError("entry dimension mismatch")
                self._entries[(k, l)] = v.at_resolution(self.resolution)
        self._lambda = None
        if check:
            lo, hi = self.eigenvalue_range()
            if not lo > 0.0:
                raise EllipticityError(f"smallest eigenvalue {lo:.3g} is not positive")

    def entry(self, k, l):
        return self._entries[(min(k, l), max(k, l))]

    def items(self):
        return self._entries.items()

    def matrix_values(self, M=None):
        """Projected entry values, shape (n, n) + (M,)*n."""
        M = self.resolution if M is None else M
        n = self.dimension
        out = np.empty((n, n) + (M,) * n)
        for (k, l), f in self._entries.items():
            v = f.at_resolution(M).values
            out[k, l] = v
            out[l, k] = v
        return out

    def eigenvalue_range(self):
        if self._lambda is None:
            A = np.moveaxis(self.matrix_values(), (0, 1), (-2, -1))
            ev = np.linalg.eigvalsh(A)
            self._lambda = (float(ev[..., 0].min()), float(ev[..., -1].max()))
        return self._lambda

    @property
    def ellipticity(self):
        return self.eigenvalue_range()[0]

    def contrast(self):
        lo, hi = self.eigenvalue_range()
        return lo / hi

    def is_diagonal(self):
        return all(self.entry(k, l).is_zero() for k in range(self.dimension)
                   for l in range(k + 1, self.dimension))

    def is_exact(self):
        return all(f.is_exact for f in self._entries.values())

    def mean(self):
        n = self.dimension
        out = np.zeros((n, n))
        for (k, l), f in self._entries.items():
            out[k, l] = out[l, k] = f.mean()
        return out

    def trace(self):
        out = self.entry(0, 0)
        for k in range(1, self.dimension):
            out = out + self.entry(k, k)
        return out

    def contract(self, C):
        """Scalar field ``C : A`` for a constant symmetric matrix C."""
        C = np.asarray(C, dtype=float)
        out = constant_field(self.dimension, 0.0, self.resolution)
        for (k, l), f in self._entries.items():
            w = C[k, l] if k == l else C[k, l] + C[l, k]
            if w != 0.0:
                out = out + f.scale(w)
        return out

    def at_resolution(self, M):
        if M == self.resolution:
            return self
        return CoefficientField({kl: f.at_resolution(M) for kl, f in self._entries.items()},
                                self.dimension, M, check=False)

    def scaled(self, gamma):
        """Pointwise product ``gamma * A`` with a scalar field or number."""
        if not isinstance(gamma, PeriodicScalarField):
            return CoefficientField({kl: f.scale(gamma) for kl, f in self._entries.items()},
                                    self.dimension, self.resolution)
        N = max(self.resolution, gamma.resolution)
        ent = {kl: (f * gamma).at_resolution(N) for kl, f in self._entries.items()}
        return CoefficientField(ent, self.dimension, N)

    def plus(self, B):
        """``A + B`` for a constant matrix or another coefficient field."""
        n = self.dimension
        ent = {}
        for (k, l), f in self._entries.items():
            if isinstance(B, CoefficientField):
                ent[(k, l)] = f + B.entry(k, l)
            else:
                b = float(np.asarray(B)[k, l])
                ent[(k, l)] = f + b if b != 0.0 else f
        N = self.resolution if not isinstance(B, CoefficientField) else max(
            self.resolution, B.resolution)
        return CoefficientField(ent, n, N)

    def embed(self, dimension, extra_diagonal=None):
        """Lift to T^dimension; new diagonal entries from ``extra_diagonal``."""
        ent = {kl: f.embed(dimension) for kl, f in self._entries.items()}
        extra = extra_diagonal or {}
        for i in range(self.dimension, dimension):
            ent[(i, i)] = extra.get(i, 1.0)
        N = min(self.resolution, RESOLUTION_CAP[dimension])
        return CoefficientField(ent, dimension, N)

    def to_json_obj(self, atol=1e-14):
        out = {"dimension": self.dimension, "entries": {}}
        for (k, l), f in self._entries.items():
            if f.is_zero():
                continue
            obj = f.to_json_obj(atol)
            out["entries"][f"{k + 1}{l + 1}"] = obj.get("terms", {"expr": obj.get("expr")})
        return out

    def __repr__(self):
        return f"CoefficientField(n={self.dimension}, N={self.resolution})"


def diagonal_field(diagonal, resolution=None, *, check=True):
    """Coefficient field ``diag(d_1, ..., d_n)`` from scalar fields or numbers."""
    n = None
    for d in diagonal:
        if isinstance(d, PeriodicScalarField):
            n = d.dimension
    if n is None:
        raise ValueError("at least one diagonal entry must be a field")
    return CoefficientField({(i, i): d for i, d in enumerate(diagonal)}, n, resolution,
                            check=check)


# -- JSON ----------------------------------------------------------------------

def _scalar_from_obj(obj, n, N):
    if isinstance(obj, (int, float)):
        return constant_field(n, float(obj), N)
    if isinstance(obj, str):
        return field_from_expr(n, obj, N)
    if isinstance(obj, Mapping):
        if "expr" in obj:
            return field_from_expr(n, obj["expr"], N)
        obj = obj["terms"]
    terms = [WaveTerm(tuple(t["k"]), t["phase"], t["amp"]) for t in obj]
    bw = max((t.bandwidth for t in terms), default=0)
    if N < 2 * (bw + 1):
        raise AliasError(f"resolution {N} cannot carry bandwidth {bw}")
    return field_from_terms(n, terms, N)


def field_from_json(obj, resolution):
    """Scalar or coefficient field from the JSON layout.

    Scalar: ``{"dimension": n, "terms": [{"k": [...], "phase": ..., "amp": ...}]}``
    (or ``"expr"``).  Matrix: ``{"dimension": n, "entries": {"11": ..., "12": ...}}``
    where each entry is a term list, an expression string or a number; the
    ``"kl"`` keys may also appear at top level.
    """
    if isinstance(obj, (str, bytes)):
        obj = json.loads(obj)
    n = int(obj["dimension"])
    if "terms" in obj or "expr" in obj:
        return _scalar_from_obj(obj, n, resolution)
    entries = obj.get("entries")
    if entries is None:
        entries = {k: v for k, v in obj.items() if k != "dimension"}
    ent = {}
    for key, val in entries.items():
        if len(key) != 2 or not key.isdigit():
            raise ValueError(f"bad entry key {key!r}")
        k, l = int(key[0]) - 1, int(key[1]) - 1
        if k > l:
            raise ValueError(f"entry key {key!r} is not in the upper triangle")
        ent[(k, l)] = _scalar_from_obj(val, n, resolution)
    return CoefficientField(ent, n, resolution)
