"""Parameterization-invariant functionals and their variations in charts.

Supported terms: curve length, signed enclosed area (planar only), and
bending energy (integral of squared curvature).  Gradients are exact
derivatives of the discrete functionals via the chain rule wherever the
chart exponential is affine (euclidean/torus) or closed-form (sphere
length); sphere bending falls back to finite differences.  Hessians are
Richardson-extrapolated central differences of the gradient.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from . import fourier
from .ambient import FlatTorus
from .charts import Chart, NormalSection, SectionField, chart_apply, full_chart_apply, make_chart
from .curve import Embedding, curvature, derivative, quadrature_weights
from .errors import UnsupportedAmbientError

TERM_KINDS = ("length", "area", "bend")

_GRAD_STEP = 1e-5
_HESS_STEP = 1e-4


@dataclass(frozen=True)
class Functional:
    """Affine combination of invariant terms: list of (kind, coefficient)."""

    terms: tuple[tuple[str, float], ...]

    def __post_init__(self):
        for kind, coef in self.terms:
            if kind not in TERM_KINDS:
                raise ValueError(f"unknown functional term {kind!r}")
            if not np.isfinite(coef):
                raise ValueError("coefficients must be finite")

    def coefficient(self, kind: str) -> float:
        return sum(c for k, c in self.terms if k == kind)

    def __str__(self):
        parts = []
        for kind, coef in self.terms:
            sign = "-" if coef < 0 else ("+" if parts else "")
            parts.append(f"{sign}{abs(coef)}*{kind}")
        return "".join(parts) or "0*length"


_TERM_RE = re.compile(r"([+-]?)(?:(\d+(?:\.\d*)?(?:[eE][+-]?\d+)?)\*)?(length|area|bend)")


def parse_functional(text: str) -> Functional:
    """Parse the whitespace-free CLI grammar, e.g. 'length-1.0*area'."""
    pos = 0
    terms = []
    while pos < len(text):
        m = _TERM_RE.match(text, pos)
        if m is None:
            raise ValueError(f"cannot parse functional string {text!r} at position {pos}")
        sign, coef, kind = m.groups()
        value = float(coef) if coef is not None else 1.0
        if sign == "-":
            value = -value
        terms.append((kind, value))
        pos = m.end()
    if not terms:
        raise ValueError("empty functional string")
    return Functional(tuple(terms))


def _check_area_support(F: Functional, x: Embedding):
    if F.coefficient("area") != 0.0 and not (
        x.space.kind == "euclidean" and x.space.dim == 2
    ):
        raise UnsupportedAmbientError("signed area is defined only in the euclidean plane")


def evaluate(F: Functional, x: Embedding) -> float:
    """Value of the functional on a discrete curve (spectral quadrature)."""
    _check_area_support(F, x)
    total = 0.0
    w = None
    for kind, coef in F.terms:
        if coef == 0.0:
            continue
        if w is None:
            w = quadrature_weights(x)
        if kind == "length":
            total += coef * float(np.sum(w))
        elif kind == "area":
            d = derivative(x).vecs
            total += coef * 0.5 * (2.0 * np.pi / x.P) * float(
                np.sum(x.pts[:, 0] * d[:, 1] - x.pts[:, 1] * d[:, 0])
            )
        elif kind == "bend":
            k = curvature(x)
            total += coef * float(np.sum(k**2 * w))
    return total


# ---------------------------------------------------------------------------
# analytic gradients with respect to the sample points


def _grad_pts_length_flat(y: Embedding) -> np.ndarray:
    d = derivative(y).vecs
    T = d / np.linalg.norm(d, axis=1, keepdims=True)
    return -(2.0 * np.pi / y.P) * fourier.diff(T)


def _grad_pts_area(y: Embedding) -> np.ndarray:
    d = derivative(y).vecs
    return (2.0 * np.pi / y.P) * np.stack([d[:, 1], -d[:, 0]], axis=1)


def _grad_pts_bend_flat(y: Embedding) -> np.ndarray:
    per = y.periodic_part()
    a = fourier.diff(per, 1)
    if isinstance(y.space, FlatTorus):
        a = a + y.winding / (2.0 * np.pi)
    b = fourier.diff(per, 2)
    v = np.linalg.norm(a, axis=1, keepdims=True)
    scale = 2.0 * np.pi / y.P
    if y.pts.shape[1] == 2:
        c = (a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0])[:, None]
        dEda = scale * (2.0 * c / v**5 * np.stack([b[:, 1], -b[:, 0]], axis=1)
                        - 5.0 * c**2 / v**7 * a)
        dEdb = scale * 2.0 * c / v**5 * np.stack([-a[:, 1], a[:, 0]], axis=1)
    else:
        wv = np.cross(a, b)
        w2 = np.sum(wv * wv, axis=1, keepdims=True)
        dEda = scale * (2.0 * np.cross(b, wv) / v**5 - 5.0 * w2 / v**7 * a)
        dEdb = scale * 2.0 * np.cross(wv, a) / v**5
    return -fourier.diff(dEda, 1) + fourier.diff(dEdb, 2)


def _grad_pts_length_sphere(y: Embedding) -> np.ndarray:
    """Ambient R^3 gradient of the discrete sphere length; meaningful against tangent vectors."""
    a = fourier.diff(y.pts, 1)
    b = a - np.sum(y.pts * a, axis=1, keepdims=True) * y.pts
    T = b / np.linalg.norm(b, axis=1, keepdims=True)
    ya = np.sum(y.pts * a, axis=1, keepdims=True)
    return (2.0 * np.pi / y.P) * (-fourier.diff(T, 1) - ya * T)


def _grad_pts(F: Functional, y: Embedding):
    """Sum of analytic sample-point gradients, or None if a term needs finite differences."""
    _check_area_support(F, y)
    out = np.zeros_like(y.pts)
    for kind, coef in F.terms:
        if coef == 0.0:
            continue
        if y.space.kind == "sphere2":
            if kind == "length":
                out = out + coef * _grad_pts_length_sphere(y)
            else:
                return None
        elif kind == "length":
            out = out + coef * _grad_pts_length_flat(y)
        elif kind == "area":
            out = out + coef * _grad_pts_area(y)
        else:
            out = out + coef * _grad_pts_bend_flat(y)
    return out


# ---------------------------------------------------------------------------
# chart derivatives


def _sinc_pair(q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """f(q) = sin(sqrt q)/sqrt q and its derivative f'(q), stable near q = 0."""
    q = np.asarray(q, dtype=float)
    small = q < 1e-2
    qs = np.where(small, 1.0, q)
    r = np.sqrt(qs)
    f_big = np.sin(r) / r
    fp_big = (r * np.cos(r) - np.sin(r)) / (2.0 * qs * r)
    f_small = 1.0 - q / 6.0 + q**2 / 120.0 - q**3 / 5040.0
    fp_small = -1.0 / 6.0 + q / 60.0 - q**2 / 1680.0
    return np.where(small, f_small, f_big), np.where(small, fp_small, fp_big)


def _sphere_chart_tangent(c: Chart, u: NormalSection) -> np.ndarray:
    """dy_i/du_i for the rank-one sphere chart: y = cos(u) x + sin(u) nu."""
    x = c.center.pts
    nu = c.frame.vectors[0]
    ui = u.coeff[:, 0][:, None]
    return -np.sin(ui) * x + np.cos(ui) * nu


def _fd_gradient_coeff(fun, coeff: np.ndarray, step: float) -> np.ndarray:
    """Richardson central differences of a scalar function of a coefficient array."""
    out = np.zeros_like(coeff)
    it = np.nditer(coeff, flags=["multi_index"])
    for _ in it:
        idx = it.multi_index
        vals = {}
        for h in (step, 0.5 * step):
            for sgn in (1.0, -1.0):
                pert = coeff.copy()
                pert[idx] += sgn * h
                vals[(h, sgn)] = fun(pert)
        d1 = (vals[(step, 1.0)] - vals[(step, -1.0)]) / (2.0 * step)
        d2 = (vals[(0.5 * step, 1.0)] - vals[(0.5 * step, -1.0)]) / step
        out[idx] = (4.0 * d2 - d1) / 3.0
    return out


def gradient_in_chart(F: Functional, c: Chart, u: NormalSection) -> NormalSection:
    """L2(ds) gradient of u -> evaluate(F, chart_apply(c, u)).

    The returned coefficients g satisfy
    d f(u)[delta] = sum_i <g_i, delta_i> w_i with w the chart-center
    arclength weights.
    """
    w = quadrature_weights(c.center)
    y = chart_apply(c, u)
    gp = _grad_pts(F, y)
    if gp is not None:
        if c.center.space.kind == "sphere2":
            dy = _sphere_chart_tangent(c, u)
            G = np.sum(gp * dy, axis=1)[:, None]
        else:
            G = np.einsum("aid,id->ia", c.frame.vectors, gp)
        return NormalSection(G / w[:, None])
    # sphere bending: finite differences in the chart coordinates
    G = _fd_gradient_coeff(
        lambda cf: evaluate(F, chart_apply(c, NormalSection(cf))), u.coeff, _GRAD_STEP
    )
    return NormalSection(G / w[:, None])


def first_variation(F: Functional, x: Embedding, V: SectionField) -> float:
    """Directional derivative dF_x[V] along the vector-bundle chart at x."""
    c = make_chart(x)
    scale = max(1.0, V.sup_norm)
    h = _GRAD_STEP / scale

    def f(r: float) -> float:
        return evaluate(F, full_chart_apply(c, SectionField(x, r * V.vecs)))

    d1 = (f(h) - f(-h)) / (2.0 * h)
    d2 = (f(0.5 * h) - f(-0.5 * h)) / h
    return (4.0 * d2 - d1) / 3.0


def grad_norm(c: Chart, g: NormalSection) -> float:
    """L2(ds) norm of a chart gradient."""
    w = quadrature_weights(c.center)
    return float(np.sqrt(np.sum(g.coeff**2 * w[:, None])))


def is_critical(F: Functional, c: Chart, u: NormalSection, tol: float) -> bool:
    """True iff the chart gradient has L2(ds) norm at most tol."""
    return grad_norm(c, gradient_in_chart(F, c, u)) <= tol


@dataclass(frozen=True)
class HessianPair:
    """Coefficient Hessian Q with its diagonal mass matrix (as a vector)."""

    Q: np.ndarray
    mass: np.ndarray
    asymmetry: float


def _fd_hessian(ell2_grad, n: int, step: float) -> tuple[np.ndarray, float]:
    cols = np.empty((n, n))
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1.0
        d1 = (ell2_grad(step * e) - ell2_grad(-step * e)) / (2.0 * step)
        d2 = (ell2_grad(0.5 * step * e) - ell2_grad(-0.5 * step * e)) / step
        cols[:, j] = (4.0 * d2 - d1) / 3.0
    asym = float(np.max(np.abs(cols - cols.T)))
    return 0.5 * (cols + cols.T), asym


def hessian_in_chart(F: Functional, c: Chart) -> HessianPair:
    """Second variation of the chart representative at u = 0.

    Q is the Hessian in frame coefficients (flattened row-major over
    (node, frame index)); the generalized pair (Q, diag(mass)) defines
    the L2(ds) second-variation operator.
    """
    P, rank = c.P, c.rank
    w = quadrature_weights(c.center)
    mass = np.repeat(w, rank)

    def ell2_grad(flat: np.ndarray) -> np.ndarray:
        u = NormalSection(flat.reshape(P, rank))
        g = gradient_in_chart(F, c, u)
        return (g.coeff * w[:, None]).ravel()

    Q, asym = _fd_hessian(ell2_grad, P * rank, _HESS_STEP)
    return HessianPair(Q, mass, asym)


def _full_basis_dim(c: Chart) -> int:
    return 2 if c.center.space.kind == "sphere2" else c.center.space.coord_dim


def _full_apply(c: Chart, coeff: np.ndarray) -> Embedding:
    """Curve for full-section coefficients: ambient axes, or (tangent, normal) on the sphere."""
    x = c.center
    if x.space.kind == "sphere2":
        d = derivative(x).vecs
        T = d / np.linalg.norm(d, axis=1, keepdims=True)
        W = coeff[:, 0:1] * T + coeff[:, 1:2] * c.frame.vectors[0]
    else:
        W = coeff
    return full_chart_apply(c, SectionField(x, W))


def _full_gradient(F: Functional, c: Chart, coeff: np.ndarray) -> np.ndarray:
    x = c.center
    w = quadrature_weights(x)
    if x.space.kind == "sphere2":
        y = _full_apply(c, coeff)
        gp = _grad_pts(F, y)
        if gp is None:
            return _fd_gradient_coeff(
                lambda cf: evaluate(F, _full_apply(c, cf)), coeff, _GRAD_STEP
            ) / w[:, None]
        d = derivative(x).vecs
        T = d / np.linalg.norm(d, axis=1, keepdims=True)
        W = coeff[:, 0:1] * T + coeff[:, 1:2] * c.frame.vectors[0]
        q = np.sum(coeff**2, axis=1, keepdims=True)
        f, fp = _sinc_pair(q)
        base = x.pts
        dya = -coeff[:, 0:1] * f * base + 2.0 * coeff[:, 0:1] * fp * W + f * T
        dyb = -coeff[:, 1:2] * f * base + 2.0 * coeff[:, 1:2] * fp * W + f * c.frame.vectors[0]
        G = np.stack([np.sum(gp * dya, axis=1), np.sum(gp * dyb, axis=1)], axis=1)
        return G / w[:, None]
    y = _full_apply(c, coeff)
    gp = _grad_pts(F, y)
    if gp is None:
        gp = _fd_gradient_coeff(lambda cf: evaluate(F, _full_apply(c, cf)), coeff, _GRAD_STEP)
    return gp / w[:, None]


def hessian_full(F: Functional, c: Chart) -> HessianPair:
    """Second variation over all sections of x^*(TN), at the zero section."""
    P = c.P
    dim = _full_basis_dim(c)
    w = quadrature_weights(c.center)
    mass = np.repeat(w, dim)

    def ell2_grad(flat: np.ndarray) -> np.ndarray:
        G = _full_gradient(F, c, flat.reshape(P, dim))
        return (G * w[:, None]).ravel()

    Q, asym = _fd_hessian(ell2_grad, P * dim, _HESS_STEP)
    return HessianPair(Q, mass, asym)


def restriction_matrix(c: Chart) -> np.ndarray:
    """R embedding frame coefficients into the full-section coefficients."""
    P, rank = c.P, c.rank
    dim = _full_basis_dim(c)
    R = np.zeros((P * dim, P * rank))
    if c.center.space.kind == "sphere2":
        for i in range(P):
            R[i * dim + 1, i * rank] = 1.0
        return R
    for i in range(P):
        for a in range(rank):
            R[i * dim:(i + 1) * dim, i * rank + a] = c.frame.vectors[a, i]
    return R
