"""Special functions and quadrature primitives for the MGF/CF engine.

Complex values are plain python/numpy complex numbers; public entry points
reject non-finite arguments. Quadrature is adaptive 15-point Gauss-Kronrod
with panel bisection; semi-infinite ranges go through the rational transform
x = a + u/(1-u), optionally truncated early when the caller can certify the
tail mass. A small tanh-sinh rule handles endpoint-singular integrands.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import gamma as _scipy_gamma
from scipy.special import wofz

# 15-point Kronrod nodes/weights with the embedded 7-point Gauss rule
# (QUADPACK dqk15 constants).
_XGK_HALF = np.array([
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0,
])
_WGK_HALF = np.array([
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728,
])
_WG_HALF = np.array([
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469,
])

XGK15 = np.concatenate([-_XGK_HALF[:7], _XGK_HALF[::-1]])          # 15 ascending nodes
WGK15 = np.concatenate([_WGK_HALF[:7], _WGK_HALF[::-1]])
WG7_ON_K = np.zeros(15)
WG7_ON_K[1:14:2] = np.concatenate([_WG_HALF[:3], _WG_HALF[::-1]])  # Gauss nodes sit at odd indices


class QuadratureError(RuntimeError):
    """Non-convergence report carrying the partial estimate."""

    def __init__(self, message: str, partial: complex, abs_error: float, evaluations: int):
        super().__init__(f"{message} (partial={partial}, abs_error={abs_error:.3e}, "
                         f"evaluations={evaluations})")
        self.partial = partial
        self.abs_error = abs_error
        self.evaluations = evaluations


@dataclass(frozen=True)
class QuadratureResult:
    value: complex
    abs_error_estimate: float
    evaluations: int

    def __post_init__(self):
        if self.abs_error_estimate < 0:
            raise ValueError("error estimate must be >= 0")


def gamma_fn(x: float) -> float:
    """Gamma function restricted to x > 0."""
    if not (x > 0 and math.isfinite(x)):
        raise ValueError(f"gamma_fn requires x > 0, got {x}")
    return float(_scipy_gamma(x))


def erfcx_complex(z):
    """Scaled complementary error function exp(z^2) erfc(z) via the Faddeeva
    function: erfcx(z) = w(iz). Stable wherever w is (Im(iz) >= 0 half)."""
    z = np.asarray(z, dtype=complex)
    _check_finite(z)
    return wofz(1j * z)


def erfc_complex(z):
    """Complementary error function continued to complex argument.

    Uses erfc(z) = exp(-z^2) w(iz) in the right half-plane and the reflection
    erfc(-z) = 2 - erfc(z) otherwise. Raises OverflowError where the
    exp(-z^2) prefactor leaves double range (|Im z| >> |Re z|, |z| large).
    """
    z = np.asarray(z, dtype=complex)
    _check_finite(z)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    flip = z.real < 0
    zr = np.where(flip, -z, z)
    expo = -(zr * zr)
    if np.any(expo.real > 700.0):
        raise OverflowError("erfc_complex overflows for this argument")
    out = np.exp(expo) * wofz(1j * zr)
    out = np.where(flip, 2.0 - out, out)
    return complex(out[0]) if scalar else out


def _check_finite(z):
    if not np.isfinite(z).all():
        raise ValueError("non-finite argument")


def gk15_panel_nodes(a, b):
    """Kronrod nodes for panels [a_i, b_i]; returns (nodes (P,15), half (P,))."""
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    return mid[:, None] + half[:, None] * XGK15[None, :], half


def gk15_apply(fvals, half):
    """Kronrod estimate and |K15-G7| error per panel, given f on the node grid."""
    k = fvals @ WGK15 * half
    g = fvals @ WG7_ON_K * half
    err = np.abs(k - g) + 50.0 * np.finfo(float).eps * np.abs(k)
    return k, err


def integrate_adaptive(
    f: Callable,
    a: float,
    b: float,
    abs_tol: float = 1e-10,
    rel_tol: float = 1e-8,
    max_panels: int = 4096,
    tail_bound: Callable[[float], float] | None = None,
) -> QuadratureResult:
    """Adaptive Gauss-Kronrod integration of a (possibly complex) integrand.

    ``f`` must accept a numpy array of abscissae and return values of the same
    shape. ``b`` may be ``numpy.inf``; the range is then mapped through
    x = a + u/(1-u). When ``tail_bound(x0)`` certifies the remaining mass
    beyond x0, the range is truncated at the first x0 with bound <= abs_tol/4
    and the bound is added to the reported error.

    Raises QuadratureError (carrying the partial value and achieved error)
    when the tolerance cannot be met within ``max_panels``.
    """
    if abs_tol <= 0 or rel_tol <= 0:
        raise ValueError("tolerances must be positive")
    tail = 0.0
    if math.isinf(b):
        if tail_bound is not None:
            hi = max(a + 1.0, 1.0)
            for _ in range(200):
                t = tail_bound(hi)
                if t <= abs_tol / 4.0:
                    break
                hi *= 2.0
            else:
                raise QuadratureError("tail bound does not certify truncation", 0.0, math.inf, 0)
            tail = float(t)
            g, lo, span = f, a, hi - a
        else:
            def g(u, _f=f, _a=a):
                u = np.asarray(u)
                x = _a + u / (1.0 - u)
                return _f(x) / (1.0 - u) ** 2
            lo, span = 0.0, 1.0
        panels = [(lo, lo + span)]
    else:
        g, panels = f, [(a, b)]

    evals = 0
    heap = []
    counter = 0
    for pa, pb in panels:
        nodes, half = gk15_panel_nodes([pa], [pb])
        vals = np.asarray(g(nodes[0]))
        evals += 15
        k, err = gk15_apply(vals[None, :], half)
        heapq.heappush(heap, (-float(err[0]), counter, pa, pb, complex(k[0]), float(err[0])))
        counter += 1

    while True:
        total_val = sum(item[4] for item in heap)
        total_err = sum(item[5] for item in heap) + tail
        if total_err <= max(abs_tol, rel_tol * abs(total_val)):
            return QuadratureResult(total_val, total_err, evals)
        if len(heap) >= max_panels:
            raise QuadratureError("quadrature did not converge", total_val, total_err, evals)
        _, _, pa, pb, _, _ = heapq.heappop(heap)
        mid = 0.5 * (pa + pb)
        for qa, qb in ((pa, mid), (mid, pb)):
            nodes, half = gk15_panel_nodes([qa], [qb])
            vals = np.asarray(g(nodes[0]))
            evals += 15
            k, err = gk15_apply(vals[None, :], half)
            heapq.heappush(heap, (-float(err[0]), counter, qa, qb, complex(k[0]), float(err[0])))
            counter += 1


def tanh_sinh(f: Callable, a: float, b: float, abs_tol: float = 1e-12,
              max_level: int = 12) -> QuadratureResult:
    """Double-exponential rule on (a, b) for endpoint-singular integrands.

    Level-doubling trapezoid in u with x = mid + half*tanh(pi/2 sinh(u));
    the endpoints themselves are never evaluated.
    """
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    u_max = 3.8  # transformed weights below ~1e-16 beyond this

    def sample(u):
        su = 0.5 * math.pi * np.sinh(u)
        # offsets from the nearest endpoint, cancellation-free:
        # 1 +- tanh(s) = 2 / (1 + exp(-+2s))
        x = np.where(su <= 0,
                     a + half * 2.0 / (1.0 + np.exp(-2.0 * su)),
                     b - half * 2.0 / (1.0 + np.exp(2.0 * su)))
        w = half * 0.5 * math.pi * np.cosh(u) / np.cosh(su) ** 2
        keep = (x > a) & (x < b) & np.isfinite(w)
        return x[keep], w[keep]

    h = 0.5
    k = np.arange(-int(u_max / h), int(u_max / h) + 1)
    x, w = sample(k * h)
    value = h * np.sum(np.asarray(f(x)) * w)
    evals = x.size
    err = math.inf
    for _ in range(1, max_level + 1):
        h *= 0.5
        k = np.arange(-int(u_max / h), int(u_max / h) + 1)
        x, w = sample(h * k[k % 2 != 0])  # only the new midpoints
        new_value = 0.5 * value + h * np.sum(np.asarray(f(x)) * w)
        evals += x.size
        err = abs(new_value - value)
        value = new_value
        if err < abs_tol:
            return QuadratureResult(complex(value), err, evals)
    return QuadratureResult(complex(value), err, evals)
