"""Shared quadrature primitives and truncation-growth diagnostics.

Two kinds of machinery live here.  `adaptive_quad` wraps scipy's QUADPACK
routines with a hard non-convergence check, for smooth or mildly singular
one-off integrals.  The panel helpers build deterministic composite
Gauss-Legendre rules on explicit edge sequences; singular integrals use
dyadic edges so that every refinement level doubles resolution toward the
singular end and partial values form a ladder whose log-log growth rate
decides finite-vs-divergent verdicts.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

#: Least-squares log-log growth slope below which a truncation ladder is
#: read as convergent.  Anything at or above reads as divergent.
DIVERGENCE_SLOPE = 0.05


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to converge to the requested tolerance."""


def adaptive_quad(f, a, b, *, atol=1e-10, rtol=1e-10, limit=400,
                  points=None, weight=None, wvar=None):
    """Integrate ``f`` over ``[a, b]`` adaptively, raising on non-convergence.

    ``weight``/``wvar`` follow scipy.integrate.quad; ``weight='cos'`` with an
    infinite upper limit selects the QUADPACK Fourier-integral routine.
    """
    kwargs = dict(epsabs=atol, epsrel=rtol, limit=limit)
    if weight is not None:
        kwargs.update(weight=weight, wvar=wvar)
        kwargs.pop("epsrel")   # Fourier route is absolute-error driven
        if b == np.inf:
            kwargs.pop("limit")
            kwargs["limlst"] = 200
    elif points is not None:
        kwargs["points"] = points
    with warnings.catch_warnings():
        # QUADPACK's roundoff chatter is expected near our budget; the hard
        # check below is the actual convergence criterion
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        value, err = integrate.quad(f, a, b, **kwargs)
    budget = max(atol, rtol * abs(value)) * 100.0
    if not np.isfinite(value) or err > budget:
        raise QuadratureError(
            f"quadrature on [{a}, {b}] did not converge: "
            f"value={value!r}, error estimate={err:.3e}, budget={budget:.3e}"
        )
    return value


def gauss_nodes(edges, n=8):
    """Composite Gauss-Legendre nodes/weights on consecutive ``edges`` panels."""
    edges = np.asarray(edges, dtype=float)
    x, w = np.polynomial.legendre.leggauss(n)
    lo, hi = edges[:-1], edges[1:]
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def composite_gauss(f, edges, n=8):
    """Integral of a vectorized ``f`` over the panels given by ``edges``."""
    nodes, weights = gauss_nodes(edges, n)
    return float(np.real_if_close(np.dot(f(nodes), weights)))


def refine_edges(edges, max_step):
    """Subdivide panels so no panel exceeds ``max_step`` (for oscillatory f)."""
    out = [edges[0]]
    for lo, hi in zip(edges[:-1], edges[1:]):
        k = max(1, int(np.ceil((hi - lo) / max_step)))
        out.extend(np.linspace(lo, hi, k + 1)[1:])
    return np.asarray(out)


def dyadic_edges_down(split, eps0):
    """Edges ``split, split/2, ..." halving down to ``eps0`` (descending)."""
    if not 0 < eps0 < split:
        raise ValueError("need 0 < eps0 < split")
    edges = [split]
    x = split
    while x / 2 > eps0 * (1 + 1e-12):
        x /= 2
        edges.append(x)
    edges.append(eps0)
    return np.asarray(edges)


def dyadic_edges_up(split, window):
    """Edges ``split, 2*split, ...`` doubling up to ``window`` (ascending)."""
    if not 0 < split < window:
        raise ValueError("need 0 < split < window")
    edges = [split]
    x = split
    while x * 2 < window * (1 - 1e-12):
        x *= 2
        edges.append(x)
    edges.append(window)
    return np.asarray(edges)


def fit_loglog_slope(xs, ys, last=None):
    """Least-squares slope of log(ys) against log(xs) over the last points.

    ``last=None`` fits the trailing 4 points, which is where a ladder's
    asymptotic growth shows; shallow levels would bias the slope upward.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    keep = np.isfinite(xs) & np.isfinite(ys) & (xs > 0)
    xs, ys = xs[keep], ys[keep]
    if len(xs) < 2:
        return 0.0
    if last is None:
        last = 4
    last = min(last, len(xs))
    lx = np.log(xs[-last:])
    ly = np.log(np.maximum(ys[-last:], 1e-300))
    slope = np.polyfit(lx, ly, 1)[0]
    return float(slope)


@dataclass(frozen=True)
class GrowthDiagnostic:
    """Partial-value ladder over increasing truncation bounds.

    ``divergent`` is a heuristic verdict: the fitted log-log slope of the
    partials versus the bounds, compared against ``threshold``.  It cannot
    decide marginal (logarithmic) cases exactly; the ladder itself is kept so
    a reader can judge.
    """

    bounds: tuple
    partials: tuple
    slope: float
    threshold: float = DIVERGENCE_SLOPE

    @property
    def divergent(self) -> bool:
        return self.slope >= self.threshold

    @classmethod
    def from_ladder(cls, bounds, partials, threshold=DIVERGENCE_SLOPE):
        slope = fit_loglog_slope(bounds, partials)
        return cls(tuple(float(b) for b in bounds),
                   tuple(float(p) for p in partials),
                   slope, threshold)
