"""Shared numerical machinery.

Adaptive quadrature on finite and semi-infinite intervals, bracketed root
finding, tail-bounded series accumulation, and central finite differences.

Quadrature delegates to QUADPACK (``scipy.integrate.quad``), which is built
from nested low/high-order Gauss-Kronrod rule pairs on adaptively bisected
panels, so the error estimate comes for free from the rule pair.  This
module owns the semi-infinite transform, the tolerance policy, and the
failure reporting used by the rest of the package.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Iterable, NamedTuple

from scipy import integrate, optimize

from .errors import BracketError, ConvergenceError, DomainError

TRANSFORM_NONE = "none"
TRANSFORM_SEMI_INFINITE = "semi_infinite_exp"


@dataclass(frozen=True)
class QuadSpec:
    """Quadrature tolerances and the declared interval transform.

    ``semi_infinite_exp`` maps z = a + scale*t/(1-t) onto t in (0, 1); it is
    meant for integrands with exponential tail decay, which all of the
    integrals in this package have.
    """

    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_subdivisions: int = 2000
    transform: str = TRANSFORM_NONE

    def __post_init__(self) -> None:
        if not 0 < self.rel_tol < 1:
            raise DomainError(f"rel_tol must lie in (0, 1); got {self.rel_tol}")
        if self.abs_tol < 0:
            raise DomainError(f"abs_tol must be nonnegative; got {self.abs_tol}")
        if self.max_subdivisions < 1:
            raise DomainError(
                f"max_subdivisions must be >= 1; got {self.max_subdivisions}"
            )
        if self.transform not in (TRANSFORM_NONE, TRANSFORM_SEMI_INFINITE):
            raise DomainError(f"unknown transform {self.transform!r}")


DEFAULT_QUAD = QuadSpec()
SEMI_INFINITE_QUAD = QuadSpec(transform=TRANSFORM_SEMI_INFINITE)


class QuadResult(NamedTuple):
    value: float
    error_estimate: float


class SeriesResult(NamedTuple):
    total: float
    terms_used: int
    tail_estimate: float
    converged: bool


def _run_quadpack(f, a: float, b: float, spec: QuadSpec, points=None) -> QuadResult:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", category=integrate.IntegrationWarning)
        out = integrate.quad(
            f,
            a,
            b,
            epsabs=spec.abs_tol,
            epsrel=spec.rel_tol,
            limit=spec.max_subdivisions,
            points=points,
            full_output=True,
        )
    value, estimate, info = out[0], out[1], out[2]
    if len(out) > 3:
        # QUADPACK gave up; report the panel carrying the largest error.
        last = info.get("last", 0)
        detail = ""
        if last and "elist" in info:
            worst = int(info["elist"][:last].argmax())
            detail = (
                f"; worst subinterval [{info['alist'][worst]:.6g}, "
                f"{info['blist'][worst]:.6g}] with error {info['elist'][worst]:.3g}"
            )
        raise ConvergenceError(
            f"quadrature failed on [{a:.6g}, {b:.6g}]: {out[3]}{detail}"
        )
    if estimate > max(spec.abs_tol, spec.rel_tol * abs(value)):
        raise ConvergenceError(
            f"quadrature error estimate {estimate:.3g} exceeds tolerance for "
            f"value {value:.6g} on [{a:.6g}, {b:.6g}]"
        )
    return QuadResult(value, estimate)


def quad_adaptive(
    f: Callable[[float], float],
    a: float,
    b: float,
    spec: QuadSpec = DEFAULT_QUAD,
    *,
    scale: float = 1.0,
    points: Iterable[float] | None = None,
) -> QuadResult:
    """Integrate ``f`` over (a, b) adaptively.

    ``b`` may be ``math.inf`` when ``spec.transform`` declares the
    semi-infinite mapping; ``scale`` then sets the decay length of the
    z = a + scale*t/(1-t) substitution.  ``points`` are interior
    breakpoints the integration is split at (e.g. sign changes or knees).

    Returns ``(value, error_estimate)``; raises :class:`ConvergenceError`
    when the achieved estimate cannot meet ``max(abs_tol, rel_tol*|value|)``.
    """
    if math.isinf(b):
        if spec.transform != TRANSFORM_SEMI_INFINITE:
            raise DomainError(
                "infinite upper limit requires the semi_infinite_exp transform"
            )
        if scale <= 0 or not math.isfinite(scale):
            raise DomainError(f"transform scale must be positive; got {scale}")
        pieces = []
        lo = a
        for p in sorted(points or []):
            if lo < p < math.inf:
                pieces.append((lo, p))
                lo = p
        total = 0.0
        err = 0.0
        for plo, phi in pieces:
            r = _run_quadpack(f, plo, phi, spec)
            total += r.value
            err += r.error_estimate

        def transformed(t: float) -> float:
            w = 1.0 - t
            return f(lo + scale * t / w) * scale / (w * w)

        r = _run_quadpack(transformed, 0.0, 1.0, spec)
        return QuadResult(total + r.value, err + r.error_estimate)

    if spec.transform == TRANSFORM_SEMI_INFINITE:
        raise DomainError("semi_infinite_exp transform requires an infinite limit")
    pts = sorted(p for p in (points or []) if a < p < b) or None
    return _run_quadpack(f, a, b, spec, points=pts)


def root_bracketed(
    g: Callable[[float], float], lo: float, hi: float, tol: float = 1e-12
) -> float:
    """Find a root of ``g`` inside [lo, hi] by Brent's method.

    Requires a sign change over the bracket; a root sitting exactly on an
    endpoint is returned as that endpoint.
    """
    glo = g(lo)
    if glo == 0.0:
        return lo
    ghi = g(hi)
    if ghi == 0.0:
        return hi
    if glo * ghi > 0:
        raise BracketError(
            f"no sign change on [{lo:.6g}, {hi:.6g}]: g(lo)={glo:.6g}, g(hi)={ghi:.6g}"
        )
    return float(optimize.brentq(g, lo, hi, xtol=tol))


def series_accumulate(
    term: Callable[[int], float], control
) -> SeriesResult:
    """Sum ``term(0) + term(1) + ...`` until the tail is negligible.

    Stops once three consecutive terms fall below ``rel_tol`` times the
    running partial sum (terms are assumed eventually decreasing on the
    supported regimes).  Exhausting ``max_terms`` is flagged via
    ``converged=False``; the partial sum is still returned.
    """
    total = 0.0
    small_streak = 0
    last = 0.0
    for k in range(control.max_terms):
        last = term(k)
        if not math.isfinite(last):
            raise ConvergenceError(f"series term {k} is not finite: {last}")
        total += last
        if abs(last) <= control.rel_tol * abs(total):
            small_streak += 1
            if small_streak >= 3:
                return SeriesResult(total, k + 1, abs(last), True)
        else:
            small_streak = 0
    return SeriesResult(total, control.max_terms, abs(last), False)


def central_diff(f: Callable[[float], float], x: float, h: float) -> float:
    """O(h^2) central difference (f(x+h) - f(x-h)) / (2h)."""
    if h <= 0:
        raise DomainError(f"step must be positive; got {h}")
    return (f(x + h) - f(x - h)) / (2.0 * h)
