"""Closed-form performance evaluators.

Implements the fading CDF of the harvest-scaled product variable, exact
outage (corner-point decomposition with a fast midpoint-expansion path and
an adaptive-quadrature reference path), outage bounds and their common
high-SNR limit, ergodic capacity (reference quadrature, hypergeometric
series, and bounds), and the finite-SNR diversity-multiplexing tradeoff.

Index convention used throughout: direction i is the traffic *into* source
i, so it is powered by the opposite source j and thresholded by tau_i.  In
the rational SNR form gamma_i = (P_j/sigma2) * g1*g2 / (b*g_i + c), the
coefficient b multiplies the gain on source i's own side.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

from .errors import ConvergenceError, DegenerateCaseError, DomainError, ParameterError
from .model import DerivedCoeffs, SystemParams, TargetRates, derived_coeffs
from .numerics import (
    SEMI_INFINITE_QUAD,
    QuadSpec,
    SeriesResult,
    quad_adaptive,
    root_bracketed,
    series_accumulate,
)
from .specfun import (
    DEFAULT_SERIES,
    EULER_GAMMA,
    SeriesControl,
    bessel_xk1,
    tricomi_psi,
)

log = logging.getLogger(__name__)

LN2 = math.log(2.0)

OUTAGE_METHODS = ("taylor", "quadrature")

#: Probabilities may leave [0, 1] by at most this much before the excursion
#: is treated as a formula-misuse error rather than float noise.  The
#: midpoint-expansion outage path carries its own approximation error and is
#: allowed any excursion (logged as a warning beyond the float-noise band).
CLAMP_TOL = 1e-6


def _clamp_probability(value: float, context: str, approximate: bool = False) -> float:
    if 0.0 <= value <= 1.0:
        return value
    excess = max(-value, value - 1.0)
    if excess > CLAMP_TOL:
        if not approximate:
            raise DomainError(
                f"{context} produced {value}, outside [0, 1] by {excess:.3g}"
            )
        log.warning("%s left [0, 1] by %.3g before clamping", context, excess)
    else:
        log.debug("%s clamped by %.3g", context, excess)
    return min(1.0, max(0.0, value))


def cdf_z(z: float, a: float, b: float, c: float, omega1: float, omega2: float) -> float:
    """CDF of Z = a*X*Y/(b*X + c) with X ~ Exp(omega1), Y ~ Exp(omega2).

    F_Z(z) = 1 - exp(-z*b/(a*omega2)) * x*K1(x),  x = sqrt(4*z*c/(a*omega1*omega2)).

    Continuous at z = 0 through the x*K1(x) -> 1 limit; for c = 0 the
    Bessel factor degenerates to 1 and the CDF is plain exponential.
    """
    if a <= 0:
        raise DomainError(f"scale a must be positive; got {a}")
    if z < 0:
        raise DomainError(f"z must be >= 0; got {z}")
    if b < 0 or c < 0:
        raise DomainError(f"need b, c >= 0; got b={b}, c={c}")
    if omega1 <= 0 or omega2 <= 0:
        raise DomainError("fading means must be positive")
    survival = math.exp(-z * b / (a * omega2)) * bessel_xk1(
        math.sqrt(4.0 * z * c / (a * omega1 * omega2))
    )
    return _clamp_probability(1.0 - survival, "cdf_z")


def marginal_outage(
    params: SystemParams, coeffs: DerivedCoeffs, tau: float, direction: int
) -> float:
    """P(gamma_i < tau) for direction i in {1, 2}; a thin cdf_z wrapper."""
    if direction not in (1, 2):
        raise DomainError(f"direction must be 1 or 2; got {direction}")
    if tau < 0:
        raise DomainError(f"threshold must be >= 0; got {tau}")
    if direction == 1:
        a = params.p2 / params.sigma2
        om_b, om_other = params.omega1, params.omega2
    else:
        a = params.p1 / params.sigma2
        om_b, om_other = params.omega2, params.omega1
    return cdf_z(tau, a, coeffs.b, coeffs.c, om_b, om_other)


@dataclass(frozen=True)
class CornerPoint:
    """Intersection of the two outage-boundary curves in the gain plane."""

    x0: float
    y0: float


def _positive_quadratic_root(quad: float, lin: float, const: float) -> float:
    """Positive root of quad*x^2 + lin*x + const with quad > 0, const < 0."""
    disc = math.sqrt(lin * lin - 4.0 * quad * const)
    return (-lin + disc) / (2.0 * quad)


def _corner_residual(params, coeffs, tau1, tau2, x0, y0) -> float:
    a1 = params.sigma2 * tau1 / params.p2
    a2 = params.sigma2 * tau2 / params.p1
    r1 = y0 - a1 * (coeffs.b + coeffs.c / x0)
    r2 = x0 - a2 * (coeffs.b + coeffs.c / y0)
    return max(abs(r1) / y0, abs(r2) / x0)


def _y0_without_cross_term(params, coeffs, tau1, tau2) -> float:
    # Variant whose linear coefficient drops the cross-traffic term (its two
    # c contributions cancel); fails the defining system for asymmetric
    # traffic and is retained only so the regression suite can prove it.
    b, c = coeffs.b, coeffs.c
    s2 = params.sigma2
    lin_scaled = s2 * tau1 * tau2 * b * b / params.p2 + params.p2 * tau2 * c / params.p2 - tau2 * c
    disc = math.sqrt(lin_scaled**2 + 4.0 * s2 * tau2**2 * tau1 * b * b * c / params.p2)
    return (lin_scaled + disc) / (2.0 * tau2 * b)


def corner_point(
    params: SystemParams,
    coeffs: DerivedCoeffs,
    tau1: float,
    tau2: float,
    method: str = "closed_form",
) -> CornerPoint:
    """Solve the boundary system Y = a1*(b + c/X), X = a2*(b + c/Y) with
    a_i = sigma2*tau_i/P_j.

    ``closed_form`` evaluates the quadratic-root expressions obtained by
    substitution; ``root_solve`` brackets the same substituted quadratic
    numerically and back-substitutes.  Both paths must satisfy the residual
    invariant (< 1e-9 relative on each equation).
    """
    if tau1 <= 0 or tau2 <= 0:
        raise DomainError(f"corner point needs positive thresholds; got ({tau1}, {tau2})")
    b, c = coeffs.b, coeffs.c
    a1 = params.sigma2 * tau1 / params.p2
    a2 = params.sigma2 * tau2 / params.p1
    # Substituting Y(X) gives b*X^2 + (c - a2*b^2 - a2*c/a1)*X - a2*b*c = 0.
    lin_x = c - a2 * b * b - a2 * c / a1
    const_x = -a2 * b * c
    if method == "closed_form":
        x0 = _positive_quadratic_root(b, lin_x, const_x)
        # The Y quadratic mirrors the X one with indices swapped; its linear
        # coefficient carries the cross-traffic term a1*c/a2.
        lin_y = c - a1 * b * b - a1 * c / a2
        y0 = _positive_quadratic_root(b, lin_y, -a1 * b * c)
    elif method == "root_solve":
        def poly(x: float) -> float:
            return b * x * x + lin_x * x + const_x

        hi = 1.0
        while poly(hi) <= 0.0:
            hi *= 2.0
            if hi > 1e300:
                raise DegenerateCaseError(
                    f"corner bracketing failed for tau=({tau1}, {tau2}), "
                    f"b={b}, c={c}: no sign change up to {hi}"
                )
        x0 = root_bracketed(poly, 0.0, hi, tol=1e-14)
        y0 = a1 * (b + c / x0)
    else:
        raise DomainError(f"unknown corner method {method!r}")
    point = CornerPoint(x0=x0, y0=y0)
    residual = _corner_residual(params, coeffs, tau1, tau2, x0, y0)
    if residual > 1e-9:
        raise DegenerateCaseError(
            f"corner point ({x0:.6g}, {y0:.6g}) violates the boundary system "
            f"by {residual:.3g} relative (tau=({tau1}, {tau2}), b={b}, c={c}, "
            f"P=({params.p1}, {params.p2}), sigma2={params.sigma2})"
        )
    return point


def _segment_integral(k: float, omega: float, v: float, method: str) -> float:
    """I = int_0^v exp(-k/z - z/omega) dz by midpoint expansion or quadrature.

    The fast path expands H(z) = exp(-k/z - z/omega) to second order around
    the midpoint nu = v/2 and integrates the polynomial exactly; it inherits
    the expansion's error, which grows as k and v grow (low SNR).
    """
    if v <= 0.0:
        return 0.0
    if method == "quadrature":
        def integrand(z: float) -> float:
            if z <= 0.0:
                return 0.0
            return math.exp(-k / z - z / omega)

        value, _ = quad_adaptive(integrand, 0.0, v, QuadSpec())
        return value
    if method != "taylor":
        raise DomainError(f"unknown outage method {method!r}")
    nu = 0.5 * v
    h0 = math.exp(-k / nu - nu / omega)
    slope = k / nu**2 - 1.0 / omega
    h1 = h0 * slope
    h2 = h0 * (slope * slope - 2.0 * k / nu**3)
    total = 0.0
    for order, deriv in enumerate((h0, h1, h2)):
        width = (v - nu) ** (order + 1) - (-nu) ** (order + 1)
        total += deriv / (math.factorial(order) * (order + 1)) * width
    return total


def joint_outage(
    params: SystemParams,
    coeffs: DerivedCoeffs,
    tau1: float,
    tau2: float,
    method: str = "quadrature",
) -> float:
    """P(gamma_1 < tau1, gamma_2 < tau2) via the corner-point decomposition:

        1 - exp(-X0/omega1 - Y0/omega2)
          - sum_{i != j} (1/omega_j) exp(-sigma2*tau_j*b/(P_i*omega_i)) * I_i,

    where I_i integrates the boundary strip between the corner and the
    curve.  ``quadrature`` is the reference; ``taylor`` is the fast
    midpoint-expansion path and may leave [0, 1] by its approximation error
    (logged, then clamped).
    """
    if tau1 <= 0.0 or tau2 <= 0.0:
        return 0.0
    if method not in OUTAGE_METHODS:
        raise DomainError(f"method must be one of {OUTAGE_METHODS}; got {method!r}")
    b, c = coeffs.b, coeffs.c
    corner = corner_point(params, coeffs, tau1, tau2)
    s2 = params.sigma2
    total = 1.0 - math.exp(-corner.x0 / params.omega1 - corner.y0 / params.omega2)
    strips = (
        # (tau_j, P_i, omega_i, omega_j, V_i): i = 1 integrates over the
        # |h2|^2 axis up to Y0; i = 2 over the |h1|^2 axis up to X0.
        (tau2, params.p1, params.omega1, params.omega2, corner.y0),
        (tau1, params.p2, params.omega2, params.omega1, corner.x0),
    )
    for tau_j, p_i, om_i, om_j, v in strips:
        k = s2 * tau_j * c / (p_i * om_i)
        pref = math.exp(-s2 * tau_j * b / (p_i * om_i)) / om_j
        total -= pref * _segment_integral(k, om_j, v, method)
    return _clamp_probability(total, "joint_outage", approximate=method == "taylor")


def outage_exact(
    params: SystemParams, targets: TargetRates, method: str = "quadrature"
) -> float:
    """System outage by inclusion-exclusion over the two directions."""
    coeffs = derived_coeffs(params)
    m1 = marginal_outage(params, coeffs, targets.tau1, 1) if targets.tau1 > 0 else 0.0
    m2 = marginal_outage(params, coeffs, targets.tau2, 2) if targets.tau2 > 0 else 0.0
    if targets.tau1 <= 0.0 or targets.tau2 <= 0.0:
        joint = 0.0
    else:
        joint = joint_outage(params, coeffs, targets.tau1, targets.tau2, method)
    return _clamp_probability(
        m1 + m2 - joint, "outage_exact", approximate=method == "taylor"
    )


def outage_bounds(params: SystemParams, targets: TargetRates) -> tuple[float, float]:
    """Closed-form lower/upper outage bounds.

    Both come from sandwiching the boundary-strip integrals I_i: dropping
    exp(-k/z) on the tail yields the upper bound, shifting the full-line
    integral by exp(-V/omega) the lower one.  The lower bound is
    Bessel-free:

        P >= 1 + e^(-X0/om1 - Y0/om2) - e^(-s2*tau2*b/(P1*om1) - Y0/om2)
                                      - e^(-s2*tau1*b/(P2*om2) - X0/om1),

    and the upper bound multiplies each marginal survival term by the
    corner attenuation e^(-V/omega).
    """
    tau1, tau2 = targets.tau1, targets.tau2
    coeffs = derived_coeffs(params)
    if tau1 <= 0.0 or tau2 <= 0.0:
        value = outage_exact(params, targets, method="quadrature")
        return value, value
    b, c = coeffs.b, coeffs.c
    s2 = params.sigma2
    corner = corner_point(params, coeffs, tau1, tau2)
    om1, om2 = params.omega1, params.omega2
    corner_mass = math.exp(-corner.x0 / om1 - corner.y0 / om2)
    # Marginal survival factors, direction 1 then direction 2.
    surv1 = math.exp(-s2 * tau1 * b / (params.p2 * om2)) * bessel_xk1(
        math.sqrt(4.0 * s2 * tau1 * c / (params.p2 * om1 * om2))
    )
    surv2 = math.exp(-s2 * tau2 * b / (params.p1 * om1)) * bessel_xk1(
        math.sqrt(4.0 * s2 * tau2 * c / (params.p1 * om1 * om2))
    )
    lower = (
        1.0
        + corner_mass
        - math.exp(-s2 * tau2 * b / (params.p1 * om1) - corner.y0 / om2)
        - math.exp(-s2 * tau1 * b / (params.p2 * om2) - corner.x0 / om1)
    )
    upper = (
        1.0
        + corner_mass
        - surv2 * math.exp(-corner.y0 / om2)
        - surv1 * math.exp(-corner.x0 / om1)
    )
    return (
        _clamp_probability(lower, "outage lower bound"),
        _clamp_probability(upper, "outage upper bound"),
    )


def outage_high_snr(params: SystemParams, targets: TargetRates) -> float:
    """Common high-SNR limit of the exact outage and both bounds:

        P_out ~ 2 - exp(-s2*tau2*b/(P1*om1)) - exp(-s2*tau1*b/(P2*om2)).

    Outside its regime the expression exceeds 1 by construction (each
    term approaches 1), so the contract clamps rather than errors.
    """
    b = derived_coeffs(params).b
    s2 = params.sigma2
    value = (
        2.0
        - math.exp(-s2 * targets.tau2 * b / (params.p1 * params.omega1))
        - math.exp(-s2 * targets.tau1 * b / (params.p2 * params.omega2))
    )
    return min(1.0, max(0.0, value))


def _direction_rates(params: SystemParams):
    """Per-direction (decay s, Bessel scale mu) of the SNR survival function:

    1 - F_i(z) = exp(-s*z) * xK1(2*sqrt(mu*z)).
    """
    coeffs = derived_coeffs(params)
    b, c = coeffs.b, coeffs.c
    out = []
    for p_j, om_other in ((params.p2, params.omega2), (params.p1, params.omega1)):
        a = p_j / params.sigma2
        out.append(
            (b / (a * om_other), c / (a * params.omega1 * params.omega2))
        )
    return out


def capacity_quadrature(params: SystemParams) -> float:
    """Reference ergodic capacity: (1/(2 ln 2)) * sum_i int_0^inf
    (1 - F_i(z))/(1+z) dz, integrated adaptively."""
    total = 0.0
    for s, mu in _direction_rates(params):
        def integrand(z: float, s=s, mu=mu) -> float:
            return math.exp(-s * z) * bessel_xk1(2.0 * math.sqrt(mu * z)) / (1.0 + z)

        value, _ = quad_adaptive(
            integrand,
            0.0,
            math.inf,
            SEMI_INFINITE_QUAD,
            scale=1.0 / s,
            points=[1.0],
        )
        total += value
    return total / (2.0 * LN2)


def _scaled_series_factors(s: float, l: int, j_method: str) -> tuple[float, float]:
    """Scaled ingredients of one capacity-series term.

    Returns ``(s^(l+1) * Psi(l+2, l+2; s), s^(l+1) * J_l(s) / (l+1)!)``
    where J_l(s) = int_0^inf exp(-s*z) z^(l+1) ln(z)/(1+z) dz.  Substituting
    u = s*z turns both into integrals of the well-scaled kernel
    e^-u u^(l+1) / Gamma(l+2) / (1 + u/s), so nothing here grows like
    s^-(l+1) even when s is tiny and l large (the unscaled factors overflow
    long before the series terms themselves stop being representable).

    ``j_method="approx"`` swaps J_l for its polynomial surrogate, obtained
    by dropping 1/(1+z) against z^l: scaled, (psi(l+1) - ln s)/(l+1).
    """
    n = l + 2
    lg = math.lgamma(n)
    ln_s = math.log(s)

    def kernel(u: float) -> float:
        if u <= 0.0:
            return 0.0
        return math.exp(-u + (l + 1) * math.log(u) - lg) / (1.0 + u / s)

    breakpoints = [s] if s < 4.0 * n else None
    e_psi, _ = quad_adaptive(
        kernel, 0.0, math.inf, SEMI_INFINITE_QUAD, scale=float(n), points=breakpoints
    )
    psi_scaled = e_psi / s
    if j_method == "approx":
        harmonic = sum(1.0 / i for i in range(1, l + 1))
        j_scaled = ((-EULER_GAMMA + harmonic) - ln_s) / (l + 1)
    else:
        def j_kernel(u: float) -> float:
            if u <= 0.0:
                return 0.0
            return kernel(u) * (math.log(u) - ln_s)

        e_j, _ = quad_adaptive(
            j_kernel, 0.0, math.inf, SEMI_INFINITE_QUAD,
            scale=float(n), points=[s],
        )
        j_scaled = e_j / s
    return psi_scaled, j_scaled


@dataclass(frozen=True)
class CapacitySeriesResult:
    """Truncated-series capacity value with its truncation diagnostics."""

    value: float
    terms_used: tuple[int, int]
    tail_estimate: float
    converged: bool


def capacity_direction_integral(
    s: float,
    mu: float,
    control: SeriesControl = DEFAULT_SERIES,
    j_method: str = "quadrature",
):
    """One direction's survival integral int_0^inf (1-F)/(1+z) dz in series
    form, for 1 - F(z) = exp(-s*z) * xK1(2*sqrt(mu*z)):

        Psi(1,1;s) + sum_{l>=0} (mu^(l+1)/l!) *
            [ (ln mu + 2*EULER - H_l - H_{l+1}) * Psi(l+2, l+2; s)
              + J_l / (l+1)! ].

    ``j_method="quadrature"`` evaluates J_l adaptively; ``"approx"`` uses
    its polynomial upper surrogate.  For mu = 0 every series term carries a
    factor mu and the integral collapses to Psi(1, 1; s).  Returns
    ``(value, SeriesResult)``.
    """
    if j_method not in ("quadrature", "approx"):
        raise DomainError(f"j_method must be 'quadrature' or 'approx'; got {j_method!r}")
    if mu < 0:
        raise DomainError(f"Bessel scale mu must be >= 0; got {mu}")
    base = tricomi_psi(1, s)
    if mu == 0.0:
        return base, SeriesResult(0.0, 0, 0.0, True)
    ln_mu = math.log(mu)
    ratio = mu / s  # geometric-ish scale of the scaled terms

    def term(l: int) -> float:
        h_l = sum(1.0 / i for i in range(1, l + 1))
        h_l1 = h_l + 1.0 / (l + 1)
        psi_scaled, j_scaled = _scaled_series_factors(s, l, j_method)
        return (ratio ** (l + 1) / math.factorial(l)) * (
            (ln_mu + 2.0 * EULER_GAMMA - h_l - h_l1) * psi_scaled + j_scaled
        )

    result = series_accumulate(term, control)
    if not result.converged:
        raise ConvergenceError(
            f"capacity series did not converge within {control.max_terms} "
            f"terms (s={s:.3g}, mu={mu:.3g}; tail {result.tail_estimate:.3g})"
        )
    return base + result.total, result


def capacity_series(
    params: SystemParams,
    control: SeriesControl = DEFAULT_SERIES,
    j_method: str = "quadrature",
) -> CapacitySeriesResult:
    """Ergodic capacity via the Bessel-series decomposition (both
    directions of :func:`capacity_direction_integral`, scaled by 1/(2 ln 2))."""
    total = 0.0
    terms_used = []
    tail = 0.0
    for s, mu in _direction_rates(params):
        value, result = capacity_direction_integral(s, mu, control, j_method)
        total += value
        terms_used.append(result.terms_used)
        tail = max(tail, result.tail_estimate)
    return CapacitySeriesResult(
        value=total / (2.0 * LN2),
        terms_used=tuple(terms_used),
        tail_estimate=tail,
        converged=True,
    )


@dataclass(frozen=True)
class CapacityBounds:
    lower: float
    tight_upper: float
    loose_upper: float


def capacity_bounds(params: SystemParams) -> CapacityBounds:
    """Capacity bound chain ``lower <= C_e <= tight_upper <= loose_upper``.

    The lower bound replaces x*K1(x) by its exp(-x) floor inside the
    survival integral; the loose upper replaces it by 1 (giving the bare
    Psi(1,1;.) sum); the tight upper is the series with the polynomial J
    surrogate.
    """
    lower = 0.0
    loose = 0.0
    for s, mu in _direction_rates(params):
        def integrand(z: float, s=s, mu=mu) -> float:
            return math.exp(-s * z - 2.0 * math.sqrt(mu * z)) / (1.0 + z)

        value, _ = quad_adaptive(
            integrand,
            0.0,
            math.inf,
            SEMI_INFINITE_QUAD,
            scale=1.0 / s,
            points=[1.0],
        )
        lower += value
        loose += tricomi_psi(1, s)
    tight = capacity_series(params, j_method="approx").value
    return CapacityBounds(
        lower=lower / (2.0 * LN2),
        tight_upper=tight,
        loose_upper=loose / (2.0 * LN2),
    )


def x0_symmetric(r: float, gamma: float, coeffs: DerivedCoeffs) -> float:
    """Corner coordinate under symmetric traffic (equal powers and targets):

        X0 = b*tau/(2*gamma) * (1 + sqrt(1 + 4*c*gamma/(b^2*tau))),

    with tau = (1+gamma)^r - 1.
    """
    if r <= 0:
        raise DomainError(f"multiplexing gain must be positive; got {r}")
    if gamma <= 0:
        raise DomainError(f"SNR must be positive; got {gamma}")
    b, c = coeffs.b, coeffs.c
    tau = (1.0 + gamma) ** r - 1.0
    return b * tau / (2.0 * gamma) * (
        1.0 + math.sqrt(1.0 + 4.0 * c * gamma / (b * b * tau))
    )


def dmt_coefficients(r: float, gamma: float, coeffs: DerivedCoeffs) -> tuple[float, float]:
    """SNR derivatives feeding the finite-SNR diversity formula.

    B = d/dgamma [((1+gamma)^r - 1)/gamma]; A = dX0/dgamma follows by the
    chain rule:

        A = B * [ (b/2)*(1 + S) - c*gamma / (b*tau*S) ],
        S = sqrt(1 + 4*c*gamma/(b^2*tau)).

    Both are verified against central finite differences in the test suite.
    """
    if r <= 0 or gamma <= 0:
        raise DomainError(f"need r > 0 and gamma > 0; got r={r}, gamma={gamma}")
    b, c = coeffs.b, coeffs.c
    tau = (1.0 + gamma) ** r - 1.0
    numer = r * gamma * (1.0 + gamma) ** (r - 1.0) - (1.0 + gamma) ** r + 1.0
    big_b = numer / gamma**2
    s_fac = math.sqrt(1.0 + 4.0 * c * gamma / (b * b * tau))
    big_a = big_b * (0.5 * b * (1.0 + s_fac) - c * gamma / (b * tau * s_fac))
    return big_a, big_b


def dmt(r: float, gamma: float, params: SystemParams) -> float:
    """Finite-SNR diversity gain d(r, gamma) = -d ln(P_out) / d ln(gamma).

    Evaluated on the closed-form lower-bound outage under symmetric traffic
    (P1 = P2, equal targets induced by the multiplexing gain r); requires a
    symmetric power setup.
    """
    if not math.isclose(params.p1, params.p2, rel_tol=1e-12):
        raise ParameterError(
            f"diversity formula assumes symmetric powers; got ({params.p1}, {params.p2})"
        )
    coeffs = derived_coeffs(params)
    b = coeffs.b
    tau = (1.0 + gamma) ** r - 1.0
    x0 = x0_symmetric(r, gamma, coeffs)
    big_a, big_b = dmt_coefficients(r, gamma, coeffs)
    om1, om2 = params.omega1, params.omega2
    weight = 1.0 / om1 + 1.0 / om2
    corner_mass = math.exp(-weight * x0)
    numer = big_a * weight * corner_mass
    denom = 1.0 + corner_mass
    for om_i, om_j in ((om1, om2), (om2, om1)):
        mass = math.exp(-b * tau / (gamma * om_i) - x0 / om_j)
        numer -= (big_b * b / om_i + big_a / om_j) * mass
        denom -= mass
    if denom <= 0.0 or not math.isfinite(denom):
        raise DegenerateCaseError(
            f"lower-bound outage underflowed to {denom} at gamma={gamma} "
            f"(r={r}); the log-derivative is undefined there"
        )
    return gamma * numer / denom
