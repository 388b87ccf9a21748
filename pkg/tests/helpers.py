"""Shared test utilities: reference parameter sets and brute-force oracles."""

import numpy as np

from twrelay.model import SystemParams, build_params


def make_params(
    snr_db: float = 20.0,
    lam: float = 0.75,
    d1: float = 0.5,
    eta: float = 1.0,
    epsilon: float = 0.5,
    sigma2: float = 1.0,
    path_loss_exp: float = 3.0,
    p2_scale: float = 1.0,
) -> SystemParams:
    """Baseline setup: unit noise, symmetric powers at the given SNR."""
    p = sigma2 * 10.0 ** (snr_db / 10.0)
    return build_params(p, p * p2_scale, sigma2, eta, lam, epsilon, d1, path_loss_exp)


def simpson_panels(f, a: float, b: float, panels: int) -> float:
    """Fixed composite Simpson rule; the brute-force quadrature oracle."""
    xs = np.linspace(a, b, 2 * panels + 1)
    ys = np.array([f(x) for x in xs])
    h = (b - a) / (2 * panels)
    return h / 3.0 * (ys[0] + ys[-1] + 4.0 * ys[1:-1:2].sum() + 2.0 * ys[2:-2:2].sum())


def ks_distance(samples: np.ndarray, cdf) -> float:
    """Kolmogorov-Smirnov statistic of a sample against a scalar CDF."""
    xs = np.sort(samples)
    n = len(xs)
    theo = np.array([cdf(x) for x in xs])
    upper = np.abs(np.arange(1, n + 1) / n - theo).max()
    lower = np.abs(theo - np.arange(0, n) / n).max()
    return float(max(upper, lower))
