"""Platt scaling: fit a sigmoid mapping raw scores to calibrated probabilities.

P(bot | s) = 1 / (1 + exp(A*s + B)), fit by Newton-Raphson on the negative
log-likelihood with the classic smoothed targets t+ = (N+ + 1)/(N+ + 2) and
t- = 1/(N- + 2). A fitted A < 0 makes the mapping strictly increasing, so
rank metrics (AUC) are unchanged by calibration.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import SingleClassInput

log = logging.getLogger(__name__)

MAX_NEWTON_ITER = 100
GRAD_TOL = 1e-9

_P_FLOOR = 5e-324                      # smallest subnormal double
_P_CEIL = float(np.nextafter(1.0, 0.0))


@dataclass(frozen=True)
class PlattCalibrator:
    A: float
    B: float
    converged: bool = True


def _sigmoid_neg(u: np.ndarray) -> np.ndarray:
    """Stable sigma(-u) = 1 / (1 + exp(u)) elementwise."""
    out = np.empty_like(u)
    pos = u >= 0
    eu = np.exp(-u[pos])
    out[pos] = eu / (1.0 + eu)
    out[~pos] = 1.0 / (1.0 + np.exp(u[~pos]))
    return out


def platt_nll(A: float, B: float, scores: np.ndarray, targets: np.ndarray) -> float:
    """Negative log-likelihood of the sigmoid fit at (A, B)."""
    u = A * scores + B
    # -log p = softplus(u), -log(1-p) = softplus(-u)
    return float(np.sum(targets * np.logaddexp(0.0, u) + (1.0 - targets) * np.logaddexp(0.0, -u)))


def fit_platt(scores, labels, max_iter: int = MAX_NEWTON_ITER, grad_tol: float = GRAD_TOL) -> PlattCalibrator:
    """Fit (A, B) by Newton-Raphson with step halving on NLL increase.

    labels are {0, 1} with 1 = bot. Raises SingleClassInput unless both
    labels are present. If the iteration cap is hit the best iterate is
    returned with converged=False.
    """
    s = np.asarray(scores, dtype=np.float64)
    y = np.asarray(labels)
    if s.shape != y.shape:
        raise SingleClassInput(f"scores/labels length mismatch: {s.shape} vs {y.shape}")
    n_pos = int(np.sum(y == 1))
    n_neg = int(y.size - n_pos)
    if n_pos == 0 or n_neg == 0:
        raise SingleClassInput("calibration needs at least one example of each label")
    t = np.where(y == 1, (n_pos + 1.0) / (n_pos + 2.0), 1.0 / (n_neg + 2.0))
    A = 0.0
    B = math.log((n_neg + 1.0) / (n_pos + 1.0))
    nll = platt_nll(A, B, s, t)
    converged = False
    for _ in range(max_iter):
        u = A * s + B
        p = _sigmoid_neg(u)
        r = t - p
        g_a = float(np.dot(r, s))
        g_b = float(r.sum())
        if max(abs(g_a), abs(g_b)) <= grad_tol:
            converged = True
            break
        w = p * (1.0 - p)
        h_aa = float(np.dot(w, s * s))
        h_ab = float(np.dot(w, s))
        h_bb = float(w.sum())
        det = h_aa * h_bb - h_ab * h_ab
        ridge = 0.0
        while det <= 1e-300:
            ridge = max(ridge * 10.0, 1e-12)
            det = (h_aa + ridge) * (h_bb + ridge) - h_ab * h_ab
        d_a = -((h_bb + ridge) * g_a - h_ab * g_b) / det
        d_b = -((h_aa + ridge) * g_b - h_ab * g_a) / det
        step = 1.0
        improved = False
        for _half in range(60):
            new_a, new_b = A + step * d_a, B + step * d_b
            new_nll = platt_nll(new_a, new_b, s, t)
            if new_nll <= nll:
                A, B, nll = new_a, new_b, new_nll
                improved = True
                break
            step *= 0.5
        if not improved:
            converged = True  # no descent direction improves: at a minimum
            break
    if not converged:
        log.warning("platt fit hit the %d-iteration cap (grad > %g)", max_iter, grad_tol)
    return PlattCalibrator(A=float(A), B=float(B), converged=converged)


def apply_platt(cal: PlattCalibrator, s: float) -> float:
    """Calibrated probability 1/(1+exp(A*s+B)), always inside open (0, 1)."""
    u = cal.A * s + cal.B
    if u >= 0:
        e = math.exp(-u)
        p = e / (1.0 + e)
    else:
        p = 1.0 / (1.0 + math.exp(u))
    return min(max(p, _P_FLOOR), _P_CEIL)


def apply_platt_batch(cal: PlattCalibrator, scores) -> np.ndarray:
    u = cal.A * np.asarray(scores, dtype=np.float64) + cal.B
    p = _sigmoid_neg(u)
    return np.clip(p, _P_FLOOR, _P_CEIL)
