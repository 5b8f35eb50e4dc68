"""Mass-action dynamics: right-hand side, integration, closed form, decay bounds."""

from __future__ import annotations

import io
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np
from scipy.optimize import nnls

from . import graph
from .errors import PreconditionError
from .jsonio import format_float
from .kinetics import SpectralReport, flux_system
from .network import ReactionNetwork

log = logging.getLogger(__name__)

TRIVIAL_ERROR = 1e-10
SLOPE_SLACK = 0.1


class BlowUpError(ArithmeticError):
    """The state became non-finite; ``last_time`` is the last time with a finite state."""

    def __init__(self, last_time: float):
        self.last_time = last_time
        super().__init__(f"state became non-finite after t = {last_time:g}")


class MassAction:
    """Vectorised mass-action field: sum_r k_r x^{y_r} (y'_r - y_r)."""

    def __init__(self, net: ReactionNetwork):
        self.net = net
        self.Y = np.array([[float(c) for c in r.source] for r in net.reactions], dtype=float).reshape(len(net), net.d)
        self.N = np.array([[float(c) for c in r.vector] for r in net.reactions], dtype=float).reshape(len(net), net.d)
        self.k = np.array([float(r.rate) for r in net.reactions], dtype=float)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        # numpy gives 0.0 ** 0 == 1.0, matching the 0^0 = 1 convention
        flux = self.k * np.prod(np.power(x, self.Y), axis=1)
        return flux @ self.N


def mass_action_rhs(net: ReactionNetwork, x: Sequence[float]) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (net.d,):
        raise ValueError(f"state has shape {x.shape}, expected ({net.d},)")
    if np.any(x < 0):
        raise ValueError("concentrations must be nonnegative")
    return MassAction(net)(x)


# -- matrix exponential -------------------------------------------------------------

_PADE6 = [math.factorial(12 - k) * math.factorial(6) / (math.factorial(12) * math.factorial(k) * math.factorial(6 - k))
          for k in range(7)]


def expm(X: np.ndarray) -> np.ndarray:
    """exp(X) by degree-6 diagonal Pade with scaling and squaring (||X/2^s||_1 <= 0.5)."""
    X = np.asarray(X, dtype=float)
    norm = np.abs(X).sum(axis=0).max() if X.size else 0.0
    s = max(0, math.ceil(math.log2(norm / 0.5))) if norm > 0.5 else 0
    Xs = X / 2.0**s
    I = np.eye(X.shape[0])
    P = I.copy()
    N = _PADE6[0] * I
    D = _PADE6[0] * I
    for k in range(1, 7):
        P = P @ Xs
        N = N + _PADE6[k] * P
        D = D + (-1) ** k * _PADE6[k] * P
    R = np.linalg.solve(D, N)
    for _ in range(s):
        R = R @ R
    return R


def augmented_generator(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    """M with [x(t), 1] = [x0, 1] exp(M t) for x' = xA + b."""
    d = A.shape[0]
    M = np.zeros((d + 1, d + 1))
    M[:d, :d] = A
    M[d, :d] = b
    return M


# -- trajectories -------------------------------------------------------------------

@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    species: tuple
    meta: dict = field(default_factory=dict)
    net: Optional[ReactionNetwork] = None

    def __len__(self) -> int:
        return len(self.times)

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def to_csv(self, target: Union[str, Path, io.TextIOBase, None] = None) -> str:
        lines = [",".join(("t",) + tuple(self.species))]
        for t, x in zip(self.times, self.states):
            lines.append(",".join(format_float(v) for v in (t, *x)))
        text = "\n".join(lines) + "\n"
        if isinstance(target, (str, Path)):
            Path(target).write_text(text, encoding="utf-8")
        elif target is not None:
            target.write(text)
        return text


def _time_grid(t_end: float, dt: float) -> np.ndarray:
    steps = max(1, math.ceil(t_end / dt - 1e-9))
    times = np.arange(steps + 1, dtype=float) * dt
    times[-1] = t_end
    return times


def simulate(
    net: ReactionNetwork,
    x0: Sequence[float],
    t_end: float = 10.0,
    dt: float = 1e-3,
    *,
    closed_form: bool = False,
) -> Trajectory:
    """Integrate the mass-action ODE on a fixed grid.

    The default is classic RK4. ``closed_form`` (first-order networks
    only) evaluates [x(t), 1] = [x0, 1] exp(Mt) at every grid time.
    Negative round-off is clamped to zero and counted in ``meta``.
    """
    x = np.asarray(x0, dtype=float).copy()
    if x.shape != (net.d,):
        raise ValueError(f"initial state has length {x.size}, network has {net.d} species")
    if np.any(x < 0):
        raise ValueError("initial state must be nonnegative")
    if not (dt > 0 and t_end > 0):
        raise ValueError("t_end and dt must be positive")
    times = _time_grid(t_end, dt)
    states = np.empty((len(times), net.d))
    states[0] = x
    meta = {"integrator": "closed-form" if closed_form else "rk4", "dt": dt, "clamped": 0, "min_before_clamp": 0.0}

    if closed_form:
        sys = flux_system(net)
        M = augmented_generator(sys.A, sys.b)
        z0 = np.append(x, 1.0)
        for i, t in enumerate(times[1:], start=1):
            states[i] = (z0 @ expm(M * t))[:-1]
            _clamp(states[i], meta)
            if not np.all(np.isfinite(states[i])):
                raise BlowUpError(float(times[i - 1]))
        return Trajectory(times, states, net.species, meta, net)

    f = MassAction(net)
    for i in range(1, len(times)):
        h = times[i] - times[i - 1]
        k1 = f(x)
        k2 = f(np.maximum(x + 0.5 * h * k1, 0.0))
        k3 = f(np.maximum(x + 0.5 * h * k2, 0.0))
        k4 = f(np.maximum(x + h * k3, 0.0))
        x = x + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(x)):
            raise BlowUpError(float(times[i - 1]))
        _clamp(x, meta)
        states[i] = x
    return Trajectory(times, states, net.species, meta, net)


def _clamp(x: np.ndarray, meta: dict) -> None:
    neg = x < 0
    if np.any(neg):
        meta["clamped"] += int(neg.sum())
        meta["min_before_clamp"] = min(meta["min_before_clamp"], float(x.min()))
        x[neg] = 0.0


# -- bound verification -------------------------------------------------------------

@dataclass(frozen=True)
class BoundReport:
    rho_used: float
    poly_degree: int
    fitted_coeffs: tuple
    max_ratio: float
    loglog_slope: Optional[float]
    passed: bool

    @property
    def pass_(self) -> bool:
        return self.passed

    def to_json(self) -> dict:
        return {
            "rho_used": self.rho_used,
            "poly_degree": self.poly_degree,
            "fitted_coeffs": list(self.fitted_coeffs),
            "max_ratio": self.max_ratio,
            "loglog_slope": self.loglog_slope,
            "pass": self.passed,
        }


def scaled_errors(traj: Trajectory, x_star: Sequence[float], rho: float) -> tuple[np.ndarray, np.ndarray]:
    """(e_i, e_i * exp(rho t_i)) with e_i the l1 distance to x_star."""
    e = np.abs(traj.states - np.asarray(x_star, dtype=float)).sum(axis=1)
    return e, e * np.exp(rho * traj.times)


def loglog_slope(times: np.ndarray, values: np.ndarray, t_min: float, t_max: float) -> Optional[float]:
    mask = (times >= t_min) & (times <= t_max) & (values > 0)
    if mask.sum() < 2:
        return None
    return float(np.polyfit(np.log(times[mask]), np.log(values[mask]), 1)[0])


def _check_class(traj: Trajectory, x_star: np.ndarray) -> None:
    if traj.net is None:
        return
    x0 = traj.states[0]
    for w in graph.conservation_laws(traj.net).vectors:
        w = np.array([float(c) for c in w])
        a, b = w @ x0, w @ x_star
        if abs(a - b) > 1e-8 * (1 + abs(a)):
            raise PreconditionError("x_star is not in the compatibility class of the trajectory")


def verify_bound(traj: Trajectory, x_star: Sequence[float], report: SpectralReport, *, t_min: float = 1.0) -> BoundReport:
    """Fit g of degree <= n-2 with e_i <= g(t_i) exp(-rho t_i) and test the growth of the scaled error.

    The nonnegative least-squares fit is inflated uniformly until it
    covers every sample; ``max_ratio`` is that inflation factor. The
    run passes when the scaled error grows no faster than t^(n-2) on
    [t_min, t_end] (log-log slope at most n - 2 + 0.1).
    """
    if report.rho is None or not report.rho > 0:
        raise PreconditionError("spectral report has no positive decay rate")
    x_star = np.asarray(x_star, dtype=float)
    _check_class(traj, x_star)
    rho = report.rho
    degree = max(0, report.n - 2)
    e, r = scaled_errors(traj, x_star, rho)
    if e.max() <= TRIVIAL_ERROR:
        return BoundReport(rho, 0, (float(r.max()),), 1.0, None, True)
    t = traj.times
    V = np.vander(t, degree + 1, increasing=True)
    coeffs, _ = nnls(V, r)
    g = V @ coeffs
    if np.any((g <= 0) & (r > 0)):
        # fall back to the constant envelope
        coeffs = np.zeros(degree + 1)
        coeffs[0] = r.max()
        g = V @ coeffs
    ratio = float(np.max(np.where(g > 0, r / np.where(g > 0, g, 1.0), 0.0)))
    inflation = max(1.0, ratio)
    coeffs = coeffs * inflation
    slope = loglog_slope(t, r, t_min, float(t[-1]))
    ok = math.isfinite(inflation) and (slope is None or slope <= degree + SLOPE_SLACK)
    return BoundReport(rho, degree, tuple(float(c) for c in coeffs), ratio, slope, bool(ok))
