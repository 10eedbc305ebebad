"""Higher-order discrete derivatives of a counting function.

The order-l discrete derivative with step delta is the alternating
binomial stencil

    D_l N(t) = sum_{j=0..l} (-1)^(l-j) C(l, j) * N(t + (j - l + 1)*delta)

i.e. a window reaching back to t - (l-1)*delta and forward to t + delta.
Order 1 is the forward increment N(t+delta) - N(t); order 2 is
N(t+delta) - 2 N(t) + N(t-delta).  Applied to a polynomial of degree < l
the stencil returns exactly zero, which is what makes high orders blind
to smooth trends while a rate jump of size A still shows up at scale
A * delta.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "MAX_ORDER",
    "DerivativeStencil",
    "DerivativeProfile",
    "discrete_derivative",
    "derivative_profile",
    "annihilation_check",
    "save_profile_csv",
    "load_profile_csv",
]

# Binomial stencil weights grow like 2^order, so the statistical value of
# going higher vanishes long before numerics do; orders above this are
# almost certainly a units mistake and are rejected.
MAX_ORDER = 20


def _check_order(order: int) -> int:
    if not isinstance(order, (int, np.integer)):
        raise TypeError(f"order must be an integer, got {type(order).__name__}")
    if order < 1:
        raise ValueError(f"order must be >= 1, got {order}")
    if order > MAX_ORDER:
        raise ValueError(f"order must be <= {MAX_ORDER}, got {order}")
    return int(order)


def _check_delta(delta: float) -> float:
    delta = float(delta)
    if not (math.isfinite(delta) and delta > 0):
        raise ValueError(f"delta must be positive and finite, got {delta}")
    return delta


@dataclass(frozen=True)
class DerivativeStencil:
    """The coefficients and sample offsets of one discrete-derivative stencil."""

    order: int
    delta: float
    coefficients: tuple

    @classmethod
    def of_order(cls, order: int, delta: float) -> "DerivativeStencil":
        order = _check_order(order)
        delta = _check_delta(delta)
        coeffs = tuple((-1) ** (order - j) * math.comb(order, j) for j in range(order + 1))
        return cls(order=order, delta=delta, coefficients=coeffs)

    def offsets(self) -> np.ndarray:
        """Sample-point offsets relative to t: (j - order + 1) * delta."""
        return (np.arange(self.order + 1) - self.order + 1) * self.delta

    @property
    def window(self) -> tuple:
        """(earliest, latest) offset touched by the stencil."""
        return (-(self.order - 1) * self.delta, self.delta)


def _as_counting(N, horizon):
    """Normalize N to (vectorized callable, horizon).

    Accepts anything with a ``count_at`` method (EventTimes, BinnedCounting)
    or a plain callable.  For callables with no known horizon the upper
    window bound is not enforced.
    """
    if hasattr(N, "count_at"):
        fn = N.count_at
        if horizon is None:
            horizon = getattr(N, "horizon", None)
    elif callable(N):
        fn = N
    else:
        raise TypeError(
            f"N must expose count_at(t) or be callable, got {type(N).__name__}"
        )
    return fn, (math.inf if horizon is None else float(horizon))


def discrete_derivative(N, order: int, delta: float, t: float, horizon=None) -> float:
    """Evaluate the order-``order`` discrete derivative of N at time t.

    The stencil touches [t - (order-1)*delta, t + delta], which must lie
    inside [0, horizon].  The result is an exact integer whenever N is
    integer-valued (float64 is exact for counts below 2**53).
    """
    stencil = DerivativeStencil.of_order(order, delta)
    fn, T = _as_counting(N, horizon)
    t = float(t)
    lo = (order - 1) * delta
    if t < lo - 1e-12 * max(1.0, abs(lo)):
        raise ValueError(
            f"t = {t} violates t >= (order-1)*delta = {lo}: "
            f"stencil window would start before 0"
        )
    if t + delta > T + 1e-12 * max(1.0, abs(T)):
        raise ValueError(
            f"t = {t} violates t + delta <= horizon = {T}: "
            f"stencil window would end at {t + delta}"
        )
    pts = t + stencil.offsets()
    vals = np.asarray(fn(pts), dtype=np.float64)
    return float(np.dot(stencil.coefficients, vals))


@dataclass(frozen=True)
class DerivativeProfile:
    """Discrete-derivative values on an evenly spaced time grid."""

    times: np.ndarray
    values: np.ndarray
    order: int
    delta: float
    grid_step: float
    window: tuple
    empty_window: bool = False

    def __len__(self) -> int:
        return int(self.times.size)

    def pairs(self):
        """Iterate (time, value) in time order."""
        return zip(self.times.tolist(), self.values.tolist())


def derivative_profile(
    N,
    order: int,
    delta: float,
    grid_step: "float | None" = None,
    window: "tuple | None" = None,
    horizon=None,
) -> DerivativeProfile:
    """Evaluate the discrete derivative on an evenly spaced grid.

    The grid covers the requested ``window`` (default: everything) clipped
    to the valid range [(order-1)*delta, horizon - delta].  ``grid_step``
    defaults to delta/10 and must not exceed delta.  A window that clips
    to nothing yields an empty profile with ``empty_window=True`` rather
    than an error.
    """
    order = _check_order(order)
    delta = _check_delta(delta)
    if grid_step is None:
        grid_step = delta / 10.0
    grid_step = float(grid_step)
    if not (0 < grid_step <= delta * (1 + 1e-12)):
        raise ValueError(f"grid_step must be in (0, delta={delta}], got {grid_step}")
    fn, T = _as_counting(N, horizon)
    if not math.isfinite(T):
        raise ValueError("horizon is required to build a profile (none known for this N)")

    lo = (order - 1) * delta
    hi = T - delta
    if window is not None:
        w_lo, w_hi = float(window[0]), float(window[1])
        if w_lo > w_hi:
            raise ValueError(f"window must satisfy lo <= hi, got {window}")
        lo, hi = max(lo, w_lo), min(hi, w_hi)
    if lo > hi:
        return DerivativeProfile(
            times=np.empty(0),
            values=np.empty(0),
            order=order,
            delta=delta,
            grid_step=grid_step,
            window=(lo, hi),
            empty_window=True,
        )

    n = int(math.floor((hi - lo) / grid_step + 1e-9)) + 1
    grid = lo + np.arange(n) * grid_step
    stencil = DerivativeStencil.of_order(order, delta)
    pts = grid[None, :] + stencil.offsets()[:, None]
    vals = np.asarray(fn(pts), dtype=np.float64)
    values = np.asarray(stencil.coefficients, dtype=np.float64) @ vals
    return DerivativeProfile(
        times=grid,
        values=values,
        order=order,
        delta=delta,
        grid_step=grid_step,
        window=(lo, hi),
        empty_window=False,
    )


def annihilation_check(order: int, delta: float, poly_coeffs, t: float) -> float:
    """Apply the order-(order+1) stencil to a degree-<=order polynomial.

    ``poly_coeffs`` are ascending-power coefficients.  The return value is
    exactly zero in exact arithmetic; callers compare against a float
    tolerance scaled by the largest stencil summand.
    """
    order = _check_order(order)
    delta = _check_delta(delta)
    stencil = DerivativeStencil.of_order(order + 1, delta)
    pts = float(t) + stencil.offsets()
    vals = np.polynomial.polynomial.polyval(pts, np.asarray(poly_coeffs, dtype=np.float64))
    return float(np.dot(stencil.coefficients, vals))


def save_profile_csv(profile: DerivativeProfile, path) -> None:
    """Write a profile as CSV with header ``t,value``."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "value"])
        for t, v in profile.pairs():
            writer.writerow([repr(t), repr(v)])


def load_profile_csv(path) -> tuple:
    """Read back a ``t,value`` CSV as (times, values) arrays."""
    times, values = [], []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip().lower() for h in header[:2]] != ["t", "value"]:
            raise ValueError(f"{path}: expected header 't,value', got {header}")
        for row in reader:
            if not row:
                continue
            times.append(float(row[0]))
            values.append(float(row[1]))
    return np.asarray(times), np.asarray(values)
