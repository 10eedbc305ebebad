"""Inhomogeneous Poisson simulation by thinning.

A rate function is a sum of onset components

    Lambda(t) = sum_i A_i * x_i(t - t_i) * 1(t >= t_i),

where each shape x_i is one of: constant 1, offset sinusoid, exponential
decay, or polynomial.  Simulation proceeds window by window (unit-length
windows): draw homogeneous candidates under a per-window upper bound M of
Lambda and accept each candidate at t with probability Lambda(t)/M.  The
result is exact in distribution for any bound M >= sup Lambda on the
window.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .process import BinnedSeries, EventTimes, bin_events
from .seeding import generator

__all__ = [
    "Constant",
    "Sinusoid",
    "ExpDecay",
    "Polynomial",
    "JumpComponent",
    "RateSpec",
    "eval_rate",
    "rate_upper_bound",
    "simulate",
    "simulate_binned",
    "load_rate_spec",
    "save_rate_spec",
    "parse_rate_spec",
    "format_rate_spec",
    "preset_rate_spec",
    "RATE_PRESETS",
]


@dataclass(frozen=True)
class Constant:
    """x(u) = 1; the amplitude carries all the scale."""

    def value(self, u):
        return np.ones_like(np.asarray(u, dtype=np.float64))

    def value_at_zero(self) -> float:
        return 1.0

    def upper_bound(self, u0: float, u1: float) -> float:
        return 1.0

    name = "constant"

    def params(self) -> tuple:
        return ()


@dataclass(frozen=True)
class Sinusoid:
    """x(u) = offset + sin(omega*u + phase)."""

    offset: float
    omega: float
    phase: float = 0.0

    def value(self, u):
        u = np.asarray(u, dtype=np.float64)
        return self.offset + np.sin(self.omega * u + self.phase)

    def value_at_zero(self) -> float:
        return self.offset + math.sin(self.phase)

    def upper_bound(self, u0: float, u1: float) -> float:
        return self.offset + 1.0

    name = "sinusoid"

    def params(self) -> tuple:
        return (self.offset, self.omega, self.phase)


@dataclass(frozen=True)
class ExpDecay:
    """x(u) = exp(-rate*u), decreasing, so the window bound is the left value."""

    rate: float

    def __post_init__(self) -> None:
        if not (self.rate > 0):
            raise ValueError(f"decay rate must be positive, got {self.rate}")

    def value(self, u):
        return np.exp(-self.rate * np.asarray(u, dtype=np.float64))

    def value_at_zero(self) -> float:
        return 1.0

    def upper_bound(self, u0: float, u1: float) -> float:
        return math.exp(-self.rate * u0)

    name = "expdecay"

    def params(self) -> tuple:
        return (self.rate,)


@dataclass(frozen=True)
class Polynomial:
    """x(u) = sum_i coeffs[i] * u**i (ascending powers)."""

    coeffs: tuple

    def __post_init__(self) -> None:
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))
        if not self.coeffs:
            raise ValueError("polynomial needs at least one coefficient")

    def value(self, u):
        return np.polynomial.polynomial.polyval(
            np.asarray(u, dtype=np.float64), np.asarray(self.coeffs)
        )

    def value_at_zero(self) -> float:
        return self.coeffs[0]

    def upper_bound(self, u0: float, u1: float) -> float:
        # coefficient-norm bound: sum |c_i| * max(|u0|,|u1|)^i
        m = max(abs(u0), abs(u1))
        return float(sum(abs(c) * m**i for i, c in enumerate(self.coeffs)))

    name = "polynomial"

    def params(self) -> tuple:
        return self.coeffs


_SHAPE_NAMES = {
    "constant": Constant,
    "sinusoid": Sinusoid,
    "expdecay": ExpDecay,
    "exponential-decay": ExpDecay,
    "polynomial": Polynomial,
}


@dataclass(frozen=True)
class JumpComponent:
    """One onset component A * x(t - t0) * 1(t >= t0)."""

    amplitude: float
    onset: float
    shape: object

    def __post_init__(self) -> None:
        if not (math.isfinite(self.amplitude) and self.amplitude > 0):
            raise ValueError(f"amplitude must be positive, got {self.amplitude}")
        if not (math.isfinite(self.onset) and self.onset >= 0):
            raise ValueError(f"onset must be >= 0, got {self.onset}")
        if self.onset > 0 and not (self.shape.value_at_zero() > 0):
            raise ValueError(
                f"component with onset {self.onset} > 0 must jump: "
                f"shape value at the onset is {self.shape.value_at_zero()} (needs > 0)"
            )


@dataclass(frozen=True)
class RateSpec:
    """A rate function Lambda(t) as a sum of onset components."""

    components: tuple

    def __post_init__(self) -> None:
        object.__setattr__(self, "components", tuple(self.components))


def eval_rate(spec: RateSpec, t):
    """Lambda(t), vectorized; right-continuous at onsets (t == onset is in)."""
    t = np.asarray(t, dtype=np.float64)
    out = np.zeros_like(t)
    for comp in spec.components:
        active = t >= comp.onset
        if np.any(active):
            u = t[active] - comp.onset
            out[active] += comp.amplitude * comp.shape.value(u)
    return out if out.ndim else float(out)


def rate_upper_bound(spec: RateSpec, window: tuple) -> float:
    """An upper bound for Lambda on [window[0], window[1]].

    Conservative (may exceed the true supremum); used as the thinning
    envelope.
    """
    a, b = float(window[0]), float(window[1])
    if b < a:
        raise ValueError(f"window must satisfy a <= b, got {window}")
    total = 0.0
    for comp in spec.components:
        if comp.onset > b:
            continue
        u0 = max(a, comp.onset) - comp.onset
        u1 = b - comp.onset
        total += comp.amplitude * comp.shape.upper_bound(u0, u1)
    return total


def _validate_nonnegative(spec: RateSpec, horizon: float) -> None:
    """Reject specs that go negative anywhere on [0, horizon] (dense sampling)."""
    n = max(1000, int(10 * horizon) + 1)
    grid = np.linspace(0.0, horizon, n)
    onsets = [c.onset for c in spec.components if c.onset <= horizon]
    if onsets:
        grid = np.concatenate([grid, np.asarray(onsets)])
    vals = eval_rate(spec, grid)
    if np.any(vals < 0):
        t_bad = float(grid[int(np.argmin(vals))])
        raise ValueError(
            f"rate function is negative on [0, {horizon}]: "
            f"Lambda({t_bad}) = {float(np.min(vals))}"
        )


def _thinned_window(spec, a: float, b: float, rng) -> np.ndarray:
    """Accepted event times in [a, b), sorted."""
    envelope = rate_upper_bound(spec, (a, b))
    if envelope <= 0.0:
        return np.empty(0)
    n = rng.poisson(envelope * (b - a))
    if n == 0:
        return np.empty(0)
    u = np.sort(rng.uniform(a, b, size=n))
    lam = np.asarray(eval_rate(spec, u), dtype=np.float64)
    if np.any(lam > envelope * (1 + 1e-9)):
        i = int(np.argmax(lam))
        raise RuntimeError(
            f"internal consistency failure: envelope {envelope} below "
            f"Lambda({u[i]}) = {lam[i]} on window [{a}, {b})"
        )
    accept = rng.uniform(0.0, envelope, size=n) < lam
    return u[accept]


def simulate(spec: RateSpec, horizon: float, seed) -> EventTimes:
    """Draw one realization of the process on [0, horizon].

    ``seed`` may be an integer, a SimSeed, or a numpy Generator.  Equal
    (seed, stream) inputs give bit-identical output.
    """
    if not (math.isfinite(horizon) and horizon > 0):
        raise ValueError(f"horizon must be positive and finite, got {horizon}")
    _validate_nonnegative(spec, horizon)
    rng = seed if isinstance(seed, np.random.Generator) else generator(seed)
    chunks = []
    a = 0.0
    while a < horizon:
        b = min(a + 1.0, horizon)
        chunks.append(_thinned_window(spec, a, b, rng))
        a = b
    times = np.concatenate(chunks) if chunks else np.empty(0)
    times = np.unique(times)  # sorted; collisions have probability zero
    return EventTimes(times=times, horizon=float(horizon))


def simulate_binned(spec: RateSpec, horizon: float, seed, bin_width: float) -> BinnedSeries:
    """Simulate and aggregate into bins of ``bin_width`` starting at 0.

    Consumes randomness identically to ``simulate`` with the same seed, so
    the binned output equals binning the event-level output.
    """
    events = simulate(spec, horizon, seed)
    return bin_events(events, bin_width=bin_width, start_time=0.0)


# ---------------------------------------------------------------------------
# text format: one component per line, e.g.
#   A=1e6 t0=0 shape=sinusoid params=1,1,0


def _format_component(comp: JumpComponent) -> str:
    params = ",".join(repr(p) for p in comp.shape.params())
    return f"A={comp.amplitude!r} t0={comp.onset!r} shape={comp.shape.name} params={params}"


def format_rate_spec(spec: RateSpec) -> str:
    return "\n".join(_format_component(c) for c in spec.components) + "\n"


def _parse_component(line: str, where: str) -> JumpComponent:
    fields = {}
    for token in line.split():
        if "=" not in token:
            raise ValueError(f"{where}: expected key=value tokens, got {token!r}")
        key, _, value = token.partition("=")
        fields[key] = value
    missing = {"A", "t0", "shape"} - fields.keys()
    if missing:
        raise ValueError(f"{where}: missing fields {sorted(missing)}")
    shape_name = fields["shape"]
    if shape_name not in _SHAPE_NAMES:
        raise ValueError(
            f"{where}: unknown shape {shape_name!r}; "
            f"expected one of {sorted(set(_SHAPE_NAMES))}"
        )
    raw_params = fields.get("params", "")
    params = [float(p) for p in raw_params.split(",") if p.strip() != ""]
    cls = _SHAPE_NAMES[shape_name]
    try:
        if cls is Constant:
            if params:
                raise ValueError("constant shape takes no params")
            shape = Constant()
        elif cls is Sinusoid:
            if len(params) not in (2, 3):
                raise ValueError("sinusoid takes params=offset,omega[,phase]")
            shape = Sinusoid(*params)
        elif cls is ExpDecay:
            if len(params) != 1:
                raise ValueError("expdecay takes params=rate")
            shape = ExpDecay(params[0])
        else:
            shape = Polynomial(tuple(params))
        return JumpComponent(amplitude=float(fields["A"]), onset=float(fields["t0"]), shape=shape)
    except ValueError as exc:
        raise ValueError(f"{where}: {exc}") from None


def parse_rate_spec(text: str, source: str = "<string>") -> RateSpec:
    components = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        components.append(_parse_component(line, f"{source}: line {lineno}"))
    if not components:
        raise ValueError(f"{source}: no components")
    return RateSpec(components=tuple(components))


def load_rate_spec(path) -> RateSpec:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_rate_spec(fh.read(), source=str(path))


def save_rate_spec(spec: RateSpec, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_rate_spec(spec))


# ---------------------------------------------------------------------------
# presets


def _sin_plus_exp(base: float = 1e6, jump: float = 4e4, onset: float = 9.0) -> RateSpec:
    """Lambda(t) = base*(1 + sin t) + jump * exp(-(t - onset)) * 1(t >= onset)."""
    return RateSpec(
        components=(
            JumpComponent(amplitude=base, onset=0.0, shape=Sinusoid(offset=1.0, omega=1.0)),
            JumpComponent(amplitude=jump, onset=onset, shape=ExpDecay(rate=1.0)),
        )
    )


def _const_plus_exp(base: float = 1e4, jump: float = 8e3, onset: float = 1.0) -> RateSpec:
    """Lambda(t) = base + jump * exp(-(t - onset)) * 1(t >= onset)."""
    return RateSpec(
        components=(
            JumpComponent(amplitude=base, onset=0.0, shape=Constant()),
            JumpComponent(amplitude=jump, onset=onset, shape=ExpDecay(rate=1.0)),
        )
    )


RATE_PRESETS = {
    "sin-plus-exp": _sin_plus_exp,
    "const-plus-exp": _const_plus_exp,
}


def preset_rate_spec(name: str, **overrides) -> RateSpec:
    """Build a named rate preset; keyword overrides adjust its parameters."""
    if name not in RATE_PRESETS:
        raise ValueError(f"unknown rate preset {name!r}; have {sorted(RATE_PRESETS)}")
    return RATE_PRESETS[name](**overrides)
