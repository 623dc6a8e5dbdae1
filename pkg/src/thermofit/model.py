"""First-order thermal process models.

A lamp injects heat into a closed box at a rate proportional to its drive
voltage, while the box loses heat to the surroundings in proportion to the
temperature difference; the enclosed air stores the balance.  Lumping the
constants turns this energy balance into a first-order process with static
gain ``K = k / (A * U)`` and time constant ``tau = rho * cp / (A * U)``
whose unit-step response is the three-parameter exponential

    f(t) = (a - b) * exp(-c * t) + b

with ``a = f(0)``, ``b = f(infinity)`` and ``c = 1 / tau``.  This module
holds the parameter containers, the governing ODE, the closed-form step
response, and the conversion of the continuous process into discrete-time
difference equations.

Units are degrees Celsius and seconds throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DataLengthError,
    InvalidParameterError,
    UnstableDiscretizationError,
)

__all__ = [
    "PhysicalParams",
    "ProcessParams",
    "FitParams",
    "DiscreteModel",
    "heat_rates",
    "ode_rhs",
    "derive_process_params",
    "process_to_fit",
    "fit_to_process",
    "step_response",
    "discretize",
    "simulate_discrete",
    "simulate_continuous",
    "DISCRETIZATION_METHODS",
]

DISCRETIZATION_METHODS = ("tustin", "forward", "backward")


@dataclass(frozen=True)
class PhysicalParams:
    """Raw physical constants of the heated box.

    Attributes
    ----------
    lamp_constant : float
        Heat generated per volt of lamp drive, W/V.
    area : float
        Surface area through which heat escapes, m^2.
    heat_transfer_coeff : float
        Overall heat-transfer coefficient of the wall material, W/(m^2 K).
    rho : float
        Density of the enclosed air, kg/m^3.
    cp : float
        Specific heat capacity of the enclosed air, J/(kg K).
    t_ambient : float
        Ambient temperature outside the box, degC.
    """

    lamp_constant: float
    area: float
    heat_transfer_coeff: float
    rho: float
    cp: float
    t_ambient: float

    def __post_init__(self):
        for name in ("lamp_constant", "area", "heat_transfer_coeff", "rho", "cp"):
            if not getattr(self, name) > 0:
                raise InvalidParameterError(f"{name} must be positive")


@dataclass(frozen=True)
class ProcessParams:
    """Lumped first-order process: gain K (degC/V), time constant tau (s),
    ambient level (degC) and pure transport dead time (s)."""

    gain: float
    tau: float
    t_ambient: float
    dead_time: float = 0.0

    def __post_init__(self):
        if not self.tau > 0:
            raise InvalidParameterError("tau must be positive")
        if self.dead_time < 0:
            raise InvalidParameterError("dead_time must be non-negative")


@dataclass(frozen=True)
class FitParams:
    """The three unknowns of the exponential step-response fit.

    ``a`` is the initial value f(0) in degC, ``b`` the asymptote f(inf) in
    degC, and ``c`` the rate constant in 1/s.  Any physically meaningful fit
    has ``c > 0``; the container itself stays permissive because the solver
    may pass through (and occasionally settle on) non-positive rates, which
    the fitting layer flags rather than hides.  Operations that genuinely
    require ``c > 0`` (``fit_to_process``) enforce it themselves.
    """

    a: float
    b: float
    c: float

    def __post_init__(self):
        for name in ("a", "b", "c"):
            if not np.isfinite(getattr(self, name)):
                raise InvalidParameterError(f"{name} must be finite")


@dataclass(frozen=True)
class DiscreteModel:
    """Monic first-order (or generally FIR/IIR) difference equation.

    ``num[k]`` multiplies the input ``u[n-k]`` and ``den[k]`` (k >= 1)
    multiplies past outputs, with ``den[0] == 1``:

        y[n] = sum_k num[k] * u[n-k] - sum_{k>=1} den[k] * y[n-k]

    The input is additionally delayed by ``delay_samples`` whole samples.
    The model is a pure transfer-function realization: there is no ambient
    offset inside it, the caller supplies the initial output level.
    """

    num: tuple[float, ...]
    den: tuple[float, ...]
    sample_time: float
    delay_samples: int = 0

    def __post_init__(self):
        if not self.sample_time > 0:
            raise InvalidParameterError("sample_time must be positive")
        if not self.den or self.den[0] != 1.0:
            raise InvalidParameterError("den must be monic (leading coefficient 1)")
        if self.delay_samples < 0:
            raise InvalidParameterError("delay_samples must be non-negative")

    @property
    def pole(self) -> float:
        """Pole of a first-order model (negated feedback coefficient)."""
        if len(self.den) != 2:
            raise InvalidParameterError("pole is defined for first-order models only")
        return -self.den[1]

    @property
    def dc_gain(self) -> float:
        """Steady-state output per unit constant input: sum(num)/sum(den)."""
        return sum(self.num) / sum(self.den)


def heat_rates(p: PhysicalParams, temp: float, volts: float):
    """Return ``(generated, lost)`` heat-flow rates in watts.

    Generation is ``lamp_constant * volts``; loss is
    ``area * heat_transfer_coeff * (temp - t_ambient)`` and is negative when
    the box sits below ambient.
    """
    q_gen = p.lamp_constant * volts
    q_loss = p.area * p.heat_transfer_coeff * (temp - p.t_ambient)
    return q_gen, q_loss


def ode_rhs(p: PhysicalParams, temp: float, volts: float) -> float:
    """Temperature rate of change, degC/s: stored heat rate over rho*cp."""
    q_gen, q_loss = heat_rates(p, temp, volts)
    return (q_gen - q_loss) / (p.rho * p.cp)


def derive_process_params(p: PhysicalParams, dead_time: float = 0.0) -> ProcessParams:
    """Collapse the physical constants into the lumped first-order form."""
    au = p.area * p.heat_transfer_coeff
    return ProcessParams(
        gain=p.lamp_constant / au,
        tau=p.rho * p.cp / au,
        t_ambient=p.t_ambient,
        dead_time=dead_time,
    )


def process_to_fit(p: ProcessParams) -> FitParams:
    """Map the lumped process onto the exponential fit parameters.

    ``a = t_ambient / tau``, ``b = gain``, ``c = 1 / tau``.  Dead time has
    no slot in the three-parameter form and is dropped.
    """
    return FitParams(a=p.t_ambient / p.tau, b=p.gain, c=1.0 / p.tau)


def fit_to_process(f: FitParams) -> ProcessParams:
    """Invert :func:`process_to_fit`: tau = 1/c, gain = b, ambient = a/c.

    Dead time is not recoverable and comes back as 0.  Rejects ``c <= 0``,
    for which no stable first-order process exists.
    """
    if not f.c > 0:
        raise InvalidParameterError(f"rate constant must be positive, got c={f.c}")
    return ProcessParams(gain=f.b, tau=1.0 / f.c, t_ambient=f.a / f.c, dead_time=0.0)


def step_response(f: FitParams, t):
    """Evaluate ``(a - b) * exp(-c*t) + b`` at time(s) ``t >= 0`` (seconds).

    Accepts a scalar or array of times; returns the matching shape.
    """
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0):
        raise InvalidParameterError("step_response requires t >= 0")
    y = (f.a - f.b) * np.exp(-f.c * t_arr) + f.b
    return float(y) if y.ndim == 0 else y


def discretize(p: ProcessParams, method: str, sample_time: float) -> DiscreteModel:
    """Convert the continuous first-order process into a difference equation.

    The continuous transfer function ``K / (tau*s + 1)`` is mapped through
    the chosen substitution for ``s``:

    ========  ============================  =====================================
    method    substitution                  difference equation
    ========  ============================  =====================================
    forward   s -> (z - 1) / Ts             y[n] = (1 - Ts/tau) y[n-1]
                                                   + (K Ts/tau) u[n-1]
    backward  s -> (z - 1) / (Ts z)         y[n] = tau/(tau+Ts) y[n-1]
                                                   + K Ts/(tau+Ts) u[n]
    tustin    s -> (2/Ts) (z - 1)/(z + 1)   y[n] = (2tau-Ts)/(2tau+Ts) y[n-1]
                                                   + K Ts/(2tau+Ts) (u[n]+u[n-1])
    ========  ============================  =====================================

    Dead time becomes an integer input delay of ``round(dead_time / Ts)``
    samples.  The forward method is rejected when ``Ts >= 2 * tau``, where
    its pole leaves the unit circle.
    """
    if not sample_time > 0:
        raise InvalidParameterError("sample_time must be positive")
    k, tau, ts = p.gain, p.tau, sample_time
    if method == "forward":
        if ts >= 2.0 * tau:
            raise UnstableDiscretizationError(
                f"forward method unstable: sample_time={ts} >= 2*tau={2.0 * tau}"
            )
        num = (0.0, k * ts / tau)
        den = (1.0, -(1.0 - ts / tau))
    elif method == "backward":
        num = (k * ts / (tau + ts),)
        den = (1.0, -(tau / (tau + ts)))
    elif method == "tustin":
        g = k * ts / (2.0 * tau + ts)
        num = (g, g)
        den = (1.0, -((2.0 * tau - ts) / (2.0 * tau + ts)))
    else:
        raise InvalidParameterError(
            f"unknown method {method!r}; expected one of {DISCRETIZATION_METHODS}"
        )
    delay = int(round(p.dead_time / sample_time))
    return DiscreteModel(num=num, den=den, sample_time=sample_time, delay_samples=delay)


def simulate_discrete(m: DiscreteModel, inputs, initial_temp: float) -> np.ndarray:
    """Run the difference equation over an input sequence.

    The first output sample is pinned to ``initial_temp``; the recursion
    produces the rest.  Input samples before the start (and before the
    delay) are treated as zero, outputs before the start as the initial
    value.  Output length equals input length.
    """
    u = np.asarray(inputs, dtype=float)
    if u.ndim != 1 or u.size == 0:
        raise DataLengthError("input must be a non-empty 1-d sequence")
    if m.delay_samples > 0:
        delayed = np.zeros_like(u)
        delayed[m.delay_samples:] = u[: u.size - m.delay_samples]
        u = delayed
    y = np.empty(u.size)
    y[0] = initial_temp
    for n in range(1, u.size):
        acc = 0.0
        for k, b in enumerate(m.num):
            if n - k >= 0:
                acc += b * u[n - k]
        for k in range(1, len(m.den)):
            past = y[n - k] if n - k >= 0 else initial_temp
            acc -= m.den[k] * past
        y[n] = acc
    return y


def simulate_continuous(
    p: PhysicalParams, inputs, initial_temp: float, sample_time: float
) -> np.ndarray:
    """Integrate the energy-balance ODE with classical fixed-step RK4.

    ``inputs`` holds the lamp voltage on each interval ``[t_i, t_{i+1})``
    (zero-order hold), so the voltage is exactly constant within every
    integration step.  Output sample ``i`` is the temperature at ``t_i``,
    starting from ``initial_temp``; output length equals input length.
    """
    if not sample_time > 0:
        raise InvalidParameterError("sample_time must be positive")
    u = np.asarray(inputs, dtype=float)
    if u.ndim != 1 or u.size == 0:
        raise DataLengthError("input must be a non-empty 1-d sequence")
    h = sample_time
    y = np.empty(u.size)
    y[0] = initial_temp
    for i in range(u.size - 1):
        v = u[i]
        t0 = y[i]
        k1 = ode_rhs(p, t0, v)
        k2 = ode_rhs(p, t0 + 0.5 * h * k1, v)
        k3 = ode_rhs(p, t0 + 0.5 * h * k2, v)
        k4 = ode_rhs(p, t0 + h * k3, v)
        y[i + 1] = t0 + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return y
