"""End-to-end identification of a measured step response.

Binds the exponential step-response model to the solver: optional
smoothing, data-driven starting values, the analytic Jacobian, fit
statistics and the conversion back to process parameters.

When smoothing is requested the smoothed series is the fitting target and
the reference for R-squared, mirroring how slow thermal runs are analyzed
in practice (the raw series stays available to callers for overlays).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DataLengthError,
    FlatSeriesError,
    InvalidParameterError,
    NonUniformSamplingError,
)
from .model import FitParams, ProcessParams, fit_to_process
from .sgolay import SGConfig, sg_smooth
from .solver import FitResult, LMConfig, ResidualModel, Weights, lm_fit

__all__ = [
    "TimeSeries",
    "FitReport",
    "ExponentialStepModel",
    "step_response_jacobian",
    "initial_guess",
    "r_squared",
    "fit_series",
]

# Fraction of a step completed after one time constant: 1 - exp(-1).
_STEP_FRACTION = 0.6321


@dataclass(frozen=True)
class TimeSeries:
    """Uniformly sampled temperature record.

    ``t`` in seconds (strictly increasing), ``y`` in degC, ``rate`` the
    nominal sampling rate in Hz.  Spacing must match ``1/rate`` within
    1e-6 relative.  Arrays are copied and frozen at construction.
    """

    t: np.ndarray
    y: np.ndarray
    rate: float

    def __post_init__(self):
        t = np.array(self.t, dtype=float)
        y = np.array(self.y, dtype=float)
        if t.ndim != 1 or y.ndim != 1 or t.size != y.size:
            raise DataLengthError("t and y must be 1-d arrays of equal length")
        if t.size < 2:
            raise DataLengthError("a series needs at least 2 samples")
        if not self.rate > 0:
            raise InvalidParameterError("rate must be positive")
        dt = np.diff(t)
        if np.any(dt <= 0):
            raise InvalidParameterError("time must be strictly increasing")
        nominal = 1.0 / self.rate
        worst = float(np.max(np.abs(dt - nominal))) / nominal
        if worst > 1e-6:
            raise NonUniformSamplingError(
                f"sample spacing deviates from 1/rate by {worst:.3e} relative "
                "(tolerance 1e-6)"
            )
        t.flags.writeable = False
        y.flags.writeable = False
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.t.size


class ExponentialStepModel(ResidualModel):
    """Three-parameter step response ``(a - b) exp(-c t) + b``, p = (a, b, c)."""

    def predict(self, t, p):
        a, b, c = p
        return (a - b) * np.exp(-c * np.asarray(t, dtype=float)) + b

    def jacobian_row(self, t, p):
        a, b, c = p
        t = np.asarray(t, dtype=float)
        e = np.exp(-c * t)
        return np.stack(
            [e, 1.0 - e, -t * (a - b) * e],
            axis=-1,
        )


def step_response_jacobian(t, p):
    """Partial derivatives of the step-response model with respect to
    (a, b, c): ``(exp(-ct), 1 - exp(-ct), -t (a - b) exp(-ct))``.

    ``t`` (>= 0, seconds) may be a scalar or array; returns shape (..., 3).
    """
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0):
        raise InvalidParameterError("step_response_jacobian requires t >= 0")
    return ExponentialStepModel().jacobian_row(t_arr, np.asarray(p, dtype=float))


def initial_guess(ts: TimeSeries) -> FitParams:
    """Data-driven starting values for the exponential fit.

    ``a0`` is the mean of the first 1% of samples (at least 5), ``b0`` the
    mean of the last 5%.  ``c0 = 1 / t63`` where ``t63`` is the elapsed
    time at which the series first crosses 63.21% of the (b0 - a0) span;
    when no crossing exists, a third of the record length stands in for
    the time constant.  Rejects flat series, which carry no step to fit.
    """
    if ts.n < 10:
        raise DataLengthError("initial_guess needs at least 10 samples")
    head = max(5, ts.n // 100)
    tail = max(1, ts.n // 20)
    a0 = float(np.mean(ts.y[:head]))
    b0 = float(np.mean(ts.y[-tail:]))
    if abs(b0 - a0) <= 1e-9:
        raise FlatSeriesError(
            "series start and end levels coincide; nothing to fit"
        )
    threshold = a0 + _STEP_FRACTION * (b0 - a0)
    direction = 1.0 if b0 > a0 else -1.0
    crossed = direction * (ts.y - threshold) >= 0
    idx = int(np.argmax(crossed))
    if crossed[idx] and idx > 0:
        c0 = 1.0 / float(ts.t[idx] - ts.t[0])
    else:
        c0 = 3.0 / float(ts.t[-1] - ts.t[0])
    return FitParams(a=a0, b=b0, c=c0)


def r_squared(y, yhat) -> float:
    """Coefficient of determination 1 - SS_res / SS_tot.

    Rejects constant ``y``, whose total sum of squares is zero.
    """
    y = np.asarray(y, dtype=float)
    yhat = np.asarray(yhat, dtype=float)
    if y.ndim != 1 or y.shape != yhat.shape or y.size < 2:
        raise DataLengthError("y and yhat must be 1-d arrays of equal length >= 2")
    if np.ptp(y) == 0:
        raise FlatSeriesError("constant series has zero total sum of squares")
    ss_res = float(np.sum((y - yhat) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    return 1.0 - ss_res / ss_tot


@dataclass(frozen=True)
class FitReport:
    """Everything a fit run produced.

    ``process`` is None when the fitted rate constant is non-positive (no
    stable first-order process exists); the condition is also flagged in
    ``warnings``.  ``r_squared`` is measured against the fitting target
    (the smoothed series when smoothing was applied) and may be negative
    for fits worse than the mean predictor, which is flagged too.
    """

    fit: FitParams
    process: ProcessParams | None
    r_squared: float
    result: FitResult
    smoothing: SGConfig | None
    warnings: tuple[str, ...]


def fit_series(
    ts: TimeSeries,
    smoothing: SGConfig | None = None,
    cfg: LMConfig = LMConfig(),
    weights: Weights | None = None,
    p0: FitParams | None = None,
) -> FitReport:
    """Smooth (optionally), pick starting values, fit, and report.

    ``p0`` overrides the data-driven starting values.  Warnings flag a
    window larger than half the series, a non-positive fitted rate, an
    iteration-capped solver run and a negative R-squared; none of them
    aborts the run.
    """
    warnings: list[str] = []
    y_target = ts.y
    if smoothing is not None:
        if smoothing.window > ts.n // 2:
            warnings.append(
                f"smoothing window {smoothing.window} exceeds half the series "
                f"length ({ts.n}); expect edge-dominated output"
            )
        y_target = sg_smooth(ts.y, smoothing)

    if p0 is None:
        p0 = initial_guess(TimeSeries(ts.t, y_target, ts.rate))
    model = ExponentialStepModel()
    result = lm_fit(
        model, ts.t, y_target, weights, np.array([p0.a, p0.b, p0.c]), cfg
    )
    a, b, c = (float(v) for v in result.params)
    fit = FitParams(a=a, b=b, c=c)

    process = None
    if c > 0:
        process = fit_to_process(fit)
    else:
        warnings.append(
            f"fitted rate constant c={c:.6g} is not positive; no process "
            "parameters derived"
        )
    if result.converged == "max_iter":
        warnings.append(
            f"solver stopped at the iteration cap ({cfg.max_iter}) before "
            "meeting any tolerance"
        )

    r2 = r_squared(y_target, model.predict(ts.t, result.params))
    if r2 < 0:
        warnings.append("fit is worse than the mean predictor (negative R^2)")

    return FitReport(
        fit=fit,
        process=process,
        r_squared=r2,
        result=result,
        smoothing=smoothing,
        warnings=tuple(warnings),
    )
