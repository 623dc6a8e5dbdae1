"""Shared test models for exercising the solver."""

import numpy as np

from thermofit import ResidualModel


class LinearModel(ResidualModel):
    """yhat = p0 * t + p1; its Jacobian is parameter-free."""

    def predict(self, t, p):
        return p[0] * np.asarray(t, dtype=float) + p[1]

    def jacobian_row(self, t, p):
        t = np.asarray(t, dtype=float)
        return np.stack([t, np.ones_like(t)], axis=-1)


class TwoParamExpModel(ResidualModel):
    """yhat = p0 * exp(-p1 * t)."""

    def predict(self, t, p):
        return p[0] * np.exp(-p[1] * np.asarray(t, dtype=float))

    def jacobian_row(self, t, p):
        t = np.asarray(t, dtype=float)
        e = np.exp(-p[1] * t)
        return np.stack([e, -p[0] * t * e], axis=-1)


class ScaledModel(ResidualModel):
    """Wraps another model, multiplying its output (and Jacobian) by gamma."""

    def __init__(self, inner, gamma):
        self.inner = inner
        self.gamma = gamma

    def predict(self, t, p):
        return self.gamma * self.inner.predict(t, p)

    def jacobian_row(self, t, p):
        return self.gamma * self.inner.jacobian_row(t, p)


class FlippedJacobianModel(ResidualModel):
    """Deliberately wrong Jacobian: flips the sign of one column."""

    def __init__(self, inner, column):
        self.inner = inner
        self.column = column

    def predict(self, t, p):
        return self.inner.predict(t, p)

    def jacobian_row(self, t, p):
        j = np.array(self.inner.jacobian_row(t, p))
        j[..., self.column] *= -1.0
        return j


class DeadParameterModel(ResidualModel):
    """yhat = p0 * t; p1 has no effect, so its Jacobian column is zero."""

    def predict(self, t, p):
        return p[0] * np.asarray(t, dtype=float)

    def jacobian_row(self, t, p):
        t = np.asarray(t, dtype=float)
        return np.stack([t, np.zeros_like(t)], axis=-1)
