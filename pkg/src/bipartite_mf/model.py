"""Parameters and the pressure functional of the two-population mean-field model.

The functional is

    f(mu1, mu2) = beta * g(mu1, mu2) - alpha1 * I(mu1) - alpha2 * I(mu2)

with the quadratic energy ``g`` and the entropy ``I``.  All functions accept
scalars or numpy arrays for the magnetization components.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DegenerateModelError, DomainError, UnsupportedCaseError

LN2 = math.log(2.0)


@dataclass(frozen=True)
class ModelParams:
    """Couplings, fields, population share and inverse temperature.

    ``beta = 0`` is accepted (infinite temperature); ``rescale`` needs
    ``beta > 0``.
    """

    j11: float
    j12: float
    j22: float
    h1: float = 0.0
    h2: float = 0.0
    alpha1: float = 0.5
    beta: float = 1.0

    def __post_init__(self):
        values = (self.j11, self.j12, self.j22, self.h1, self.h2, self.alpha1, self.beta)
        if not all(math.isfinite(v) for v in values):
            raise DomainError(f"non-finite parameter in {self}")
        if not 0.0 < self.alpha1 < 1.0:
            raise DomainError(f"alpha1 must lie in (0, 1), got {self.alpha1}")
        if self.beta < 0.0:
            raise DomainError(f"beta must be non-negative, got {self.beta}")

    @property
    def alpha2(self) -> float:
        return 1.0 - self.alpha1

    @property
    def coupling_matrix(self) -> np.ndarray:
        return np.array([[self.j11, self.j12], [self.j12, self.j22]])

    @property
    def field(self) -> np.ndarray:
        return np.array([self.h1, self.h2])

    def effective_matrix(self) -> np.ndarray:
        """``beta * J_ls * alpha_s``: the linear map inside the mean-field tanh."""
        alphas = np.array([self.alpha1, self.alpha2])
        return self.beta * self.coupling_matrix * alphas[None, :]

    @property
    def is_symmetric(self) -> bool:
        return self.alpha1 == 0.5 and self.j11 == self.j22

    @property
    def zero_field(self) -> bool:
        return self.h1 == 0.0 and self.h2 == 0.0

    def with_field(self, h1: float, h2: float) -> "ModelParams":
        return replace(self, h1=h1, h2=h2)

    def reflected(self) -> "ModelParams":
        """Flip the sign of population 1: ``(j12, h1) -> (-j12, -h1)``."""
        return replace(self, j12=-self.j12, h1=-self.h1)


@dataclass(frozen=True)
class Magnetization:
    mu1: float
    mu2: float

    def __post_init__(self):
        if not (math.isfinite(self.mu1) and math.isfinite(self.mu2)):
            raise DomainError(f"non-finite magnetization ({self.mu1}, {self.mu2})")
        if abs(self.mu1) > 1.0 or abs(self.mu2) > 1.0:
            raise DomainError(f"magnetization ({self.mu1}, {self.mu2}) outside [-1, 1]^2")

    def __iter__(self):
        yield self.mu1
        yield self.mu2

    def as_array(self) -> np.ndarray:
        return np.array([self.mu1, self.mu2])

    def reflected(self) -> "Magnetization":
        # + 0.0 keeps the origin free of negative zeros
        return Magnetization(-self.mu1 + 0.0, self.mu2)

    def __neg__(self) -> "Magnetization":
        return Magnetization(-self.mu1 + 0.0, -self.mu2 + 0.0)


@dataclass(frozen=True)
class ReducedParams:
    """Symmetric-case parameters rescaled by the largest eigenvalue.

    ``a = J11/|lambda_max|``, ``b = J12/|lambda_max|``,
    ``t = 2/(beta |lambda_max|)``.  The eigenvalues are those of the
    original (unrescaled) matrix.
    """

    a: float
    b: float
    t: float
    lambda_max: float
    lambda_min: float

    def __post_init__(self):
        if not self.t > 0.0:
            raise DomainError(f"t must be positive, got {self.t}")
        if self.lambda_max < self.lambda_min:
            raise DomainError("lambda_max < lambda_min")

    @classmethod
    def from_abt(cls, a: float, b: float, t: float) -> "ReducedParams":
        """Build from already rescaled values; requires ``|a + |b|| == 1``."""
        lam = a + abs(b)
        if abs(abs(lam) - 1.0) > 1e-12:
            raise DomainError(f"(a, b) = ({a}, {b}) is not normalized: |a + |b|| = {abs(lam)}")
        return cls(a=a, b=b, t=t, lambda_max=lam, lambda_min=a - abs(b))

    def to_model_params(self, h1: float = 0.0, h2: float = 0.0) -> ModelParams:
        """A representative with ``|lambda_max| = 1`` and the same f."""
        scale = abs(self.lambda_max)
        return ModelParams(
            j11=self.a * scale, j12=self.b * scale, j22=self.a * scale, h1=h1, h2=h2,
            alpha1=0.5, beta=2.0 / (self.t * scale),
        )


def rescale(p: ModelParams) -> ReducedParams:
    if not p.is_symmetric:
        raise UnsupportedCaseError("rescaling needs alpha1 = 1/2 and j11 = j22")
    if p.beta <= 0.0:
        raise DomainError("rescaling needs beta > 0")
    lam_max = p.j11 + abs(p.j12)
    lam_min = p.j11 - abs(p.j12)
    if lam_max == 0.0:
        raise DegenerateModelError("largest eigenvalue is zero")
    scale = abs(lam_max)
    return ReducedParams(
        a=p.j11 / scale,
        b=p.j12 / scale,
        t=2.0 / (p.beta * scale),
        lambda_max=lam_max,
        lambda_min=lam_min,
    )


# --- entropy and its derivatives -------------------------------------------


def _check_closed(x):
    x = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(x)) or np.any(np.abs(x) > 1.0):
        raise DomainError("entropy argument outside [-1, 1]")
    return x


def _check_open(x):
    x = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(x)) or np.any(np.abs(x) >= 1.0):
        raise DomainError("derivative requested on or outside the boundary |x| = 1")
    return x


def _unwrap(value):
    return float(value) if np.ndim(value) == 0 else value


def entropy(x):
    """``((1+x) ln(1+x) + (1-x) ln(1-x)) / 2``, with value ln 2 at ``|x| = 1``."""
    x = _check_closed(x)
    inner = np.abs(x) < 1.0
    xi = np.where(inner, x, 0.0)
    # x*atanh(x) + log1p(-x^2)/2 avoids the cancellation of the textbook form near 0
    out = np.where(inner, xi * np.arctanh(xi) + 0.5 * np.log1p(-xi * xi), LN2)
    return _unwrap(out)


def entropy_derivative(x, order: int = 1):
    """Derivatives of the entropy up to fourth order on the open interval."""
    x = _check_open(x)
    q = 1.0 - x * x
    if order == 1:
        out = np.arctanh(x)
    elif order == 2:
        out = 1.0 / q
    elif order == 3:
        out = 2.0 * x / q**2
    elif order == 4:
        out = (2.0 + 6.0 * x * x) / q**3
    else:
        raise ValueError(f"order must be 1..4, got {order}")
    return _unwrap(out)


# --- energy and pressure functional -----------------------------------------


def g_value(p: ModelParams, m):
    mu1, mu2 = m
    mu1 = np.asarray(mu1, dtype=float)
    mu2 = np.asarray(mu2, dtype=float)
    a1, a2 = p.alpha1, p.alpha2
    quad = a1 * a1 * p.j11 * mu1 * mu1 + 2.0 * a1 * a2 * p.j12 * mu1 * mu2 + a2 * a2 * p.j22 * mu2 * mu2
    return _unwrap(0.5 * quad + a1 * p.h1 * mu1 + a2 * p.h2 * mu2)


def f_value(p: ModelParams, m):
    mu1, mu2 = m
    return _unwrap(
        p.beta * np.asarray(g_value(p, (mu1, mu2)))
        - p.alpha1 * np.asarray(entropy(mu1))
        - p.alpha2 * np.asarray(entropy(mu2))
    )


def mean_field_argument(p: ModelParams, m) -> np.ndarray:
    """``beta * (alpha1 J_l1 mu1 + alpha2 J_l2 mu2 + h_l)`` for l = 1, 2."""
    return p.effective_matrix() @ np.asarray(tuple(m), dtype=float) + p.beta * p.field


def mean_field_residual(p: ModelParams, m) -> float:
    """Max-norm residual of ``mu = tanh(argument)``; finite on the closed square."""
    mu = np.asarray(tuple(m), dtype=float)
    return float(np.max(np.abs(mu - np.tanh(mean_field_argument(p, mu)))))


def f_gradient(p: ModelParams, m) -> np.ndarray:
    mu1, mu2 = m
    _check_open([mu1, mu2])
    a1, a2 = p.alpha1, p.alpha2
    d1 = p.beta * (a1 * a1 * p.j11 * mu1 + a1 * a2 * p.j12 * mu2 + a1 * p.h1) - a1 * np.arctanh(mu1)
    d2 = p.beta * (a1 * a2 * p.j12 * mu1 + a2 * a2 * p.j22 * mu2 + a2 * p.h2) - a2 * np.arctanh(mu2)
    return np.array([d1, d2], dtype=float)


def _coupling_hessian(p: ModelParams) -> np.ndarray:
    a1, a2 = p.alpha1, p.alpha2
    return p.beta * np.array(
        [[a1 * a1 * p.j11, a1 * a2 * p.j12], [a1 * a2 * p.j12, a2 * a2 * p.j22]]
    )


def f_hessian(p: ModelParams, m) -> np.ndarray:
    mu1, mu2 = m
    _check_open([mu1, mu2])
    h = _coupling_hessian(p)
    h[0, 0] -= p.alpha1 / (1.0 - mu1 * mu1)
    h[1, 1] -= p.alpha2 / (1.0 - mu2 * mu2)
    return h


def critical_hessian(p: ModelParams, m) -> np.ndarray:
    """Hessian of f at a solution of the mean-field equations.

    At a critical point ``1/(1 - mu_l^2) = cosh^2(u_l)`` with ``u`` the
    mean-field argument, which stays finite even when ``mu`` rounds to +-1
    in double precision.  Only meaningful at critical points.
    """
    u = mean_field_argument(p, m)
    h = _coupling_hessian(p)
    c = np.cosh(u) ** 2
    h[0, 0] -= p.alpha1 * c[0]
    h[1, 1] -= p.alpha2 * c[1]
    return h


def f_third_derivatives(p: ModelParams, m) -> np.ndarray:
    """Pure third derivatives ``d^3 f / d mu_l^3``; mixed ones vanish."""
    mu1, mu2 = m
    return np.array([-p.alpha1 * entropy_derivative(mu1, 3), -p.alpha2 * entropy_derivative(mu2, 3)])


def f_fourth_derivatives(p: ModelParams, m) -> np.ndarray:
    """Pure fourth derivatives ``d^4 f / d mu_l^4``; mixed ones vanish."""
    mu1, mu2 = m
    return np.array([-p.alpha1 * entropy_derivative(mu1, 4), -p.alpha2 * entropy_derivative(mu2, 4)])


def reduced_f_value(r: ReducedParams, m):
    """f in rescaled symmetric form: ``((a/2)(x1^2+x2^2) + b x1 x2)/(2t) - (I(x1)+I(x2))/2``."""
    x1, x2 = m
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    energy = (0.5 * r.a * (x1 * x1 + x2 * x2) + r.b * x1 * x2) / r.t
    return _unwrap(0.5 * (energy - np.asarray(entropy(x1)) - np.asarray(entropy(x2))))


def reduced_hessian_det(r: ReducedParams, m) -> float:
    """``((a - t/(1-x1^2))(a - t/(1-x2^2)) - b^2) / (4 t^2)``."""
    x1, x2 = m
    _check_open([x1, x2])
    d1 = r.a - r.t / (1.0 - x1 * x1)
    d2 = r.a - r.t / (1.0 - x2 * x2)
    return float((d1 * d2 - r.b * r.b) / (4.0 * r.t * r.t))
