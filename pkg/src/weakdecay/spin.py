"""Spin-1/2 precession in a static field along z: exact propagator and closed forms.

The two-level Hamiltonian is diagonal in the z basis and generates the
propagator ``U(t) = diag(e^{i w t/2}, e^{-i w t/2})`` with precession
frequency ``w``.  A spin prepared along +x precesses in the x-y plane:
the +x projector's strong expectation is ``(1 + cos w(t-t_i))/2`` and the
+y projector's is ``(1 - sin w(t-t_i))/2``.

For pre-selection along +x and post-selection along +y, -x or +x, the weak
value of the +x projector has closed forms (implemented below) that the
test suite cross-checks against the numeric kernel in :mod:`weakdecay.core`;
the kernel is the ground truth for these expressions.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import Propagator, StateVector, WeakValueQuery, projector_from_state, weak_value
from .errors import ClosedFormSingular

_SINGULAR_TOL = 1e-12

X_PLUS = StateVector(np.array([1.0, 1.0]) / math.sqrt(2.0))
X_MINUS = StateVector(np.array([1.0, -1.0]) / math.sqrt(2.0))
Y_PLUS = StateVector(np.array([1.0j, -1.0]) / math.sqrt(2.0))
Y_MINUS = StateVector(np.array([1.0, -1.0j]) / math.sqrt(2.0))
Z_PLUS = StateVector(np.array([1.0, 0.0]))
Z_MINUS = StateVector(np.array([0.0, 1.0]))


class SpinAxis(enum.Enum):
    """In-plane axes with closed-form strong expectations."""

    X_PLUS = "x+"
    Y_PLUS = "y+"
    X_MINUS = "x-"
    Y_MINUS = "y-"


class PostTag(enum.Enum):
    Y_PLUS = "y+"
    X_MINUS = "x-"
    X_PLUS = "x+"
    CUSTOM = "custom"


@dataclass(frozen=True)
class SpinParams:
    """Precession frequency and selection window."""

    omega: float
    t_i: float
    t_f: float

    def __post_init__(self):
        if not math.isfinite(self.omega):
            raise ValueError("omega must be finite")
        if not self.t_i < self.t_f:
            raise ValueError(f"need t_i < t_f, got ({self.t_i}, {self.t_f})")


@dataclass(frozen=True)
class PostChoice:
    """Post-selection choice: one of the three canonical axes or a custom state."""

    tag: PostTag
    custom_state: Optional[StateVector] = None

    def __post_init__(self):
        if self.tag is PostTag.CUSTOM:
            if self.custom_state is None or self.custom_state.dim != 2:
                raise ValueError("custom post-selection needs a normalized 2-vector")
        elif self.custom_state is not None:
            raise ValueError("only the CUSTOM tag carries a state")

    @classmethod
    def y_plus(cls) -> "PostChoice":
        return cls(PostTag.Y_PLUS)

    @classmethod
    def x_minus(cls) -> "PostChoice":
        return cls(PostTag.X_MINUS)

    @classmethod
    def x_plus(cls) -> "PostChoice":
        return cls(PostTag.X_PLUS)

    @classmethod
    def custom(cls, state: StateVector) -> "PostChoice":
        return cls(PostTag.CUSTOM, state)

    @property
    def state(self) -> StateVector:
        if self.tag is PostTag.Y_PLUS:
            return Y_PLUS
        if self.tag is PostTag.X_MINUS:
            return X_MINUS
        if self.tag is PostTag.X_PLUS:
            return X_PLUS
        return self.custom_state  # type: ignore[return-value]


def spin_propagator(omega: float, t: float) -> Propagator:
    """Exact propagator ``diag(e^{i w t/2}, e^{-i w t/2})``."""
    phase = 0.5 * omega * t
    return Propagator(np.diag([np.exp(1j * phase), np.exp(-1j * phase)]), t)


def spin_strong_closed(axis: SpinAxis, omega: float, t_i: float, t: float) -> float:
    """Closed-form strong expectation of the projector along ``axis``."""
    if t < t_i:
        raise ValueError(f"need t >= t_i, got t={t}, t_i={t_i}")
    a = omega * (t - t_i)
    if axis is SpinAxis.X_PLUS:
        return 0.5 * (1.0 + math.cos(a))
    if axis is SpinAxis.X_MINUS:
        return 0.5 * (1.0 - math.cos(a))
    if axis is SpinAxis.Y_PLUS:
        return 0.5 * (1.0 - math.sin(a))
    return 0.5 * (1.0 + math.sin(a))


def spin_weak_kernel(post: StateVector, p: SpinParams, t: float) -> complex:
    """Weak value of the +x projector via the numeric kernel (ground truth)."""
    query = WeakValueQuery(X_PLUS, post, projector_from_state(X_PLUS), p.t_i, t, p.t_f)
    return weak_value(
        query,
        spin_propagator(p.omega, t - p.t_i),
        spin_propagator(p.omega, p.t_f - t),
    )


def spin_weak_closed(choice: PostChoice, p: SpinParams, t: float) -> complex:
    """Closed-form weak value of the +x projector, pre-selected along +x.

    Half-angles below: ``a`` for the elapsed interval, ``b`` for the
    remaining interval, ``h`` for the whole window.  A custom post-selection
    falls through to the numeric kernel.
    """
    if not (p.t_i <= t <= p.t_f):
        raise ValueError(f"need t_i <= t <= t_f, got ({p.t_i}, {t}, {p.t_f})")
    a = 0.5 * p.omega * (t - p.t_i)
    b = 0.5 * p.omega * (p.t_f - t)
    h = 0.5 * p.omega * (p.t_f - p.t_i)

    if choice.tag is PostTag.X_PLUS:
        den = math.cos(h)
        if abs(den) <= _SINGULAR_TOL:
            raise ClosedFormSingular("post-selection orthogonal to the evolved state")
        return complex(math.cos(a) * math.cos(b) / den)
    if choice.tag is PostTag.X_MINUS:
        den = math.sin(h)
        if abs(den) <= _SINGULAR_TOL:
            raise ClosedFormSingular("post-selection orthogonal to the evolved state")
        return complex(0.5 - math.sin(a - b) / (2.0 * den))
    if choice.tag is PostTag.Y_PLUS:
        den = math.cos(h) - math.sin(h)
        if abs(den) <= _SINGULAR_TOL:
            raise ClosedFormSingular("post-selection orthogonal to the evolved state")
        return complex(math.cos(a) * (math.cos(b) - math.sin(b)) / den)
    return spin_weak_kernel(choice.state, p, t)
