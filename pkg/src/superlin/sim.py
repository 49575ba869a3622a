"""Fixed-step RK4 simulation and trajectory-level certificates.

Base and lifted systems are integrated side by side under the same
piecewise-constant control.  All integrators accept a batch of initial
states (shape ``(batch, dim)``) so many draws can be advanced together.
"""

import csv
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DivergenceError, NotSingleVisible, StructuralError
from .model import classify_observables, normalize_single_visible, partition, visible_parts
from .model import is_single_visible_normal
from .poly import as_fraction
from .vectorfield import iterated_lie_scalar

MAX_DERIVATIVE_ORDER = 4


@dataclass(frozen=True)
class ControlSignal:
    """Piecewise-constant scalar input.

    ``values[i]`` is applied on ``[breakpoints[i], breakpoints[i + 1])``.
    """

    breakpoints: tuple
    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "breakpoints", tuple(float(t) for t in self.breakpoints))
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if len(self.breakpoints) != len(self.values) + 1 or not self.values:
            raise StructuralError("need one value per interval between breakpoints")
        if any(b <= a for a, b in zip(self.breakpoints, self.breakpoints[1:])):
            raise StructuralError("breakpoints must be strictly increasing")

    @classmethod
    def constant(cls, value, horizon):
        return cls((0.0, float(horizon)), (value,))

    @classmethod
    def random(cls, rng, horizon, n_switches=4, low=-1.0, high=1.0):
        """Uniform levels in ``[low, high]`` switching at ``n_switches`` random instants."""
        switches = np.sort(rng.uniform(0.0, horizon, size=n_switches))
        levels = rng.uniform(low, high, size=n_switches + 1)
        return cls((0.0, *switches, float(horizon)), tuple(levels))

    def value_at(self, t):
        if t < self.breakpoints[0] or t > self.breakpoints[-1]:
            raise StructuralError(f"time {t} outside the signal's support")
        idx = int(np.searchsorted(self.breakpoints, t, side="right")) - 1
        return self.values[min(idx, len(self.values) - 1)]

    def on_grid(self, step, n_steps):
        """Level applied during each of ``n_steps`` integration steps.

        Breakpoints are snapped to the nearest grid point.
        """
        if self.breakpoints[0] > step / 2 or self.breakpoints[-1] < n_steps * step - step / 2:
            raise StructuralError("control signal does not cover the horizon")
        snapped = np.rint(np.asarray(self.breakpoints) / step).astype(int)
        out = np.empty(n_steps)
        for level, start, stop in zip(self.values, snapped, snapped[1:]):
            out[max(start, 0):max(min(stop, n_steps), 0)] = level
        out[max(snapped[-1], 0):] = self.values[-1]
        return out


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray

    def __post_init__(self):
        if len(self.times) != len(self.states):
            raise StructuralError("times and states differ in length")

    @property
    def final(self):
        return self.states[-1]


class CompiledMap:
    """Float evaluator for a :class:`~superlin.vectorfield.PolyVectorField`.

    Monomials are stored in graded-lex order; evaluation works on arrays
    of shape ``(..., n_vars)``.
    """

    def __init__(self, field):
        monos = sorted({m for comp in field for m in comp.terms},
                       key=lambda m: (sum(m), m), reverse=True)
        self.n_vars = field.n_vars
        self.exponents = np.array(monos, dtype=float).reshape(len(monos), field.n_vars)
        self.coeffs = np.array([[float(comp.coefficient(m)) for m in monos] for comp in field],
                               dtype=float).reshape(len(field), len(monos))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        mon = np.prod(x[..., None, :] ** self.exponents, axis=-1)
        return mon @ self.coeffs.T


def system_field(sys):
    """``(x, u) -> f(x) + u g(x)`` on float arrays."""
    f, g = CompiledMap(sys.f), CompiledMap(sys.g)
    return lambda x, u: f(x) + np.asarray(u)[..., None] * g(x)


def lifted_field(emb):
    """``(z, u) -> A_l z + B_l u + D_l`` on float arrays."""
    A = np.array([[float(v) for v in r] for r in emb.A_ell.to_rows()]).reshape(
        emb.n + emb.m, emb.n + emb.m)
    B = np.array([float(v) for v in emb.B_ell])
    D = np.array([float(v) for v in emb.D_ell])
    return lambda z, u: z @ A.T + np.asarray(u)[..., None] * B + D


def _grid(horizon, step):
    if step <= 0:
        raise StructuralError("step must be positive")
    n_steps = int(round(horizon / step))
    if n_steps < 1 or abs(n_steps * step - horizon) > 1e-9 * max(1.0, horizon):
        raise StructuralError(f"step {step} does not divide horizon {horizon}")
    return n_steps


def integrate(field, x0, u, horizon, step):
    """Classical fourth-order Runge-Kutta with a fixed step.

    ``x0`` is a state or a batch of states; ``u`` is one
    :class:`ControlSignal` or one per batch entry.  The control is held
    constant over each step.  Step increments are accumulated with
    compensated summation so rounding stays below the truncation error
    for small steps.
    """
    n_steps = _grid(horizon, step)
    x = np.array(x0, dtype=float)
    batched = x.ndim == 2
    signals = list(u) if isinstance(u, (list, tuple)) else [u]
    levels = np.stack([s.on_grid(step, n_steps) for s in signals], axis=-1)
    if batched:
        if levels.shape[1] == 1:
            levels = np.repeat(levels, x.shape[0], axis=1)
        elif levels.shape[1] != x.shape[0]:
            raise StructuralError("one control signal per initial state expected")
    else:
        if len(signals) != 1:
            raise StructuralError("a single state takes a single control signal")
        levels = levels[:, 0]

    states = np.empty((n_steps + 1,) + x.shape)
    states[0] = x
    h = step
    carry = np.zeros_like(x)  # Kahan compensation for the state accumulation
    # overflow shows up as a non-finite state and is reported below
    with np.errstate(over="ignore", invalid="ignore"):
        for i in range(n_steps):
            ui = levels[i]
            k1 = field(x, ui)
            k2 = field(x + 0.5 * h * k1, ui)
            k3 = field(x + 0.5 * h * k2, ui)
            k4 = field(x + h * k3, ui)
            incr = (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4) - carry
            updated = x + incr
            carry = (updated - x) - incr
            x = updated
            if not np.all(np.isfinite(x)):
                raise DivergenceError(f"state became non-finite at t={(i + 1) * h:g}", (i + 1) * h)
            states[i + 1] = x
    times = np.arange(n_steps + 1) * h
    return Trajectory(times, states)


def _lift(emb, x0):
    x0 = np.asarray(x0, dtype=float)
    p = CompiledMap(emb.p)
    return np.concatenate([x0, p(x0)], axis=-1)


def diagram_errors(sys, emb, x0, u, horizon, step, z0=None):
    """Per-draw ``max_t ||Pi z(t) - x(t)||_inf`` and ``max_t ||G p(x) - G z2||_inf``.

    Returns the two error arrays together with the base and lifted
    trajectories.  ``z0`` overrides the lifted initial state ``iota(x0)``.
    """
    if sys.n != emb.n:
        raise StructuralError(f"system has n={sys.n}, embedding n={emb.n}")
    n = emb.n
    base = integrate(system_field(sys), x0, u, horizon, step)
    lifted = integrate(lifted_field(emb), _lift(emb, x0) if z0 is None else z0, u, horizon, step)
    diff = np.abs(lifted.states[..., :n] - base.states)
    diagram = diff.max(axis=-1).max(axis=0)
    G = np.array([[float(v) for v in r] for r in partition(emb).G.to_rows()]).reshape(n, emb.m)
    p = CompiledMap(emb.p)
    gp = (p(base.states) - lifted.states[..., n:]) @ G.T
    gp_err = np.abs(gp).max(axis=-1).max(axis=0)
    return diagram, gp_err, base, lifted


def check_diagram(sys, emb, x0, u, horizon=2.0, step=1e-3):
    diagram, _, _, _ = diagram_errors(sys, emb, x0, u, horizon, step)
    return float(np.max(diagram))


def check_gp_identity(sys, emb, x0, u, horizon=2.0, step=1e-3, z0=None):
    _, gp, _, _ = diagram_errors(sys, emb, x0, u, horizon, step, z0=z0)
    return float(np.max(gp))


def check_derivative_identity(sys, emb, k, x0):
    """Exact residual ``L_{Ax}^k q(x0) - e1^T M^k p(x0)`` at a rational point."""
    if not 0 <= k <= MAX_DERIVATIVE_ORDER:
        raise StructuralError(f"derivative order must lie in [0, {MAX_DERIVATIVE_ORDER}]")
    if sys is not None and sys.n != emb.n:
        raise StructuralError(f"system has n={sys.n}, embedding n={emb.n}")
    if not is_single_visible_normal(emb):
        if classify_observables(emb).g_rank != 1:
            raise NotSingleVisible("derivative identity needs exactly one visible observable")
        emb = normalize_single_visible(emb)
    _, q = visible_parts(emb)
    b = partition(emb)
    point = [as_fraction(v) for v in x0]
    lhs = iterated_lie_scalar(b.A, q, k).evaluate(point)
    row = b.M.power(k).row(0)
    rhs = sum((c * v for c, v in zip(row, emb.p.evaluate(point))), Fraction(0))
    return lhs - rhs


def write_csv(path, base, lifted=None):
    """Write ``t, x_1..x_n[, z_1..z_{n+m}]`` with 17 significant digits."""
    n = base.states.shape[-1]
    header = ["t"] + [f"x_{i + 1}" for i in range(n)]
    if lifted is not None:
        header += [f"z_{i + 1}" for i in range(lifted.states.shape[-1])]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for i, t in enumerate(base.times):
            row = [t, *base.states[i]]
            if lifted is not None:
                row += list(lifted.states[i])
            writer.writerow([f"{v:.17g}" for v in row])
