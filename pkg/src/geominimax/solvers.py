"""Saddle-point solvers: corrected extragradient, descent-ascent, gap estimation.

The central iteration is the Riemannian corrected extragradient (RCEG):
an extrapolation step followed by a corrected update whose second stage
adds ``Log_w(x)`` so that, in the tangent space of the extrapolated
point, the update behaves exactly like its Euclidean counterpart:

    w = Exp_x(-eta grad_x f(x, y))        z = Exp_y(+eta grad_y f(x, y))
    x+ = Exp_w(-eta grad_x f(w, z) + Log_w(x))
    y+ = Exp_z(+eta grad_y f(w, z) + Log_z(y))

which satisfies ``Log_w(x+) = Log_w(x) - eta grad_x f(w, z)``. Averaged
iterates are maintained by geodesic running means over the extrapolated
pairs. The descent-ascent baseline (RGDA) takes simultaneous gradient
steps and is divergent on bilinear-type couplings.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .curvature import CurvatureBounds, rceg_step_size, tau
from .errors import (
    DomainError,
    GeominimaxError,
    NumericalError,
    ParameterError,
)
from .manifolds import Manifold, Point, Tangent
from .problems import MinimaxProblem

__all__ = [
    "SolverState",
    "IterationRecord",
    "RunResult",
    "GapInnerSettings",
    "GapEstimate",
    "make_state",
    "resolve_step_size",
    "rceg_step",
    "rgda_step",
    "geodesic_average_update",
    "riemannian_gd",
    "certified_gap",
    "estimate_duality_gap",
    "run",
]


@dataclass(frozen=True)
class SolverState:
    """State of a saddle solver after ``t`` completed steps.

    ``current`` is the pair point ``(x_t, y_t)`` on the problem's product
    manifold, ``extrapolated`` the last pair ``(w_t, z_t)`` (equal to
    ``current`` for RGDA), and ``average`` the geodesic running mean of
    the extrapolated pairs. The latter two are ``None`` before the first
    step.
    """

    t: int
    current: Point
    extrapolated: Optional[Point]
    average: Optional[Point]
    eta: float

    def __post_init__(self):
        if self.t < 0:
            raise ParameterError(f"iteration counter must be >= 0, got {self.t}")
        if not (self.eta > 0.0 and math.isfinite(self.eta)):
            raise ParameterError(f"step size must be positive and finite, got {self.eta!r}")


@dataclass(frozen=True)
class IterationRecord:
    """Diagnostics for one recorded iteration."""

    t: int
    value: float
    grad_norm_x: float
    grad_norm_y: float
    dist_to_ref: Optional[float]
    gap_estimate: Optional[float]
    wall_ms: float


def make_state(problem: MinimaxProblem, x0: Point, y0: Point, eta: float) -> SolverState:
    """Initial solver state at ``(x0, y0)``."""
    problem.manifold_x._check_point(x0, "x0")
    problem.manifold_y._check_point(y0, "y0")
    return SolverState(
        t=0,
        current=problem.domain.join(x0, y0),
        extrapolated=None,
        average=None,
        eta=float(eta),
    )


def resolve_step_size(problem: MinimaxProblem, eta) -> float:
    """Resolve an explicit or ``"auto"`` step size for a problem.

    Auto mode applies the curvature-safe constant-step rule
    ``min(1/sqrt(tau_m), 1/sqrt(tau_n)) / (2 L)`` with the distortion
    ratios computed from each factor's declared curvature bounds and
    diameter, and ``L`` from the problem (estimated empirically when the
    problem does not know its constant).
    """
    if eta == "auto":
        mx, my = problem.manifold_x, problem.manifold_y
        tau_m = tau(CurvatureBounds(min(mx.kappa_min, 0.0), mx.kappa_max, mx.diameter_bound))
        tau_n = tau(CurvatureBounds(min(my.kappa_min, 0.0), my.kappa_max, my.diameter_bound))
        return rceg_step_size(problem.smoothness(), tau_m, tau_n)
    eta = float(eta)
    if not (eta > 0.0 and math.isfinite(eta)):
        raise ParameterError(f"step size must be positive and finite, got {eta!r}")
    return eta


def geodesic_average_update(manifold: Manifold, average: Optional[Point], new: Point, t: int) -> Point:
    """Running geodesic mean after seeing ``t`` previous points.

    Moves the old average a fraction ``1/(t+1)`` of the way along the
    geodesic toward ``new``; with ``t = 0`` (or no previous average) the
    average is ``new`` itself. On Euclidean space this reproduces the
    arithmetic running mean.
    """
    if t < 0:
        raise ParameterError(f"counter must be >= 0, got {t}")
    if average is None or t == 0:
        return new
    step = (1.0 / (t + 1.0)) * manifold.log(average, new)
    return manifold.exp(average, step)


def _pair_grads(problem: MinimaxProblem, pair: Point) -> tuple[Tangent, Tangent]:
    x, y = problem.domain.split(pair)
    return problem.grad_x(x, y), problem.grad_y(x, y)


def rceg_step(
    problem: MinimaxProblem,
    state: SolverState,
    grads: Optional[tuple[Tangent, Tangent]] = None,
) -> SolverState:
    """One corrected extragradient step.

    ``grads`` may carry precomputed gradients at the current pair (they
    are recomputed otherwise); the harness uses this to share one
    gradient evaluation between diagnostics and the step.
    """
    prod = problem.domain
    mx, my = problem.manifold_x, problem.manifold_y
    eta = state.eta
    x, y = prod.split(state.current)
    gx, gy = grads if grads is not None else _pair_grads(problem, state.current)
    w = mx.exp(x, (-eta) * gx)
    z = my.exp(y, eta * gy)
    gxw = problem.grad_x(w, z)
    gyz = problem.grad_y(w, z)
    x1 = mx.exp(w, (-eta) * gxw + mx.log(w, x))
    y1 = my.exp(z, eta * gyz + my.log(z, y))
    extrapolated = prod.join(w, z)
    average = geodesic_average_update(prod, state.average, extrapolated, state.t)
    return SolverState(
        t=state.t + 1,
        current=prod.join(x1, y1),
        extrapolated=extrapolated,
        average=average,
        eta=eta,
    )


def rgda_step(
    problem: MinimaxProblem,
    state: SolverState,
    grads: Optional[tuple[Tangent, Tangent]] = None,
) -> SolverState:
    """One simultaneous gradient descent-ascent step (the baseline)."""
    prod = problem.domain
    mx, my = problem.manifold_x, problem.manifold_y
    eta = state.eta
    x, y = prod.split(state.current)
    gx, gy = grads if grads is not None else _pair_grads(problem, state.current)
    x1 = mx.exp(x, (-eta) * gx)
    y1 = my.exp(y, eta * gy)
    current = prod.join(x1, y1)
    average = geodesic_average_update(prod, state.average, current, state.t)
    return SolverState(t=state.t + 1, current=current, extrapolated=current, average=average, eta=eta)


_STEPPERS: dict[str, Callable] = {"rceg": rceg_step, "rgda": rgda_step}


def riemannian_gd(
    manifold: Manifold,
    phi: Callable[[Point], float],
    grad: Callable[[Point], Tangent],
    x0: Point,
    eta: float,
    max_iters: int,
    tol: float,
) -> tuple[Point, int]:
    """Plain Riemannian gradient descent ``x+ = Exp_x(-eta grad(x))``.

    Stops when the gradient norm falls to ``tol`` or the iteration cap
    is reached; returns the final iterate and the number of steps taken.

    Raises
    ------
    NumericalError
        If the objective value increases for 10 consecutive steps
        (divergence) or becomes non-finite.
    """
    if not (eta > 0.0 and math.isfinite(eta)):
        raise ParameterError(f"step size must be positive and finite, got {eta!r}")
    if max_iters < 0:
        raise ParameterError(f"max_iters must be >= 0, got {max_iters}")
    x = x0
    prev = float(phi(x))
    increases = 0
    for it in range(max_iters):
        g = grad(x)
        if manifold.norm(g) <= tol:
            return x, it
        x = manifold.exp(x, (-eta) * g)
        val = float(phi(x))
        if not math.isfinite(val):
            raise NumericalError("inner gradient descent produced a non-finite value")
        if val > prev:
            increases += 1
            if increases >= 10:
                raise NumericalError(
                    "inner gradient descent diverged: objective increased for 10 consecutive steps"
                )
        else:
            increases = 0
        prev = val
    return x, max_iters


@dataclass(frozen=True)
class GapInnerSettings:
    """Settings for the inner solvers of :func:`estimate_duality_gap`."""

    eta: Optional[float] = None  # None: 1 / (2 L)
    tol: float = 1e-8
    max_iters: int = 10000


@dataclass(frozen=True)
class GapEstimate:
    """Result of a duality-gap estimation.

    ``estimate`` is ``max_y f(x^, y) - min_x f(x, y^)`` as achieved by
    the inner solvers (floored at 0), or ``None`` when an inner solve
    failed to converge (``available`` False, reason in ``diagnostic``).
    ``certified`` is the reference-based lower bound
    ``f(x^, y*) - f(x*, y^)`` when a known saddle exists.
    """

    estimate: Optional[float]
    certified: Optional[float]
    available: bool
    diagnostic: str = ""


def certified_gap(problem: MinimaxProblem, x_hat: Point, y_hat: Point) -> Optional[float]:
    """Lower bound ``f(x^, y*) - f(x*, y^)`` on the duality gap, or None.

    Valid because ``f(x^, y*) <= max_y f(x^, y)`` and
    ``f(x*, y^) >= min_x f(x, y^)``. Floored at 0.
    """
    if problem.known_saddle is None:
        return None
    xs, ys = problem.known_saddle
    return max(0.0, float(problem.value(x_hat, ys)) - float(problem.value(xs, y_hat)))


def estimate_duality_gap(
    problem: MinimaxProblem,
    at: Point,
    inner: Optional[GapInnerSettings] = None,
) -> GapEstimate:
    """Estimate ``max_y f(x^, y) - min_x f(x, y^)`` at a pair point.

    Runs Riemannian gradient ascent on the ``y`` slice and descent on
    the ``x`` slice, both started from the given pair. The estimate is
    only trusted when both inner solves drive their gradient norm to the
    tolerance; otherwise the gap is reported as not available (this is
    what happens on problems with unbounded slices, such as bilinear
    couplings on all of R^n).
    """
    if inner is None:
        inner = GapInnerSettings()
    mx, my = problem.manifold_x, problem.manifold_y
    x_hat, y_hat = problem.domain.split(at)
    eta = inner.eta if inner.eta is not None else 1.0 / (2.0 * problem.smoothness())
    cert = certified_gap(problem, x_hat, y_hat)
    try:
        y_best, _ = riemannian_gd(
            my,
            lambda p: -float(problem.value(x_hat, p)),
            lambda p: -1.0 * problem.grad_y(x_hat, p),
            y_hat,
            eta,
            inner.max_iters,
            inner.tol,
        )
        if my.norm(problem.grad_y(x_hat, y_best)) > inner.tol:
            return GapEstimate(None, cert, False, "inner ascent did not reach tolerance (possibly unbounded slice)")
        x_best, _ = riemannian_gd(
            mx,
            lambda p: float(problem.value(p, y_hat)),
            lambda p: problem.grad_x(p, y_hat),
            x_hat,
            eta,
            inner.max_iters,
            inner.tol,
        )
        if mx.norm(problem.grad_x(x_best, y_hat)) > inner.tol:
            return GapEstimate(None, cert, False, "inner descent did not reach tolerance (possibly unbounded slice)")
    except GeominimaxError as exc:
        return GapEstimate(None, cert, False, f"inner solver failed: {exc}")
    est = max(0.0, float(problem.value(x_hat, y_best)) - float(problem.value(x_best, y_hat)))
    return GapEstimate(est, cert, True, "")


@dataclass
class RunDiagnostics:
    """Recording configuration for :func:`run`.

    ``record_every`` is the row cadence, ``gap_every`` the duality-gap
    cadence (``None`` disables gap estimation), ``reference`` overrides
    the distance reference (defaults to the problem's known saddle), and
    ``keep_averages`` retains the averaged pair after every step.
    """

    record_every: int = 1
    gap_every: Optional[int] = None
    gap_inner: Optional[GapInnerSettings] = None
    reference: Optional[tuple[Point, Point]] = None
    keep_averages: bool = False


@dataclass
class RunResult:
    """Trace and final state of a solver run."""

    records: list[IterationRecord]
    state: SolverState
    status: str  # "ok" or "diverged"
    diagnostic: str
    eta: float
    algo: str
    averages: list[tuple[int, Point]] = field(default_factory=list)

    @property
    def averaged_pair(self) -> Optional[tuple[Point, Point]]:
        if self.state.average is None:
            return None
        prod = self.state.average.manifold
        return prod.split(self.state.average)


# Distance from the initial pair beyond which a run is declared divergent,
# as a multiple of the initial distance scale.
_DIVERGENCE_FACTOR = 1e3


def run(
    problem: MinimaxProblem,
    algo: str,
    iters: int,
    start: tuple[Point, Point],
    eta="auto",
    diagnostics: Optional[RunDiagnostics] = None,
) -> RunResult:
    """Run a saddle solver for ``iters`` steps with diagnostics.

    Records a row for the initial point and then at the configured
    cadence (always including the final iteration). Gradient norms in a
    row are evaluated at that row's iterate; the evaluation is shared
    with the following step. Divergence (non-finite values, exp-guard
    violations, or the current pair drifting more than 1000 times the
    initial distance scale from the start) terminates the trace early
    with status ``"diverged"``.
    """
    if algo not in _STEPPERS:
        raise ParameterError(f"unknown algorithm {algo!r}, expected one of {sorted(_STEPPERS)}")
    if iters < 1:
        raise ParameterError(f"iteration budget must be >= 1, got {iters}")
    if diagnostics is None:
        diagnostics = RunDiagnostics()
    if diagnostics.record_every < 1:
        raise ParameterError(f"record_every must be >= 1, got {diagnostics.record_every}")
    if diagnostics.gap_every is not None and diagnostics.gap_every < 1:
        raise ParameterError(f"gap_every must be >= 1, got {diagnostics.gap_every}")
    step = _STEPPERS[algo]
    eta_val = resolve_step_size(problem, eta)
    prod = problem.domain
    state = make_state(problem, start[0], start[1], eta_val)
    initial = state.current
    reference = diagnostics.reference if diagnostics.reference is not None else problem.known_saddle
    ref_pair = prod.join(reference[0], reference[1]) if reference is not None else None
    scale = max(1.0, prod.distance(initial, ref_pair)) if ref_pair is not None else 1.0
    threshold = _DIVERGENCE_FACTOR * scale

    records: list[IterationRecord] = []
    averages: list[tuple[int, Point]] = []
    status = "ok"
    diagnostic = ""
    t_start = time.perf_counter()

    def should_record(t: int) -> bool:
        return t % diagnostics.record_every == 0 or t == iters

    # Inner gap solvers get ten times the outer budget (with a floor) so
    # their tolerance is reachable whenever the slices are well posed.
    gap_inner = diagnostics.gap_inner
    if gap_inner is None and diagnostics.gap_every is not None:
        gap_inner = GapInnerSettings(max_iters=max(10000, 10 * iters))

    def make_record(t: int, pair: Point, grads: tuple[Tangent, Tangent]) -> IterationRecord:
        x, y = prod.split(pair)
        gap_val = None
        if diagnostics.gap_every is not None and t % diagnostics.gap_every == 0 and t > 0:
            est = estimate_duality_gap(problem, pair, gap_inner)
            gap_val = est.estimate if est.available else None
        return IterationRecord(
            t=t,
            value=float(problem.value(x, y)),
            grad_norm_x=problem.manifold_x.norm(grads[0]),
            grad_norm_y=problem.manifold_y.norm(grads[1]),
            dist_to_ref=prod.distance(pair, ref_pair) if ref_pair is not None else None,
            gap_estimate=gap_val,
            wall_ms=(time.perf_counter() - t_start) * 1000.0,
        )

    for t in range(iters):
        try:
            grads = _pair_grads(problem, state.current)
            if should_record(t):
                records.append(make_record(t, state.current, grads))
            state = step(problem, state, grads)
        except (NumericalError, DomainError) as exc:
            status = "diverged"
            diagnostic = str(exc)
            break
        if not np.all(np.isfinite(state.current.value)):
            status = "diverged"
            diagnostic = "iterate contains non-finite values"
            break
        if diagnostics.keep_averages and state.average is not None:
            averages.append((state.t, state.average))
        if prod.distance(state.current, initial) > threshold:
            status = "diverged"
            diagnostic = (
                f"current pair drifted more than {threshold:.3g} from the start "
                f"(divergence threshold {_DIVERGENCE_FACTOR:.0e} x initial scale)"
            )
            break

    if status == "ok":
        try:
            grads = _pair_grads(problem, state.current)
            records.append(make_record(state.t, state.current, grads))
        except (NumericalError, DomainError) as exc:
            status = "diverged"
            diagnostic = f"final diagnostics failed: {exc}"
    elif records and records[-1].t != state.t:
        # best-effort terminal row so the trace shows where the run stopped
        try:
            grads = _pair_grads(problem, state.current)
            records.append(make_record(state.t, state.current, grads))
        except GeominimaxError:
            pass

    return RunResult(
        records=records,
        state=state,
        status=status,
        diagnostic=diagnostic,
        eta=eta_val,
        algo=algo,
        averages=averages,
    )
