"""Compactly supported bump trajectories and their high-order time derivatives.

The reference output is a smooth step built from the bump

    B(t) = exp(-1 / ((1 - t/T) * (t/T))**omega)   for t in (0, T),  else 0,

which vanishes with all of its derivatives at t = 0 and t = T.  The step is
the running integral of B normalized by its total integral.  Synthesizing a
boundary input requires d^i/dt^i B up to order ~40, which rules out
symbolic differentiation and naive finite differences alike.

The engine here works in normalized time tau = t/T.  Writing
B = exp(g) with g(tau) = -p(tau)**-omega and p(tau) = tau*(1 - tau):

* derivatives of g come from the Faa di Bruno formula.  Because the inner
  function p is quadratic (p' = 1 - 2 tau, p'' = -2, higher derivatives
  zero), only two-argument partial Bell polynomials appear, and those have
  the closed form implemented in :func:`partial_bell_two`;
* derivatives of B follow from the product recurrence obtained by
  differentiating B' = B * g' repeatedly (a Leibniz expansion), which is
  O(order^2) per sample;
* the chain-rule factor T**-n converts order-n derivatives back to
  physical time.

Cost is O(order^2) per time sample with no combinatorial blowup, and every
order is cross-checkable against finite differences of the previous one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

# Samples where g drops below this are flushed to exact zero: exp(g) is at
# the edge of the double-precision range there and the function is flat.
# The same guard keeps p**-(omega+k) bounded inside the Faa di Bruno sums.
LOG_UNDERFLOW = -700.0

# Binomial coefficients come from an additive Pascal table; past this order
# the float entries degrade and the edge-of-support terms risk overflow.
MAX_ORDER = 64

DEFAULT_REL_TOL = 1e-10
PANEL_BUDGET = 2**20


class QuadratureError(RuntimeError):
    """Adaptive quadrature exceeded its subdivision budget."""


@dataclass(frozen=True)
class TransitionSpec:
    """Parameters of one smooth output transition.

    omega > 1 controls the steepness (larger is steeper), T is the
    transition duration in seconds, y0 the initial output level and
    delta_y the total rise.
    """

    omega: float
    T: float
    y0: float = 0.0
    delta_y: float = 0.0

    def __post_init__(self) -> None:
        if not self.omega > 1.0:
            raise ValueError(f"omega must exceed 1, got {self.omega!r}")
        if not (self.T > 0.0 and math.isfinite(self.T)):
            raise ValueError(f"T must be a positive finite duration, got {self.T!r}")


@dataclass(frozen=True)
class DerivativeTable:
    """Sampled bump derivatives: values[i, k] = d^i/dt^i B(times[k]).

    omega_hat is the total integral of row 0 over [0, T], computed by
    adaptive quadrature independently of the sample grid.
    """

    spec: TransitionSpec
    times: np.ndarray
    max_order: int
    values: np.ndarray
    omega_hat: float

    def to_csv(self, path) -> None:
        """Write `t,d0,...,dN` rows with lossless 17-digit floats."""
        with open(path, "w", newline="") as fh:
            fh.write("t," + ",".join(f"d{i}" for i in range(self.max_order + 1)) + "\n")
            for k, t in enumerate(self.times):
                row = ",".join(f"{self.values[i, k]:.16e}" for i in range(self.max_order + 1))
                fh.write(f"{t:.16e},{row}\n")


@lru_cache(maxsize=8)
def _binomials(n_max: int) -> np.ndarray:
    """Pascal triangle C[n, j] for n <= n_max, built additively in float."""
    coeffs = np.zeros((n_max + 1, n_max + 1))
    coeffs[:, 0] = 1.0
    for n in range(1, n_max + 1):
        for j in range(1, n + 1):
            coeffs[n, j] = coeffs[n - 1, j - 1] + coeffs[n - 1, j]
    return coeffs


@lru_cache(maxsize=4)
def _bell_numbers(n_max: int) -> tuple[tuple[float, ...], ...]:
    """Exact n!/((2k-n)!(n-k)!) as floats, indexed [n][k], zero when 2k < n."""
    table = []
    for n in range(n_max + 1):
        fact_n = math.factorial(n)
        row = [0.0] * (n + 1)
        for k in range((n + 1) // 2, n + 1):
            row[k] = float(fact_n // (math.factorial(2 * k - n) * math.factorial(n - k)))
        table.append(tuple(row))
    return tuple(table)


def partial_bell_two(n: int, k: int, x1: float, x2: float) -> float:
    """Partial Bell polynomial B_{n,k}(x1, x2, 0, ..., 0).

    Closed form n!/((2k-n)!(n-k)!) * x1**(2k-n) * (x2/2)**(n-k); zero when
    2k < n because every partition into k blocks of size <= 2 needs at
    least 2k - n singletons.
    """
    if n == 0 and k == 0:
        return 1.0
    if k < 1 or k > n or 2 * k < n:
        return 0.0
    coeff = math.factorial(n) // (math.factorial(2 * k - n) * math.factorial(n - k))
    return float(coeff) * x1 ** (2 * k - n) * (x2 / 2.0) ** (n - k)


def _check_order(order: int) -> None:
    if order < 0:
        raise ValueError(f"derivative order must be nonnegative, got {order}")
    if order > MAX_ORDER:
        raise ValueError(f"derivative order {order} exceeds supported maximum {MAX_ORDER}")


def _exponent_derivatives(tau: np.ndarray, omega: float, order: int) -> np.ndarray:
    """Derivatives of g(tau) = -(tau(1-tau))**-omega for interior samples.

    Returns an (order+1, len(tau)) array; row n is g^(n) with respect to
    tau.  Callers must ensure 0 < tau < 1 and g(tau) >= LOG_UNDERFLOW.
    """
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    p = tau * (1.0 - tau)
    dp = 1.0 - 2.0 * tau

    # Outer-function derivatives f^(k)(p) with f(x) = -x**-omega:
    # f^(k) = -(-1)^k * omega (omega+1) ... (omega+k-1) * x**-(omega+k).
    outer = np.empty((order + 1, tau.size))
    power = p**-omega
    outer[0] = -power
    rising = 1.0
    sign = -1.0
    for k in range(1, order + 1):
        rising *= omega + (k - 1)
        power = power / p
        outer[k] = -sign * rising * power
        sign = -sign

    dp_pow = np.empty((order + 1, tau.size))
    dp_pow[0] = 1.0
    for j in range(1, order + 1):
        dp_pow[j] = dp_pow[j - 1] * dp

    bell = _bell_numbers(max(order, 1))
    g = np.empty((order + 1, tau.size))
    g[0] = outer[0]
    for n in range(1, order + 1):
        acc = np.zeros(tau.size)
        # p'' = -2, so (p''/2)**(n-k) collapses to a sign.
        for k in range((n + 1) // 2, n + 1):
            coeff = bell[n][k] if (n - k) % 2 == 0 else -bell[n][k]
            acc += coeff * outer[k] * dp_pow[2 * k - n]
        g[n] = acc
    return g


def inner_exponent_derivatives(spec: TransitionSpec, tau: float, order: int) -> np.ndarray:
    """[g(tau), g'(tau), ..., g^(order)(tau)] for g = -(tau(1-tau))**-omega.

    Derivatives are with respect to the normalized time tau; tau must lie
    strictly inside (0, 1) because p**-omega has poles at the endpoints.
    """
    if not 0.0 < tau < 1.0:
        raise ValueError(f"tau must lie strictly inside (0, 1), got {tau!r}")
    _check_order(order)
    return _exponent_derivatives(np.array([tau]), spec.omega, order)[:, 0]


def bump_value(spec: TransitionSpec, t: float) -> float:
    """B(t): exp(-1/((1 - t/T) t/T)**omega) inside (0, T), zero elsewhere."""
    tau = t / spec.T
    if tau <= 0.0 or tau >= 1.0:
        return 0.0
    p = tau * (1.0 - tau)
    if -spec.omega * math.log(p) > math.log(-LOG_UNDERFLOW):
        return 0.0
    return math.exp(-(p**-spec.omega))


def _tabulate(spec: TransitionSpec, times: np.ndarray, max_order: int) -> np.ndarray:
    """(max_order+1, len(times)) array of bump derivatives in physical time."""
    values = np.zeros((max_order + 1, times.size))
    tau = times / spec.T
    interior = (tau > 0.0) & (tau < 1.0)
    if interior.any():
        p = tau[interior] * (1.0 - tau[interior])
        keep = -spec.omega * np.log(p) <= math.log(-LOG_UNDERFLOW)
        live = np.where(interior)[0][keep]
        if live.size:
            g = _exponent_derivatives(tau[live], spec.omega, max_order)
            binom = _binomials(max(max_order, 1))
            rows = np.zeros((max_order + 1, live.size))
            rows[0] = np.exp(g[0])
            for n in range(1, max_order + 1):
                acc = np.zeros(live.size)
                for j in range(n):
                    acc += binom[n - 1, j] * rows[j] * g[n - j]
                rows[n] = acc
            scale = 1.0
            for i in range(max_order + 1):
                values[i, live] = rows[i] * scale
                scale /= spec.T
    return values


def bump_derivatives(
    spec: TransitionSpec,
    times: np.ndarray,
    max_order: int,
    rel_tol: float = DEFAULT_REL_TOL,
) -> DerivativeTable:
    """Tabulate d^i/dt^i B on `times` for every order i <= max_order.

    times must be sorted and contained in [0, T].  Rows at samples outside
    the open support, and at samples where exp(g) underflows, are exactly
    zero for every order.
    """
    _check_order(max_order)
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise ValueError("times must be a nonempty 1-D array")
    if np.any(np.diff(times) < 0.0):
        raise ValueError("times must be sorted ascending")
    if times[0] < 0.0 or times[-1] > spec.T:
        raise ValueError("times must lie within [0, T]")

    values = _tabulate(spec, times, max_order)
    omega_hat = bump_integral(spec, rel_tol)
    return DerivativeTable(spec=spec, times=times, max_order=max_order, values=values, omega_hat=omega_hat)


def _adaptive_simpson(f, a: float, b: float, abs_tol: float, budget: int = PANEL_BUDGET) -> float:
    """Adaptive Simpson with the 1/15 Richardson correction, iterative form."""
    fa, fb = f(a), f(b)
    mid = 0.5 * (a + b)
    fm = f(mid)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    stack = [(a, fa, b, fb, mid, fm, whole, abs_tol)]
    total = 0.0
    panels = 0
    while stack:
        a, fa, b, fb, mid, fm, whole, tol = stack.pop()
        panels += 1
        if panels > budget:
            raise QuadratureError(f"adaptive Simpson exceeded the {budget}-panel budget on [{a}, {b}]")
        lm = 0.5 * (a + mid)
        flm = f(lm)
        left = (mid - a) / 6.0 * (fa + 4.0 * flm + fm)
        rm = 0.5 * (mid + b)
        frm = f(rm)
        right = (b - mid) / 6.0 * (fm + 4.0 * frm + fb)
        delta = left + right - whole
        if abs(delta) <= 15.0 * tol:
            total += left + right + delta / 15.0
        else:
            stack.append((a, fa, mid, fm, lm, flm, left, 0.5 * tol))
            stack.append((mid, fm, b, fb, rm, frm, right, 0.5 * tol))
    return total


def _bump_quadrature(spec: TransitionSpec, upper: float, abs_tol: float) -> float:
    return _adaptive_simpson(lambda t: bump_value(spec, t), 0.0, upper, abs_tol)


def _coarse_integral(spec: TransitionSpec) -> float:
    """Composite-Simpson magnitude estimate used to turn rel_tol absolute."""
    xs = np.linspace(0.0, spec.T, 129)
    fs = np.array([bump_value(spec, t) for t in xs])
    h = xs[1] - xs[0]
    return h / 3.0 * (fs[0] + fs[-1] + 4.0 * fs[1:-1:2].sum() + 2.0 * fs[2:-1:2].sum())


def bump_integral(spec: TransitionSpec, rel_tol: float = DEFAULT_REL_TOL) -> float:
    """Total integral of the bump over [0, T] to relative tolerance rel_tol."""
    if not 0.0 < rel_tol <= 1e-3:
        raise ValueError(f"rel_tol must lie in (0, 1e-3], got {rel_tol!r}")
    coarse = _coarse_integral(spec)
    return _bump_quadrature(spec, spec.T, rel_tol * abs(coarse))


def transition_value(spec: TransitionSpec, table: DerivativeTable, t: float) -> float:
    """Smooth step value: 0 for t <= 0, 1 for t >= T, running integral inside."""
    if t <= 0.0:
        return 0.0
    if t >= spec.T:
        return 1.0
    partial = _bump_quadrature(spec, t, DEFAULT_REL_TOL * table.omega_hat)
    return partial / table.omega_hat


def transition_profile(table: DerivativeTable) -> np.ndarray:
    """Step values on the table's own grid via a cumulative trapezoid.

    Normalized by its own total so the final sample is exactly 1; adequate
    for plotting and tracking-error reporting (relative error is set by
    the grid resolution, around 1e-7 on the default 1001-point grid).
    """
    bump = table.values[0]
    steps = 0.5 * (bump[1:] + bump[:-1]) * np.diff(table.times)
    profile = np.concatenate([[0.0], np.cumsum(steps)])
    total = profile[-1]
    if total <= 0.0:
        raise ValueError("table grid does not resolve the bump support")
    return profile / total


def reference_output(spec: TransitionSpec, table: DerivativeTable, t: float, order: int = 0) -> float:
    """The planned output y(t) or one of its time derivatives.

    order 0 returns y0 + delta_y * step(t); order i >= 1 returns
    delta_y * B^(i-1)(t) / omega_hat, which is zero outside (0, T).
    """
    if order < 0:
        raise ValueError(f"order must be nonnegative, got {order}")
    if order > table.max_order + 1:
        raise ValueError(f"order {order} exceeds the table budget {table.max_order} + 1")
    if order == 0:
        return spec.y0 + spec.delta_y * transition_value(spec, table, t)
    if t <= 0.0 or t >= spec.T:
        return 0.0
    single = _tabulate(spec, np.array([t]), order - 1)
    return spec.delta_y * single[order - 1, 0] / table.omega_hat
