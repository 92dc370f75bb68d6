"""Series coefficients and truncation diagnostics for the boundary input.

The feedforward flux is a power series over derivatives of the planned
output.  Its coefficients

    eta_i = L**(2i+1) / (alpha**(i+1) * (2i+1)!)

first grow to enormous values and then collapse to zero; the ratio
beta_i = gamma / ((2i+2)(2i+3)) with gamma = L^2/alpha fully determines
that shape.  eta is therefore built by the ratio recurrence (the raw
formula would overflow long before the peak for steel-like gamma) and
shadowed by an independently computed log10 sequence for diagnostics.

Whether a term actually matters also depends on the size of the matching
bump derivative, so truncation is driven by the weighted sequence

    mu_i = lambda * |delta_y| * eta_i * ||B^(i)||_L2 / omega_hat

and the ratio of each mu_i to the running maximum of its predecessors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
import warnings

import numpy as np

from .materials import MaterialProperties, RodGeometry, gamma_coefficient
from .trajectory import DerivativeTable, TransitionSpec

LOG10_E = math.log10(math.e)

DEFAULT_EPSILON = 1e-3
DEFAULT_WINDOW = 3


@dataclass(frozen=True)
class EtaDiagnostics:
    """Coefficient sequence plus the derived truncation diagnostics.

    mu, r_hat and selected_N stay None until populated by
    :func:`mu_sequence`, :func:`r_hat_sequence` and
    :func:`select_truncation`.
    """

    gamma: float
    eta: np.ndarray
    eta_log10: np.ndarray
    beta: np.ndarray
    max_index: int
    mu: np.ndarray | None = None
    r_hat: np.ndarray | None = None
    selected_N: int | None = None

    def to_csv(self, path) -> None:
        """Write `i,eta,log10_eta,beta,mu,r_hat`; unpopulated columns are nan."""
        n = self.eta.size
        mu = self.mu if self.mu is not None else np.full(n, math.nan)
        r_hat = self.r_hat if self.r_hat is not None else np.full(n, math.nan)
        with open(path, "w", newline="") as fh:
            fh.write("i,eta,log10_eta,beta,mu,r_hat\n")
            for i in range(n):
                fh.write(
                    f"{i},{self.eta[i]:.16e},{self.eta_log10[i]:.16e},"
                    f"{self.beta[i]:.16e},{mu[i]:.16e},{r_hat[i]:.16e}\n"
                )


@dataclass(frozen=True)
class InputSignal:
    """Sampled boundary heat flux u_N (W/m^2) with its provenance."""

    times: np.ndarray
    values: np.ndarray
    truncation: int
    material: MaterialProperties
    spec: TransitionSpec

    def __post_init__(self) -> None:
        if not np.all(np.isfinite(self.values)):
            raise ValueError("input signal contains non-finite samples")

    def to_csv(self, path) -> None:
        """Write `t,u` rows with lossless 17-digit floats."""
        with open(path, "w", newline="") as fh:
            fh.write("t,u\n")
            for t, u in zip(self.times, self.values):
                fh.write(f"{t:.16e},{u:.16e}\n")


def eta_sequence(material: MaterialProperties, geometry: RodGeometry, max_index: int) -> EtaDiagnostics:
    """Coefficients eta_0 .. eta_max_index via the ratio recurrence.

    eta_log10 is computed independently from the closed form through the
    log-gamma function, so the two representations cross-check each other
    and the log sequence stays valid beyond double range.
    """
    if max_index < 0:
        raise ValueError(f"max_index must be nonnegative, got {max_index}")
    gamma = gamma_coefficient(material, geometry)
    length = geometry.length
    alpha = material.diffusivity

    n = max_index + 1
    eta = np.empty(n)
    beta = np.empty(n)
    eta[0] = length / alpha
    for i in range(n):
        beta[i] = gamma / ((2 * i + 2) * (2 * i + 3))
        if i + 1 < n:
            eta[i + 1] = eta[i] * beta[i]

    log_l, log_a = math.log10(length), math.log10(alpha)
    eta_log10 = np.array(
        [(2 * i + 1) * log_l - (i + 1) * log_a - math.lgamma(2 * i + 2) * LOG10_E for i in range(n)]
    )

    return EtaDiagnostics(
        gamma=gamma,
        eta=eta,
        eta_log10=eta_log10,
        beta=beta,
        max_index=_argmax_from_beta(beta, n),
    )


def _argmax_from_beta(beta: np.ndarray, n: int) -> int:
    for i, b in enumerate(beta):
        if b < 1.0:
            return min(i, n - 1)
    return n - 1


def eta_max_index(diag: EtaDiagnostics) -> int:
    """Index of the largest eta: the first i with beta_i < 1."""
    return diag.max_index


def first_subunity_index(material: MaterialProperties, geometry: RodGeometry, cap: int = 512) -> int:
    """Smallest i with log10(eta_i) < 0, scanned via the log form only."""
    log_l = math.log10(geometry.length)
    log_a = math.log10(material.diffusivity)
    for i in range(cap + 1):
        if (2 * i + 1) * log_l - (i + 1) * log_a - math.lgamma(2 * i + 2) * LOG10_E < 0.0:
            return i
    raise ValueError(f"eta stays above 1 through index {cap}")


def _simpson_weights(times: np.ndarray) -> np.ndarray:
    """Composite-Simpson weights for a uniform grid with an odd point count."""
    n = times.size
    if n < 3 or n % 2 == 0:
        raise ValueError(f"composite Simpson needs an odd number of samples >= 3, got {n}")
    h = np.diff(times)
    if not np.allclose(h, h[0], rtol=1e-9, atol=0.0):
        raise ValueError("composite Simpson needs a uniform grid")
    w = np.ones(n)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * (h[0] / 3.0)


def mu_sequence(
    diag: EtaDiagnostics,
    table: DerivativeTable,
    material: MaterialProperties,
    delta_y: float,
) -> EtaDiagnostics:
    """Populate mu_i = lambda |delta_y| eta_i ||B^(i)||_L2 / omega_hat."""
    n = diag.eta.size
    if table.max_order < n - 1:
        raise ValueError(f"table holds orders <= {table.max_order} but diagnostics need {n - 1}")
    weights = _simpson_weights(table.times)
    norms = np.sqrt((table.values[:n] ** 2 * weights).sum(axis=1))
    mu = material.conductivity * abs(delta_y) * diag.eta * norms / table.omega_hat
    return replace(diag, mu=mu)


def r_hat_sequence(diag: EtaDiagnostics) -> EtaDiagnostics:
    """Populate r_hat_i = mu_i / max(mu_0 .. mu_i), or 0 where the max is 0."""
    if diag.mu is None:
        raise ValueError("mu must be populated before r_hat")
    running = np.maximum.accumulate(diag.mu)
    safe = np.where(running > 0.0, running, 1.0)
    r_hat = np.where(running > 0.0, diag.mu / safe, 0.0)
    return replace(diag, r_hat=r_hat)


def select_truncation(
    diag: EtaDiagnostics,
    epsilon: float = DEFAULT_EPSILON,
    window: int = DEFAULT_WINDOW,
) -> int:
    """Smallest N with r_hat below epsilon on the whole window after N.

    Falls back to the last available index (with a RuntimeWarning) when no
    window qualifies.
    """
    if diag.r_hat is None:
        raise ValueError("r_hat must be populated before selecting a truncation")
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon!r}")
    if window < 1:
        raise ValueError(f"window must be at least 1, got {window}")
    r_hat = diag.r_hat
    for cand in range(r_hat.size - window):
        if np.all(r_hat[cand + 1 : cand + 1 + window] < epsilon):
            return cand
    warnings.warn(
        f"no truncation with r_hat < {epsilon} over a window of {window}; using the full sequence",
        RuntimeWarning,
        stacklevel=2,
    )
    return r_hat.size - 1


def input_signal(
    diag: EtaDiagnostics,
    table: DerivativeTable,
    material: MaterialProperties,
    spec: TransitionSpec,
    truncation: int,
) -> InputSignal:
    """Assemble u_N(t) = (lambda delta_y / omega_hat) * sum eta_i B^(i)(t).

    The terms span many orders of magnitude (eta up to ~1e27 for steel
    against tiny derivative samples), so the sum over i runs with Kahan
    compensation per time sample.
    """
    if truncation < 0:
        raise ValueError(f"truncation must be nonnegative, got {truncation}")
    if truncation > table.max_order:
        raise ValueError(f"truncation {truncation} exceeds table orders <= {table.max_order}")
    if truncation > diag.eta.size - 1:
        raise ValueError(f"truncation {truncation} exceeds available eta indices <= {diag.eta.size - 1}")

    total = np.zeros(table.times.size)
    carry = np.zeros(table.times.size)
    for i in range(truncation + 1):
        term = diag.eta[i] * table.values[i] - carry
        bumped = total + term
        carry = (bumped - total) - term
        total = bumped

    prefactor = material.conductivity * spec.delta_y / table.omega_hat
    return InputSignal(
        times=table.times.copy(),
        values=prefactor * total,
        truncation=truncation,
        material=material,
        spec=spec,
    )
