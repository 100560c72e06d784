"""Numerical special functions behind the density heuristics.

Two tabulated solutions of delay/Volterra equations:

* Buchstab's function ``w(u)``: ``w(u) = 1/u`` on [1, 2] and
  ``(u w(u))' = w(u - 1)`` beyond, integrated in the stable cumulative form
  ``u w(u) = 1 + integral_1^{u-1} w(s) ds``.  It tends to ``e^{-gamma}``.
* The density kernel ``d(v)``: ``d(v) = 1`` on [0, 1] and

      d(v) = 1 - integral_0^{(v-1)/2} d(u)/(u+1) * w((v-u)/(u+1)) du

  solved by forward marching (the integrand only looks strictly backwards).
  ``(v+1) d(v)`` approaches ``C = 1/(1 - e^{-gamma})``.

Both solvers snap the grid step to an exact reciprocal 1/m so that the
integral limits ``u - 1`` (for w) and ``(v-1)/2`` (for d) land on grid or
half-grid points; this keeps the quadrature cells exact and the kernel's
jump at argument 1 analytically resolved (``w(1) = 1`` from the right).

Also here: Mertens products over sieved primes and the first-order
approximation to the rough-number count built from both.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .arith import SpfTable
from .constants import DENSITY_SCALE, EULER_GAMMA
from .errors import ConfigurationError, DomainError, SieveRangeError

__all__ = [
    "BUCHSTAB_LIMIT",
    "TabulatedFunction",
    "SolverConfig",
    "tabulate_buchstab",
    "tabulate_density_kernel",
    "density_kernel_reference",
    "mertens_product",
    "rough_count_approx",
]

#: Limit of Buchstab's function: e^{-gamma}.
BUCHSTAB_LIMIT = math.exp(-EULER_GAMMA)

_TAIL_KINDS = ("constant", "decay")
_QUADRATURES = ("trapezoid", "simpson")


@dataclass(frozen=True)
class TabulatedFunction:
    """Uniformly sampled function with linear interpolation.

    Evaluation below ``u_min`` returns ``below_value``.  Evaluation above
    the last grid point follows the tail rule: ``tail_value`` itself when
    ``tail_kind == "constant"``, or the decaying curve ``tail_value/(u+1)``
    when ``tail_kind == "decay"``.  Linear interpolation is used everywhere
    in between -- the tabulated functions have derivative kinks at small
    integer abscissae, so no higher-order scheme is attempted.
    """

    u_min: float
    step: float
    values: np.ndarray
    name: str
    below_value: float = 0.0
    tail_kind: str = "constant"
    tail_value: float = 0.0

    def __post_init__(self) -> None:
        if self.step <= 0.0:
            raise ConfigurationError(f"step must be positive, got {self.step}")
        if len(self.values) < 2:
            raise ConfigurationError("need at least two grid values")
        if not np.all(np.isfinite(self.values)):
            raise ConfigurationError("grid values must be finite")
        if self.tail_kind not in _TAIL_KINDS:
            raise ConfigurationError(f"unknown tail kind {self.tail_kind!r}")

    @property
    def u_max(self) -> float:
        """Abscissa of the last grid point."""
        return self.u_min + self.step * (len(self.values) - 1)

    @property
    def grid(self) -> np.ndarray:
        """All grid abscissae, ascending."""
        return self.u_min + self.step * np.arange(len(self.values))

    def __call__(self, u: float) -> float:
        if u < self.u_min:
            return self.below_value
        pos = (u - self.u_min) / self.step
        last = len(self.values) - 1
        if pos >= last:
            if pos <= last + 1e-9:  # float fuzz at the right edge
                return float(self.values[last])
            if self.tail_kind == "constant":
                return self.tail_value
            return self.tail_value / (u + 1.0)
        i = int(pos)
        frac = pos - i
        lo = float(self.values[i])
        return lo + frac * (float(self.values[i + 1]) - lo)


@dataclass(frozen=True)
class SolverConfig:
    """Grid and quadrature choices for the tabulators.

    ``step`` is snapped to the nearest exact reciprocal 1/m by the solvers;
    ``quadrature`` selects the cumulative rule used for the Buchstab
    integral (the density marcher always uses trapezoid cells because its
    partial end cell is handled exactly).
    """

    step: float = 1e-3
    max_abscissa: float = 64.0
    quadrature: str = "trapezoid"

    def __post_init__(self) -> None:
        if not 0.0 < self.step <= 0.01:
            raise ConfigurationError(
                f"step must be in (0, 0.01], got {self.step}"
            )
        if self.max_abscissa < 3.0:
            raise ConfigurationError(
                f"max_abscissa must be >= 3, got {self.max_abscissa}"
            )
        if self.quadrature not in _QUADRATURES:
            raise ConfigurationError(
                f"quadrature must be one of {_QUADRATURES}, got {self.quadrature!r}"
            )


def _snap(step: float) -> tuple[int, float]:
    """Snap a step to 1/m with integer m >= 100 (step <= 0.01 guaranteed)."""
    m = max(2, round(1.0 / step))
    return m, 1.0 / m


def tabulate_buchstab(cfg: SolverConfig) -> TabulatedFunction:
    """Tabulate Buchstab's function on [1, max_abscissa].

    The step is snapped to 1/m so the delayed limit ``u - 1`` is always a
    grid point; marching then reads ``w[j] = (1 + I[j-m]) / u[j]`` where I
    is the cumulative integral of w from 1.  Values on [1, 2] are the exact
    reciprocals.
    """
    m, h = _snap(cfg.step)
    n_pts = math.ceil(round((cfg.max_abscissa - 1.0) * m, 6)) + 1
    u = 1.0 + h * np.arange(n_pts)
    w = np.empty(n_pts)
    w[: m + 1] = 1.0 / u[: m + 1]
    # integral[k] = cumulative quadrature of w over [1, u_k]
    integral = np.zeros(max(n_pts - m, 1))
    simpson = cfg.quadrature == "simpson"
    for j in range(m + 1, n_pts):
        k = j - m
        if simpson and k >= 2:
            integral[k] = integral[k - 2] + h / 3.0 * (
                w[k - 2] + 4.0 * w[k - 1] + w[k]
            )
        else:
            integral[k] = integral[k - 1] + h * 0.5 * (w[k - 1] + w[k])
        w[j] = (1.0 + integral[k]) / u[j]
    return TabulatedFunction(
        u_min=1.0,
        step=h,
        values=w,
        name="buchstab",
        below_value=0.0,
        tail_kind="constant",
        tail_value=BUCHSTAB_LIMIT,
    )


def tabulate_density_kernel(
    cfg: SolverConfig, w: TabulatedFunction
) -> TabulatedFunction:
    """Tabulate the density kernel d on [0, max_abscissa] by forward marching.

    With step 1/m the integral limit ``(v - 1)/2`` lands on a grid point or
    an exact half-grid midpoint.  Full cells use composite trapezoid; the
    half cell (when present) uses a trapezoid with the analytically known
    endpoint value ``d(U)/(U+1) * w(1)`` where ``w(1) = 1`` -- the kernel
    argument equals 1 exactly at the endpoint, the jump of w resolved from
    the right.  d values at midpoints interpolate linearly.

    Parameters
    ----------
    cfg : SolverConfig
        Grid configuration; ``cfg.quadrature`` is ignored here (see class
        docstring).
    w : TabulatedFunction
        A Buchstab table covering at least [1, max_abscissa].
    """
    m, g = _snap(cfg.step)
    n_pts = math.ceil(round(cfg.max_abscissa * m, 6)) + 1
    v_max = (n_pts - 1) * g
    if w.u_max < v_max - 1e-9:
        raise ConfigurationError(
            f"Buchstab table reaches {w.u_max}, need {v_max}"
        )
    d = np.ones(n_pts)
    grid_u = g * np.arange(n_pts)
    inv_up1 = 1.0 / (grid_u + 1.0)
    scaled = np.ones(n_pts)  # scaled[i] = d[i] / (u_i + 1)
    scaled[: m + 1] = inv_up1[: m + 1]
    # manual linear interpolation into the (uniform, u_min = 1) w table
    wv = w.values
    inv_hw = 1.0 / w.step
    top = float(len(wv) - 1)
    for i in range(m + 1, n_pts):
        v = i * g
        half_cells = i - m  # integral limit U = (v-1)/2 in half-step units
        full, odd = divmod(half_cells, 2)
        pos = ((v + 1.0) * inv_up1[: full + 1] - 2.0) * inv_hw
        np.clip(pos, 0.0, top, out=pos)
        idx = np.minimum(pos.astype(np.int64), len(wv) - 2)
        frac = pos - idx
        wlo = wv[idx]
        f = scaled[: full + 1] * (wlo + frac * (wv[idx + 1] - wlo))
        if full > 0:
            acc = g * (f.sum() - 0.5 * (f[0] + f[full]))
        else:
            acc = 0.0
        if odd:
            upper = 0.5 * (v - 1.0)
            d_mid = 0.5 * (d[full] + d[full + 1])
            f_end = d_mid / (upper + 1.0)  # kernel argument is exactly 1
            acc += 0.25 * g * (f[full] + f_end)
        d[i] = 1.0 - acc
        scaled[i] = d[i] * inv_up1[i]
    return TabulatedFunction(
        u_min=0.0,
        step=g,
        values=d,
        name="density_kernel",
        below_value=0.0,
        tail_kind="decay",
        tail_value=DENSITY_SCALE,
    )


def density_kernel_reference(v: float) -> float:
    """First-order reference curve ``C / (v + 1)`` for the density kernel."""
    if v < 0.0:
        raise DomainError(f"v must be >= 0, got {v}")
    return DENSITY_SCALE / (v + 1.0)


def mertens_product(y: float, table: SpfTable) -> float:
    """Product of ``1 - 1/p`` over primes p <= y, multiplied left to right.

    Raises
    ------
    DomainError
        If y < 2 (no primes -- the empty product is deliberately excluded).
    SieveRangeError
        If y exceeds the sieve limit.
    """
    if y < 2.0:
        raise DomainError(f"y must be >= 2, got {y}")
    if y > table.limit:
        raise SieveRangeError(f"y={y} exceeds sieve limit {table.limit}")
    primes = table.primes[table.primes <= math.floor(y)]
    return float(np.multiply.reduce(1.0 - 1.0 / primes))


def rough_count_approx(
    x: float, y: float, w: TabulatedFunction, table: SpfTable
) -> float:
    """Main-term approximation to the rough-number count.

    Evaluates, with ``u = ln(max(1, x)) / ln y``,

        1_{x>=1} + x * mertens_product(y)
                 + (x/ln y) * (w(u) - e^{-gamma} - [y/x if x >= y])

    and clamps negative results (possible for x < 1 or tiny x/y, where the
    asymptotic is meaningless) to 0.
    """
    if y < 2.0:
        raise DomainError(f"y must be >= 2, got {y}")
    log_y = math.log(y)
    u = math.log(max(1.0, x)) / log_y
    value = (1.0 if x >= 1.0 else 0.0) + x * mertens_product(y, table)
    correction = w(u) - BUCHSTAB_LIMIT - (y / x if x >= y else 0.0)
    value += (x / log_y) * correction
    return max(0.0, value)
