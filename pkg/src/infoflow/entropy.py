"""Information content of densities relative to the density of states.

The information functional is the relative entropy

    Info[rho] = integral of rho * log(rho / mu)

computed by midpoint quadrature over a grid.  It is zero exactly when rho
equals mu (zero knowledge), grows as rho concentrates, and diverges as rho
approaches a point mass; on a grid the divergence shows up as |log(cell
volume)| growth under refinement.  Cells with rho = 0 contribute 0 (the
standard x*log(x) -> 0 limit); rho > 0 on cells where mu = 0 makes the
value infinite, flagged rather than raised.

Sums use NumPy's deterministic pairwise reduction, so a given configuration
reproduces bit-for-bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EmptySupportError, InvalidDensityError
from .statespace import CellMask, DensityOfStates, Grid, GridDensity, state_count, uniform_on


@dataclass(frozen=True)
class InfoValue:
    """A nonnegative information value in nats; infinite when ``finite`` is False."""

    value: float
    finite: bool = True

    def __float__(self) -> float:
        return self.value if self.finite else math.inf

    def __repr__(self) -> str:
        return f"InfoValue({self.value!r})" if self.finite else "InfoValue(inf)"


def _mu_values(mu, grid: Grid, t: float) -> np.ndarray:
    if isinstance(mu, DensityOfStates):
        return mu.snapshot(grid, t)
    if isinstance(mu, GridDensity):
        if mu.grid != grid:
            raise InvalidDensityError("mu lives on a different grid than rho")
        return mu.values
    return np.asarray(mu, dtype=float)


def info(rho: GridDensity, mu, t: float = 0.0, negative_tol: float | None = None) -> InfoValue:
    """Information of ``rho`` relative to ``mu`` at time ``t``.

    ``mu`` may be a DensityOfStates (sampled on rho's grid) or a GridDensity
    on the same grid.  Nonnegative up to quadrature roundoff; tiny negative
    results (possible when inputs are normalized only within tolerance) are
    clamped to zero, anything worse raises.
    """
    grid = rho.grid
    mu_vals = _mu_values(mu, grid, t)
    r = rho.values
    if np.any(~np.isfinite(r)) or np.any(~np.isfinite(mu_vals)):
        raise InvalidDensityError("non-finite values in info() inputs")
    support = r > 0.0
    if np.any(mu_vals[support] == 0.0):
        return InfoValue(math.inf, finite=False)
    contrib = np.zeros_like(r)
    contrib[support] = r[support] * np.log(r[support] / mu_vals[support])
    value = float(contrib.sum()) * grid.cell_volume
    if value < 0.0:
        allowance = 10.0 * max(rho.norm_tol, 1e-12) if negative_tol is None else negative_tol
        if value < -allowance:
            raise InvalidDensityError(
                f"info() came out {value!r} < 0; inputs are not valid densities"
            )
        value = 0.0
    return InfoValue(value, finite=True)


def boltzmann_info(region: CellMask, mu: DensityOfStates, t: float = 0.0) -> float:
    """|log N_region|: the information of knowing the state lies in ``region``.

    Agrees with ``info(uniform_on(region, mu), mu)`` up to quadrature
    roundoff, by construction of the midpoint rule.
    """
    n = state_count(region, mu, t)
    if n <= 0.0:
        raise EmptySupportError("region carries no state measure")
    return abs(math.log(n))


def info_delta_proxy(rho: GridDensity, mu, t: float = 0.0) -> InfoValue:
    """Information of a density concentrated in a single cell.

    Finite stand-in for the point-mass limit: for a normalized single-cell
    density the value is |log(mu_cell * cell_volume)|, which grows like
    |log(cell_volume)| under grid refinement.
    """
    nonzero = np.count_nonzero(rho.values)
    if nonzero != 1:
        raise InvalidDensityError(
            f"delta proxy needs a single-cell density, got {nonzero} occupied cells"
        )
    return info(rho, mu, t)


__all__ = [
    "InfoValue",
    "info",
    "boltzmann_info",
    "info_delta_proxy",
    "uniform_on",
]
