"""Photovoltaic harvesting of the DC photocurrent.

The harvested quantity eps * I_DC * V_OC has units of watts and is reported
as power; per-drop energy is power times the configured drop duration.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class EnergyParams:
    fill_factor: float      # dimensionless, (0, 1]
    thermal_voltage: float  # V
    dark_current: float     # A

    def __post_init__(self):
        if not 0.0 < self.fill_factor <= 1.0:
            raise ValueError("fill_factor must be in (0, 1]")
        if self.thermal_voltage <= 0:
            raise ValueError("thermal_voltage must be positive")
        if self.dark_current <= 0:
            raise ValueError("dark_current must be positive")


def open_circuit_voltage(i_dc, params: EnergyParams):
    """V_OC = V_t * ln(1 + I_DC / I_0)."""
    i_dc = np.asarray(i_dc, dtype=float)
    if np.any(i_dc < 0):
        raise ValueError("i_dc must be nonnegative")
    return params.thermal_voltage * np.log1p(i_dc / params.dark_current)


def harvested_power(i_dc, params: EnergyParams):
    """Harvested DC power, eps * I_DC * V_OC(I_DC), watts."""
    return params.fill_factor * np.asarray(i_dc, dtype=float) * open_circuit_voltage(i_dc, params)
