"""Fusion of train time, walking time and the disruption horizon."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractError

DEFAULT_WALKING_SPEED = 5.0  # km/h
DEFAULT_HORIZON = 30.0  # min


@dataclass(frozen=True)
class CostParams:
    walking_speed: float = DEFAULT_WALKING_SPEED
    disruption_horizon_T_lm: float = DEFAULT_HORIZON

    def __post_init__(self):
        if not (math.isfinite(self.walking_speed) and self.walking_speed > 0):
            raise ContractError(f"walking_speed must be positive, got {self.walking_speed}")
        if not self.disruption_horizon_T_lm > 0:
            raise ContractError(f"disruption horizon must be > 0, got {self.disruption_horizon_T_lm}")


@dataclass(frozen=True)
class CostMatrix:
    """Evacuation cost in minutes; ``inf`` marks legs longer than the horizon."""

    values: np.ndarray
    horizon: float = math.inf

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ContractError(f"cost matrix must be square, got shape {v.shape}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def sub(self, idx) -> "CostMatrix":
        idx = np.asarray(idx, dtype=np.intp)
        return CostMatrix(self.values[np.ix_(idx, idx)], self.horizon)


def walking_minutes(a_dis, walking_speed: float) -> np.ndarray:
    return np.asarray(a_dis, dtype=float) / walking_speed * 60.0


def fuse_cost(a_con, a_dis, t_train, params: CostParams | None = None) -> CostMatrix:
    """Combine the three n x n inputs into the thresholded cost matrix.

    Adjacent pairs take the train time, all other pairs the walking time
    ``km / (km/h) * 60``. Any entry above the horizon becomes ``inf`` and
    the diagonal is set to zero last.
    """
    params = params or CostParams()
    con = np.asarray(a_con)
    dis = np.asarray(a_dis, dtype=float)
    train = np.asarray(getattr(t_train, "values", t_train), dtype=float)
    shapes = {con.shape, dis.shape, train.shape}
    if len(shapes) != 1 or con.ndim != 2 or con.shape[0] != con.shape[1]:
        raise ContractError(f"fuse_cost inputs must share one square shape, got {sorted(shapes)}")
    values = np.where(con == 1, train, walking_minutes(dis, params.walking_speed))
    values[values > params.disruption_horizon_T_lm] = math.inf
    np.fill_diagonal(values, 0.0)
    return CostMatrix(values, float(params.disruption_horizon_T_lm))
