"""Rectangular parameter domains."""

import math
from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator


class DomainGrid(BaseModel):
    """Uniform rectangular grid, optionally periodic in y.

    For periodic grids the nodes are y_min + k * period_y / ny for
    k = 0..ny-1; y_max = y_min + period_y is identified with y_min.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    x_min: float = Field(-1.0, description="Left end of the x interval")
    x_max: float = Field(1.0, description="Right end of the x interval")
    y_min: float = Field(0.0, description="Lower end of the y interval")
    y_max: float = Field(2.0 * math.pi, description="Upper end of the y interval")
    nx: int = Field(64, ge=8, description="Number of nodes in x")
    ny: int = Field(64, ge=8, description="Number of nodes in y")
    periodic_y: bool = Field(True, description="Identify y_min and y_max")
    period_y: float = Field(2.0 * math.pi, gt=0, description="Period when periodic_y is set")

    @model_validator(mode="after")
    def _check_extent(self) -> "DomainGrid":
        if self.x_max <= self.x_min:
            raise ValueError("x_max must exceed x_min")
        if self.y_max <= self.y_min:
            raise ValueError("y_max must exceed y_min")
        if self.periodic_y and not math.isclose(
            self.y_max - self.y_min, self.period_y, rel_tol=1e-12, abs_tol=1e-12
        ):
            raise ValueError("periodic grids need y_max - y_min == period_y")
        return self

    @classmethod
    def periodic(
        cls,
        x_min: float,
        x_max: float,
        nx: int,
        ny: int,
        y_min: float = 0.0,
        period: float = 2.0 * math.pi,
    ) -> "DomainGrid":
        return cls(
            x_min=x_min,
            x_max=x_max,
            y_min=y_min,
            y_max=y_min + period,
            nx=nx,
            ny=ny,
            periodic_y=True,
            period_y=period,
        )

    @classmethod
    def rectangle(
        cls, x_min: float, x_max: float, y_min: float, y_max: float, nx: int, ny: int
    ) -> "DomainGrid":
        return cls(
            x_min=x_min, x_max=x_max, y_min=y_min, y_max=y_max, nx=nx, ny=ny, periodic_y=False
        )

    @property
    def hx(self) -> float:
        return (self.x_max - self.x_min) / (self.nx - 1)

    @property
    def hy(self) -> float:
        if self.periodic_y:
            return self.period_y / self.ny
        return (self.y_max - self.y_min) / (self.ny - 1)

    @property
    def xs(self) -> np.ndarray:
        return self.x_min + self.hx * np.arange(self.nx)

    @property
    def ys(self) -> np.ndarray:
        return self.y_min + self.hy * np.arange(self.ny)

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.nx, self.ny)

    def mesh(self) -> Tuple[np.ndarray, np.ndarray]:
        """Node coordinates X, Y with shape (nx, ny)."""
        return np.meshgrid(self.xs, self.ys, indexing="ij")

    def node(self, i: int, j: int) -> Tuple[float, float]:
        return float(self.xs[i]), float(self.ys[j % self.ny if self.periodic_y else j])

    def interior_mask(self, margin: int = 2, seam: bool = False) -> np.ndarray:
        """Nodes at least ``margin`` away from non-periodic boundaries.

        With ``seam`` set the y_min/y_max seam of a periodic grid counts as a
        boundary too; fields that are only quasi-periodic jump there.
        """
        mask = np.zeros(self.shape, dtype=bool)
        if self.periodic_y and not seam:
            mask[margin : self.nx - margin, :] = True
        else:
            mask[margin : self.nx - margin, margin : self.ny - margin] = True
        return mask

    def refined(self, nx: int, ny: int) -> "DomainGrid":
        return self.model_copy(update={"nx": nx, "ny": ny})
