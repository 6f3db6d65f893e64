"""Spectral-plane sweeps of isothermic monodromy multipliers."""

import asyncio
import csv
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..surfaces.grid import DomainGrid
from .base import SurfaceLike
from .families import isothermic_connection
from .monodromy import monodromy
from .transport import DEFAULT_SETTINGS, TransportSettings

logger = logging.getLogger(__name__)

CSV_HEADER = ["re_rho", "im_rho", "re_h1", "im_h1", "re_h2", "im_h2", "resonance_flag"]


class SweepWindow(BaseModel):
    """Rectangle of rho values sampled on a uniform lattice."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    re_min: float = Field(-10.0, description="Smallest real part")
    re_max: float = Field(2.0, description="Largest real part")
    n_re: int = Field(13, ge=0, description="Samples along the real axis")
    im_min: float = Field(-1.0, description="Smallest imaginary part")
    im_max: float = Field(1.0, description="Largest imaginary part")
    n_im: int = Field(3, ge=0, description="Samples along the imaginary axis")

    def points(self) -> List[complex]:
        """Lattice points, real part varying slowest."""
        if self.n_re == 0 or self.n_im == 0:
            return []
        res = np.linspace(self.re_min, self.re_max, self.n_re) if self.n_re > 1 else [self.re_min]
        ims = np.linspace(self.im_min, self.im_max, self.n_im) if self.n_im > 1 else [self.im_min]
        return [complex(r, i) for r in res for i in ims]


@dataclass(frozen=True)
class SweepRow:
    rho: complex
    h1: complex
    h2: complex
    resonance: bool

    def as_csv(self) -> List[str]:
        values = [
            self.rho.real, self.rho.imag, self.h1.real, self.h1.imag, self.h2.real, self.h2.imag
        ]
        return ["%.17g" % v for v in values] + [str(int(self.resonance))]


def sweep_point(
    surface: SurfaceLike,
    rho: complex,
    grid: DomainGrid,
    gauge: str = "parallel_cmc",
    x0: Optional[float] = None,
    settings: TransportSettings = DEFAULT_SETTINGS,
) -> SweepRow:
    result = monodromy(isothermic_connection(surface, rho, gauge), grid, x0, settings)
    h1, h2 = result.multipliers
    return SweepRow(rho=complex(rho), h1=h1, h2=h2, resonance=result.resonance)


async def sweep_multipliers(
    surface: SurfaceLike,
    window: SweepWindow,
    grid: DomainGrid,
    gauge: str = "parallel_cmc",
    x0: Optional[float] = None,
    settings: TransportSettings = DEFAULT_SETTINGS,
    threads: Optional[int] = None,
) -> List[SweepRow]:
    """Monodromy multipliers over ``window``, computed on a thread pool.

    Rows come back in lattice order regardless of completion order.
    """
    points = window.points()
    if not points:
        return []
    loop = asyncio.get_running_loop()
    with ThreadPoolExecutor(max_workers=threads) as pool:
        tasks = [
            loop.run_in_executor(pool, sweep_point, surface, rho, grid, gauge, x0, settings)
            for rho in points
        ]
        rows = await asyncio.gather(*tasks)
    flagged = sum(1 for row in rows if row.resonance)
    logger.info("sweep of %d spectral points finished, %d resonant", len(rows), flagged)
    return list(rows)


def write_sweep_csv(rows: List[SweepRow], path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for row in rows:
            writer.writerow(row.as_csv())
    return path
