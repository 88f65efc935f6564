"""Resolved numerical defaults, overridable via file or the QPI_CONFIG env var.

Every tolerance and grid size that influences a reported number lives here,
so reports can embed the exact configuration they were produced with.
"""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass


@dataclass(frozen=True)
class Config:
    # coefficient-level tolerances
    term_drop_tol: float = 1e-14
    coeff_tol: float = 1e-12
    grid_tol: float = 1e-10

    # winding numbers on the circle
    winding_grid: int = 1024
    winding_det_floor: float = 1e-10
    winding_round_guard: float = 0.05

    # Wiener-Hopf factorization
    factor_blocks: tuple = (128, 256, 512)
    residual_tol: float = 1e-9
    decay_tol: float = 1e-10
    residual_grid: int = 256

    # half-plane gap certification
    gap_sections: tuple = (64, 128, 256)
    gap_momenta: int = 64
    gap_floor: float = 1e-3
    gap_band: float = 0.2
    gap_theta_samples: int = 64

    # corner spectra
    corner_L: int = 24
    zero_tol_factor: float = 1e-4
    loc_radius_factor: float = 1.0 / 3.0
    gap_grid_2d: int = 32

    # hinge spectral flow
    hinge_L: int = 16
    theta_samples: int = 128
    track_window: float = 0.4
    overlap_min: float = 0.7

    # glued-sphere winding quadrature
    winding3_disk: int = 24
    winding3_circle: int = 48
    winding3_guard: float = 0.1

    def replace(self, **kw) -> "Config":
        return dataclasses.replace(self, **kw)

    def to_dict(self) -> dict:
        out = dataclasses.asdict(self)
        for key, val in out.items():
            if isinstance(val, tuple):
                out[key] = list(val)
        return out


def load_config(path=None) -> Config:
    """Build a Config from defaults, a JSON file, and the QPI_CONFIG env var.

    Precedence (lowest to highest): package defaults, file named by
    QPI_CONFIG, explicit ``path`` argument.
    """
    cfg = Config()
    env_path = os.environ.get("QPI_CONFIG")
    for p in (env_path, path):
        if not p:
            continue
        with open(p, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
        known = {f.name for f in dataclasses.fields(Config)}
        unknown = set(raw) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        for key in ("factor_blocks", "gap_sections"):
            if key in raw:
                raw[key] = tuple(raw[key])
        cfg = cfg.replace(**raw)
    return cfg


DEFAULTS = Config()
