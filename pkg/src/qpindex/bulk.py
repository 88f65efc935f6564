"""Fixed-point parity counts and symmetry-based indicators.

At an inversion-fixed momentum the Hamiltonian commutes with the inversion
operator, so the occupied (negative-energy) subspace splits into even and
odd parity sectors.  The indicator is minus the total odd count over all
fixed momenta, mod 4; for the symmetry classes handled here it only takes
the values 0 and 2, so its half is a well-defined bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DEFAULTS
from .errors import GaplessAtFixedPoint, NonCommuting, SymmetryError
from .laurent import Family3D, LaurentMatrix, SymmetryData, check_inversion

__all__ = [
    "parity_counts",
    "FixedPointEntry",
    "IndicatorReport",
    "mu2d",
    "mu3d",
    "homotopy_scan",
    "fixed_points_2d",
]

GAP_FLOOR = 1e-9
COMM_TOL = 1e-9
COUNT_GUARD = 1e-6


def fixed_points_2d():
    return [(1, 1), (-1, 1), (1, -1), (-1, -1)]


def parity_counts(hval, inversion, gap_floor=GAP_FLOOR):
    """Even/odd occupied counts (n_plus, n_minus) at a fixed momentum.

    Uses the basis-free trace formula n_pm = (rank P +- Tr(I P)) / 2 with P
    the spectral projector onto negative energies, which is insensitive to
    degenerate-eigenvector ambiguity.
    """
    hval = np.asarray(hval, dtype=complex)
    inversion = np.asarray(inversion, dtype=complex)
    comm = np.linalg.norm(hval @ inversion - inversion @ hval)
    if comm > COMM_TOL:
        raise NonCommuting(
            f"Hamiltonian does not commute with inversion at fixed point "
            f"(defect {comm:.3e})"
        )
    evals, evecs = np.linalg.eigh(hval)
    if np.abs(evals).min() < gap_floor:
        raise GaplessAtFixedPoint(
            f"eigenvalue {np.abs(evals).min():.3e} inside the gap floor"
        )
    occ = evecs[:, evals < 0]
    rank = occ.shape[1]
    trace = float(np.real(np.einsum("ij,jk,ki->", inversion, occ, occ.conj().T)))
    n_plus_raw = (rank + trace) / 2.0
    n_minus_raw = (rank - trace) / 2.0
    n_plus = int(round(n_plus_raw))
    n_minus = int(round(n_minus_raw))
    if abs(n_plus - n_plus_raw) > COUNT_GUARD or abs(n_minus - n_minus_raw) > COUNT_GUARD:
        raise NonCommuting(
            f"parity counts not integral: ({n_plus_raw}, {n_minus_raw})"
        )
    return n_plus, n_minus


@dataclass(frozen=True)
class FixedPointEntry:
    label: str
    coordinates: tuple
    n_plus: int
    n_minus: int
    occupied_rank: int

    def to_dict(self):
        return {
            "label": self.label,
            "coordinates": [
                float(c) if not isinstance(c, str) else c for c in self.coordinates
            ],
            "n_plus": self.n_plus,
            "n_minus": self.n_minus,
            "occupied_rank": self.occupied_rank,
        }


@dataclass(frozen=True)
class IndicatorReport:
    """Indicator data over all inversion-fixed momenta.

    ``half_mu`` is None exactly when ``mu`` falls outside {0, 2}; for the
    symmetry classes covered that signals invalid input, and the diagnostic
    says so.
    """

    dimension: int
    entries: tuple
    mu: int
    half_mu: int | None
    diagnostic: str = ""

    def to_dict(self):
        return {
            "dimension": self.dimension,
            "entries": [e.to_dict() for e in self.entries],
            "mu": self.mu,
            "half_mu": self.half_mu,
            "diagnostic": self.diagnostic,
        }


def _report(entries, dimension):
    total_minus = sum(e.n_minus for e in entries)
    mu = int((-total_minus) % 4)
    if mu in (0, 2):
        half = mu // 2
        diag = ""
    else:
        half = None
        diag = (
            f"mu = {mu} outside {{0, 2}}: input does not define a valid "
            f"inversion-symmetric class"
        )
    return IndicatorReport(
        dimension=dimension, entries=tuple(entries), mu=mu, half_mu=half,
        diagnostic=diag,
    )


def mu2d(H: LaurentMatrix, s: SymmetryData, cfg=DEFAULTS) -> IndicatorReport:
    """Indicator of a two-dimensional inversion-symmetric gapped symbol."""
    if H.nvars != 2:
        raise ValueError("mu2d needs a two-variable symbol")
    ok, defect = check_inversion(H, s)
    if not ok:
        raise SymmetryError(f"inversion symmetry violated (defect {defect:.3e})")
    _require_bulk_gap(H, cfg)
    entries = []
    for pt in fixed_points_2d():
        n_plus, n_minus = parity_counts(H.eval(pt), s.inversion)
        entries.append(
            FixedPointEntry(
                label=f"({pt[0]:+d},{pt[1]:+d})",
                coordinates=pt,
                n_plus=n_plus,
                n_minus=n_minus,
                occupied_rank=n_plus + n_minus,
            )
        )
    return _report(entries, 2)


def mu3d(F: Family3D, s: SymmetryData, cfg=DEFAULTS) -> IndicatorReport:
    """Indicator of a three-dimensional family over its eight fixed momenta."""
    entries = []
    for theta in F.fixed_thetas:
        sl = F.slice(theta)
        for pt in fixed_points_2d():
            n_plus, n_minus = parity_counts(sl.eval(pt), s.inversion)
            tag = "0" if theta == 0 else "pi"
            entries.append(
                FixedPointEntry(
                    label=f"({pt[0]:+d},{pt[1]:+d},{tag})",
                    coordinates=(pt[0], pt[1], float(theta)),
                    n_plus=n_plus,
                    n_minus=n_minus,
                    occupied_rank=n_plus + n_minus,
                )
            )
    return _report(entries, 3)


def _require_bulk_gap(H, cfg):
    grid = np.exp(2j * np.pi * np.arange(cfg.gap_grid_2d) / cfg.gap_grid_2d)
    pts = np.stack(
        [np.repeat(grid, len(grid)), np.tile(grid, len(grid))], axis=1
    )
    eigs = np.linalg.eigvalsh(H.eval_many(pts))
    gap = float(np.abs(eigs).min())
    if gap < GAP_FLOOR:
        raise GaplessAtFixedPoint(f"bulk gap {gap:.3e} below floor on torus grid")
    return gap


def bulk_gap(H: LaurentMatrix, cfg=DEFAULTS) -> float:
    """Minimum |eigenvalue| of the symbol over a torus grid."""
    return _require_bulk_gap(H, cfg)


def homotopy_scan(path, s: SymmetryData, grid, cfg=DEFAULTS):
    """Indicator along a parameterized family of two-variable symbols.

    ``path`` maps each grid value r to a symbol; every sample must stay
    gapped and inversion-symmetric.  A change of mu between samples is
    flagged in the returned list of (r, report, changed) since it indicates
    a gap closing between samples.
    """
    results = []
    prev_mu = None
    for r in grid:
        H = path(r)
        try:
            rep = mu2d(H, s, cfg)
        except GaplessAtFixedPoint as exc:
            raise GaplessAtFixedPoint(f"at parameter r={r}: {exc}") from exc
        changed = prev_mu is not None and rep.mu != prev_mu
        results.append((float(r), rep, changed))
        prev_mu = rep.mu
    return results
