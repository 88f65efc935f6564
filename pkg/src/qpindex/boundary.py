"""Corner and hinge invariants of gap-certified models.

Corner modes are counted on finite square sections of the lattice operator:
the near-zero spectral projector is traced against the chiral operator inside
a window around each of the four corners.  Tracing the projector (rather than
classifying individual eigenvectors) is insensitive to the cat-state mixing
that exact chiral degeneracy produces between corners, while the per-mode
localization weights remain available as diagnostics.  Hinge invariants are
signed zero-crossing counts of corner-localized eigenvalue branches tracked
around the hinge momentum circle.

An independent oracle integrates the degree-three winding density
Tr((g^{-1} dg)^3) of the continued symbol over the four glued three-spheres
(each the boundary of a product of two disks); for chiral models those
windings reproduce the corner counts up to one global sign.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.optimize import linear_sum_assignment

from .bulk import bulk_gap, mu2d, mu3d
from .config import DEFAULTS
from .errors import (
    GapViolation,
    QuadratureUnresolved,
    RangeTooLarge,
    TrackingLost,
    UnstableCount,
)
from .laurent import Family3D, LaurentMatrix, SymmetryData
from .wienerhopf import ExtendedSymbol, GapReport, assumption_check

__all__ = [
    "QuarterTruncation",
    "truncate",
    "corner_index",
    "corner_indices",
    "spectral_flow",
    "spectral_flows",
    "winding3",
    "BoundaryInvariants",
    "CorrespondenceReport",
    "theorem_check",
    "CORNERS",
    "CORNER_SPHERES",
]

CORNERS = ("a", "b", "c", "d")

# corner label -> variable flips applied to the symbol before assembly
_CORNER_FLIPS = {"a": (), "b": (0,), "c": (0, 1), "d": (1,)}

# corner label -> signs (s, t) of the glued sphere carrying its winding
CORNER_SPHERES = {"a": (1, 1), "b": (-1, 1), "c": (-1, -1), "d": (1, -1)}


@dataclass
class QuarterTruncation:
    """Finite section of a quarter-plane compression.

    Sites occupy {0..L-1}^2 with the physical corner at (0, 0); the other
    corner types are produced by flipping symbol variables before assembly.
    """

    label: str
    L: int
    matrix: sp.csr_matrix
    block_size: int

    def site_index(self, x, y):
        return (x * self.L + y) * self.block_size


def truncate(H: LaurentMatrix, label, L, cfg=DEFAULTS) -> QuarterTruncation:
    """Assemble the L x L square section of the quarter-plane compression."""
    if H.nvars != 2:
        raise ValueError("truncate needs a two-variable symbol")
    if label not in CORNERS:
        raise ValueError(f"corner label must be one of {CORNERS}")
    span = max(
        max(abs(k[0]), abs(k[1])) for k in H.terms
    ) if H.terms else 0
    if span >= L / 4:
        raise RangeTooLarge(f"hopping range {span} too large for L={L}")
    sym = H
    for var in _CORNER_FLIPS[label]:
        sym = sym.flip_variable(var)
    n = sym.size
    mat = None
    for (kx, ky), a in sym.terms.items():
        shift = sp.kron(
            sp.eye_array(L, k=-kx, format="coo"),
            sp.eye_array(L, k=-ky, format="coo"),
            format="coo",
        )
        term = sp.kron(shift, sp.coo_matrix(a), format="coo")
        mat = term if mat is None else mat + term
    if mat is None:
        mat = sp.coo_matrix((L * L * n, L * L * n), dtype=complex)
    return QuarterTruncation(label=label, L=L, matrix=mat.tocsr(), block_size=n)


# ---------------------------------------------------------------------------
# near-zero spectra of square sections
# ---------------------------------------------------------------------------


def _near_zero_eigs(matrix, want_beyond, k0=16, shift=1e-6):
    """Eigenpairs nearest zero, with enough of them that the furthest one
    exceeds ``want_beyond`` (confirming nothing inside was missed).

    Shift-invert Lanczos with a small offset keeps the factorization
    nonsingular when exact zero modes are present; a Gram check catches the
    rare loss of orthonormality inside degenerate clusters, falling back to
    dense diagonalization.  Returns ``(evals, vecs, k_used)`` sorted by
    distance from zero.
    """
    mat = matrix.tocsc()
    dim = mat.shape[0]
    k = min(max(k0, 2), dim - 2)
    while True:
        try:
            evals, vecs = spla.eigsh(mat, k=k, sigma=shift, which="LM")
        except (RuntimeError, spla.ArpackNoConvergence):
            evals, vecs = np.linalg.eigh(mat.toarray())
            break
        if np.abs(evals).max() >= want_beyond or k >= dim - 2:
            gram = vecs.conj().T @ vecs
            if np.linalg.norm(gram - np.eye(k)) > 1e-8:
                evals, vecs = np.linalg.eigh(mat.toarray())
            break
        k = min(2 * k, dim - 2)
    order = np.argsort(np.abs(evals))
    return evals[order], vecs[:, order], k


def _corner_positions(L):
    return {"a": (0, 0), "b": (L - 1, 0), "c": (L - 1, L - 1), "d": (0, L - 1)}


def _corner_site_masks(L, n, radius):
    """Boolean masks over the flattened (site, orbital) index per corner."""
    xs, ys = np.meshgrid(np.arange(L), np.arange(L), indexing="ij")
    masks = {}
    for label, (cx, cy) in _corner_positions(L).items():
        near = (xs - cx) ** 2 + (ys - cy) ** 2 <= radius ** 2
        masks[label] = np.repeat(near.reshape(-1), n)
    return masks


def _corner_weights(vecs, masks):
    """Weight of each column vector inside each corner window."""
    dens = np.abs(vecs) ** 2
    return {lab: dens[mask].sum(axis=0) for lab, mask in masks.items()}


def _indices_at_L(H, chiral, L, zero_tol, cfg):
    trunc = truncate(H, "a", L, cfg)
    n = trunc.block_size
    evals, evecs, _ = _near_zero_eigs(trunc.matrix, want_beyond=10 * zero_tol)
    keep = np.abs(evals) < zero_tol
    modes = evecs[:, keep]
    energies = evals[keep]
    radius = cfg.loc_radius_factor * L
    masks = _corner_site_masks(L, n, radius)
    weights = _corner_weights(modes, masks)
    pi_diag = np.tile(np.diag(chiral).real, L * L)
    if np.linalg.norm(chiral - np.diag(np.diag(chiral))) > 1e-12:
        pi_full = sp.kron(sp.eye_array(L * L), sp.csr_matrix(chiral))
    else:
        pi_full = None
    values = {}
    raws = {}
    for lab, mask in masks.items():
        wv = modes * mask[:, None]
        if pi_full is None:
            raw = float(np.real(np.einsum("im,i,im->", wv.conj(), pi_diag, wv)))
        else:
            raw = float(np.real(np.einsum("im,im->", wv.conj(), pi_full @ wv)))
        val = int(round(raw))
        values[lab] = val
        raws[lab] = raw
    diag = {
        "L": L,
        "zero_tol": zero_tol,
        "mode_energies": [float(e) for e in energies],
        "corner_weights": {
            lab: [float(x) for x in w] for lab, w in weights.items()
        },
        "raw_traces": raws,
    }
    return values, diag


def corner_indices(H: LaurentMatrix, s: SymmetryData, L=None, cfg=DEFAULTS,
                   gap: GapReport | None = None, zero_tol=None):
    """Chiral corner-mode counts at all four corners, with L-stability check.

    The edge/surface gap assumption is certified first (or a precomputed
    passing report is supplied); without it the counts are not defined and a
    :class:`GapViolation` is raised.  Counts are recomputed at L and L+8 and
    must agree exactly, otherwise :class:`UnstableCount` is raised.
    """
    if s.chiral is None:
        raise GapViolation("corner counting requires a chiral operator")
    if gap is None:
        gap = assumption_check(H, cfg)
    if not gap.passed:
        raise GapViolation("half-plane gap certification failed")
    L = L or cfg.corner_L
    if zero_tol is None:
        zero_tol = cfg.zero_tol_factor * bulk_gap(H, cfg)
    vals1, diag1 = _indices_at_L(H, s.chiral, L, zero_tol, cfg)
    vals2, diag2 = _indices_at_L(H, s.chiral, L + 8, zero_tol, cfg)
    if vals1 != vals2:
        raise UnstableCount(
            f"corner counts changed between L={L} ({vals1}) and "
            f"L={L + 8} ({vals2})"
        )
    return vals1, {"first": diag1, "second": diag2}


def corner_index(H, s, label, L=None, cfg=DEFAULTS, gap=None, zero_tol=None):
    """Count of chiral zero modes bound to one corner (signed by parity)."""
    values, diags = corner_indices(H, s, L, cfg, gap=gap, zero_tol=zero_tol)
    return values[label], diags


# ---------------------------------------------------------------------------
# hinge spectral flow
# ---------------------------------------------------------------------------


def _window_modes(family, theta, L, window, cfg, k0=16):
    """Complete orthonormal eigenpairs with |E| < window at one theta."""
    trunc = truncate(family.slice(theta), "a", L, cfg)
    evals, evecs, k_used = _near_zero_eigs(trunc.matrix, want_beyond=window, k0=k0)
    keep = np.abs(evals) < window
    return evals[keep], evecs[:, keep], trunc.block_size, k_used


def _flow_once(family, s, L, nsamples, cfg):
    thetas = 2 * np.pi * np.arange(nsamples) / nsamples
    window = cfg.track_window
    radius = cfg.loc_radius_factor * L
    masks = None
    frames = []
    k0 = 16
    for th in thetas:
        evals, evecs, n, k_used = _window_modes(family, th, L, window, cfg, k0=k0)
        # next theta needs roughly as many vectors as this window held
        k0 = max(16, min(256, len(evals) + 16))
        if masks is None:
            masks = _corner_site_masks(L, n, radius)
        weights = _corner_weights(evecs, masks)
        frames.append((evals, evecs, weights))

    counts = dict.fromkeys(CORNERS, 0)
    crossings = []
    for i in range(nsamples):
        e0, v0, w0 = frames[i]
        e1, v1, w1 = frames[(i + 1) % nsamples]
        if len(e0) == 0 or len(e1) == 0:
            continue
        ovl = np.abs(v0.conj().T @ v1)
        rows, cols = linear_sum_assignment(-ovl)
        for r, c in zip(rows, cols):
            amp = ovl[r, c]
            s0 = e0[r] >= 0.0
            s1 = e1[c] >= 0.0
            if s0 == s1:
                continue
            # a sign change is a crossing only on a continuously tracked
            # branch: full overlap, or a two-dimensional degenerate mixing
            # event (exactly symmetric crossings produce 1/sqrt(2) mixes)
            quality = amp >= cfg.overlap_min
            if not quality:
                two = np.sort(ovl[r, :] ** 2)[-2:].sum()
                quality = two >= 0.8
            if not quality:
                if min(abs(e0[r]), abs(e1[c])) < 0.5 * window:
                    raise TrackingLost(
                        f"overlap {amp:.3f} below {cfg.overlap_min} deep in "
                        f"the window at theta index {i}"
                    )
                # churn at the window rim: states entering or leaving
                continue
            # attribute to the endpoint whose localization is sharper
            cand0 = {lab: w0[lab][r] for lab in CORNERS}
            cand1 = {lab: w1[lab][c] for lab in CORNERS}
            pick = cand0 if max(cand0.values()) >= max(cand1.values()) else cand1
            lab = max(pick, key=pick.get)
            sign = 1 if (not s0 and s1) else -1
            counts[lab] += sign
            crossings.append(
                {
                    "theta_interval": [float(thetas[i]),
                                       float(thetas[(i + 1) % nsamples])],
                    "corner": lab,
                    "sign": sign,
                    "energies": [float(e0[r]), float(e1[c])],
                    "overlap": float(amp),
                    "weight": float(pick[lab]),
                }
            )
    return counts, crossings


def spectral_flows(F: Family3D, s: SymmetryData, L=None, theta_samples=None,
                   cfg=DEFAULTS, gap: GapReport | None = None):
    """Signed zero-crossing counts of hinge spectra at all four hinges."""
    if gap is None:
        gap = assumption_check(F, cfg)
    if not gap.passed:
        raise GapViolation("surface gap certification failed")
    L = L or cfg.hinge_L
    nsamples = theta_samples or cfg.theta_samples
    try:
        counts, crossings = _flow_once(F, s, L, nsamples, cfg)
    except TrackingLost:
        counts, crossings = _flow_once(F, s, L, 2 * nsamples, cfg)
    return counts, {"crossings": crossings, "L": L, "theta_samples": nsamples}


def spectral_flow(F, s, label, L=None, theta_samples=None, cfg=DEFAULTS,
                  gap=None):
    """Spectral flow at one hinge; positive for upward zero crossings."""
    counts, diags = spectral_flows(F, s, L, theta_samples, cfg, gap=gap)
    return counts[label], diags


# ---------------------------------------------------------------------------
# glued-sphere winding oracle
# ---------------------------------------------------------------------------

# Calibrated on the degree-one reference map: the raw integral of
# Tr((g^{-1}dg)^3) over the glued sphere with both plus disks equals
# +24 pi^2 for that map under the patch orientations used below (the
# density is real for unitary-valued maps).
_WINDING3_NORM = 24.0 * np.pi ** 2


def _patch_integral(g, signs, which, ndisk, nang, ncirc):
    """Integral of Tr((g^{-1}dg)^3) over one patch of a glued sphere.

    ``which == 0`` is disk x circle with coordinate order (rho, phi_u,
    phi_v); ``which == 1`` is circle x disk with order (phi_u, rho, phi_v).
    Both orders are positively oriented for the boundary orientation of the
    product of disks; minus disks are parameterized through the reciprocal
    chart, which preserves orientation.
    """
    su, sv = signs
    hr = 1.0 / ndisk
    ha = 2 * np.pi / nang
    hc = 2 * np.pi / ncirc
    rho = (np.arange(ndisk) + 0.5) * hr
    ang = (np.arange(nang) + 0.5) * ha
    crc = (np.arange(ncirc) + 0.5) * hc

    if which == 0:
        a_grid, b_grid, c_grid = np.meshgrid(rho, ang, crc, indexing="ij")
        steps = (hr, ha, hc)

        def to_zw(a, b, c):
            u = a * np.exp(1j * b)
            v = np.exp(1j * c)
            z = u if su > 0 else _recip(u)
            w = v if sv > 0 else _recip(v)
            return z, w
    else:
        a_grid, b_grid, c_grid = np.meshgrid(crc, rho, ang, indexing="ij")
        steps = (hc, hr, ha)

        def to_zw(a, b, c):
            u = np.exp(1j * a)
            v = b * np.exp(1j * c)
            z = u if su > 0 else _recip(u)
            w = v if sv > 0 else _recip(v)
            return z, w

    g0 = g(*to_zw(a_grid, b_grid, c_grid))
    derivs = []
    for idx, h in enumerate(steps):
        shift = [a_grid, b_grid, c_grid]
        shift[idx] = shift[idx] + h / 2
        gp = g(*to_zw(*shift))
        shift[idx] = shift[idx] - h
        gm = g(*to_zw(*shift))
        derivs.append(np.linalg.solve(g0, (gp - gm) / h))
    a1, a2, a3 = derivs
    dens = 3.0 * np.trace(
        a1 @ (a2 @ a3 - a3 @ a2), axis1=-2, axis2=-1
    )
    return dens.sum() * steps[0] * steps[1] * steps[2]


def _recip(u):
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(u == 0, np.inf + 0j, 1.0 / np.where(u == 0, 1.0, u))
    return out


def winding3(g, signs=(1, 1), cfg=DEFAULTS, refine=True):
    """Degree-three winding of an invertible-matrix map on a glued sphere.

    ``g`` must broadcast over complex arrays (z, w) covering the two solid
    torus patches of the sphere selected by ``signs`` (minus signs put the
    corresponding variable on the outer disk, infinity included).  Returns
    ``(raw, rounded)``; the integrality guard triggers one refinement before
    raising :class:`QuadratureUnresolved`.
    """
    ndisk, ncirc = cfg.winding3_disk, cfg.winding3_circle
    for attempt in range(2 if refine else 1):
        total = 0j
        total += _patch_integral(g, signs, 0, ndisk, ndisk, ncirc)
        total += _patch_integral(g, signs, 1, ndisk, ndisk, ncirc)
        raw = (total / _WINDING3_NORM).real
        rounded = int(np.round(raw))
        if abs(raw - rounded) < cfg.winding3_guard:
            return raw, rounded
        ndisk *= 2
        ncirc *= 2
    raise QuadratureUnresolved(
        f"winding integral {raw:.4f} failed the integrality guard"
    )


# ---------------------------------------------------------------------------
# correspondence checks
# ---------------------------------------------------------------------------


@dataclass
class BoundaryInvariants:
    """Four boundary integers plus their winding coordinates (p, q, r).

    The coordinates solve value = (p+q, -q+r, -r, -p); the solved triple is
    (p, q, r) = (-value_d, value_a + value_d, -value_c) and the b-component
    consistency value_b == -q + r is checked by :func:`theorem_check`.
    """

    values: dict
    pqr: tuple
    method: str
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "values": {k: int(v) for k, v in self.values.items()},
            "pqr": [int(x) for x in self.pqr],
            "method": self.method,
        }


def _solve_pqr(values):
    p = -values["d"]
    r = -values["c"]
    q = values["a"] - p
    return (p, q, r)


@dataclass
class CorrespondenceReport:
    dimension: int
    gap: GapReport
    indicator: object
    boundary: BoundaryInvariants
    theorem: dict
    identities: dict
    timings: dict
    config: dict
    oracle: dict | None = None

    @property
    def passed(self):
        return bool(self.theorem["pass"]) and all(self.identities.values())

    def to_dict(self):
        out = {
            "dimension": self.dimension,
            "gap": self.gap.to_dict(),
            "indicator": self.indicator.to_dict(),
            "boundary": self.boundary.to_dict(),
            "theorem": self.theorem,
            "identities": {k: bool(v) for k, v in self.identities.items()},
            "timings": {k: round(float(v), 3) for k, v in self.timings.items()},
            "config": self.config,
            "passed": self.passed,
        }
        if self.oracle is not None:
            out["oracle"] = self.oracle
        return out


def _identity_checks(values, indicator):
    pqr = _solve_pqr(values)
    p, q, r = pqr
    ids = {
        "zero_sum": sum(values.values()) == 0,
        "pairing_ac": values["a"] == -values["c"],
        "pairing_bd": values["b"] == -values["d"],
        "pqr_b_component": values["b"] == -q + r,
    }
    lhs = indicator.half_mu
    rhs = (values["a"] + values["b"]) % 2
    theorem = {
        "lhs_half_mu": lhs,
        "rhs_boundary_mod2": int(rhs),
        "pass": lhs is not None and int(lhs) == int(rhs),
    }
    return ids, theorem, pqr


def theorem_check(model, s: SymmetryData, cfg=DEFAULTS, L=None,
                  theta_samples=None, oracle=False):
    """Full bulk-boundary correspondence run for one model.

    Two-variable symbols get the corner route, families the hinge route.
    Asserted identities: the mod-2 equality of the half indicator with the
    first two boundary values, the inversion pairing, the zero sum, and the
    (p, q, r) reconstruction.  With ``oracle=True`` (2D chiral models) the
    glued-sphere windings of the continued off-diagonal block are computed
    and compared per corner.
    """
    import time as _time

    timings = {}
    t0 = _time.time()
    gap = assumption_check(model, cfg)
    timings["gap"] = _time.time() - t0
    if not gap.passed:
        raise GapViolation("gap certification failed; correspondence undefined")

    t0 = _time.time()
    if isinstance(model, Family3D):
        indicator = mu3d(model, s, cfg)
    else:
        indicator = mu2d(model, s, cfg)
    timings["indicator"] = _time.time() - t0

    t0 = _time.time()
    if isinstance(model, Family3D):
        values, diags = spectral_flows(
            model, s, L=L, theta_samples=theta_samples, cfg=cfg, gap=gap
        )
        method = "spectral_flow"
        dim = 3
    else:
        values, diags = corner_indices(model, s, L=L, cfg=cfg, gap=gap)
        method = "truncation"
        dim = 2
    timings["boundary"] = _time.time() - t0

    ids, theorem, pqr = _identity_checks(values, indicator)
    boundary = BoundaryInvariants(
        values=values, pqr=pqr, method=method, diagnostics=diags
    )

    oracle_out = None
    if oracle and dim == 2 and s.chiral is not None:
        t0 = _time.time()
        oracle_out = winding_oracle(model, s, values, cfg)
        timings["oracle"] = _time.time() - t0

    return CorrespondenceReport(
        dimension=dim,
        gap=gap,
        indicator=indicator,
        boundary=boundary,
        theorem=theorem,
        identities=ids,
        timings=timings,
        config=cfg.to_dict(),
        oracle=oracle_out,
    )


def winding_oracle(H: LaurentMatrix, s: SymmetryData, corner_values,
                   cfg=DEFAULTS):
    """Glued-sphere windings of the continued off-diagonal block, per corner.

    Returns the raw and rounded winding per corner plus the fitted global
    sign relating them to the truncation counts; ``consistent`` records
    whether one sign works for all four corners.
    """
    ext = ExtendedSymbol(H, cfg)
    n = H.size // 2
    chi = s.chiral
    # block structure: the chiral operator must be diag(+1_n, -1_n)
    expected = np.diag(np.concatenate([np.ones(n), -np.ones(n)]))
    if np.linalg.norm(chi - expected) > 1e-12:
        raise ValueError("winding oracle expects chiral operator diag(1, -1)")

    def block(zz, ww):
        vals = _extended_values(ext, zz, ww)
        return vals[..., n:, :n]

    out = {}
    rounded = {}
    for lab in CORNERS:
        raw, k = winding3(block, CORNER_SPHERES[lab], cfg)
        out[lab] = {"raw": float(raw), "rounded": int(k)}
        rounded[lab] = k
    sign = None
    consistent = True
    for lab in CORNERS:
        cv = corner_values[lab]
        wv = rounded[lab]
        if abs(cv) != abs(wv):
            consistent = False
            continue
        if cv != 0:
            this = 1 if cv == wv else -1
            if sign is None:
                sign = this
            elif sign != this:
                consistent = False
    return {
        "windings": out,
        "global_sign": sign,
        "consistent": consistent,
    }


def _extended_values(ext: ExtendedSymbol, zz, ww):
    """Evaluate the continuation on broadcast arrays (one variable off T)."""
    zz = np.asarray(zz, dtype=complex)
    ww = np.asarray(ww, dtype=complex)
    zz, ww = np.broadcast_arrays(zz, ww)
    flat_z = zz.reshape(-1)
    flat_w = ww.reshape(-1)
    n = ext.base.size
    out = np.empty((flat_z.size, n, n), dtype=complex)
    mod_z = np.abs(flat_z)
    z_off = np.abs(mod_z - 1.0) > 1e-12
    # group by the frozen circle variable to share factorizations
    idx_all = np.arange(flat_z.size)
    for off_mask, axis in ((z_off, 0), (~z_off, 1)):
        idx = idx_all[off_mask]
        if idx.size == 0:
            continue
        frozen = flat_w[idx] if axis == 0 else flat_z[idx]
        running = flat_z[idx] if axis == 0 else flat_w[idx]
        uniq, inv = np.unique(frozen, return_inverse=True)
        for ui, fval in enumerate(uniq):
            sel = idx[inv == ui]
            run = running[inv == ui]
            out[sel] = ext.disk_values(axis, fval, run)
    return out.reshape(zz.shape + (n, n))
