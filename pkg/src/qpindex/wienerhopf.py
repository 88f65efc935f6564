"""Canonical one-sided factorization of matrix symbols and its consequences.

For a one-variable matrix symbol f with winding number zero, the truncated
block-Toeplitz system ``T_N X = E_0`` recovers the Taylor coefficients of
``h = f_plus^{-1} c`` (c a constant); then ``f_minus = f h`` has only
nonpositive Fourier coefficients and ``f_plus = h^{-1}``.  That factorization
certifies invertibility of the half-line compression of f and induces the
gap-preserving continuation

    f^e(z) = f_minus(conj(z)^{-1}) @ f_plus(z),        |z| <= 1,

which is independent of the factorization chosen.  Two-variable symbols are
continued patch by patch onto the union of four solid tori glued along the
torus (one variable runs over a disk while the other stays on the circle).

The module also certifies invertibility of half-plane compressions by
combining per-momentum winding checks with stabilized smallest singular
values of banded finite sections.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy.linalg.lapack import zgbtrf, zgbtrs

from .config import DEFAULTS
from .errors import (
    IllConditioned,
    NonCanonical,
    PhaseJump,
    SingularOnCircle,
    Undecided,
)
from .laurent import Family3D, LaurentMatrix

__all__ = [
    "winding_det",
    "PartialIndexReport",
    "partial_index_report",
    "CanonicalFactorization",
    "factorize_right",
    "factorize_left",
    "extend_1var",
    "ExtendedSymbol",
    "extend_bulk",
    "GapEdgeEntry",
    "GapReport",
    "half_plane_gap",
    "assumption_check",
]


# ---------------------------------------------------------------------------
# winding numbers
# ---------------------------------------------------------------------------


def _winding_from_dets(dets, guard):
    """Winding of a closed loop of nonzero determinants, or None on a jump."""
    rot = np.roll(dets, -1) / dets
    incs = np.angle(rot)
    if np.abs(incs).max() > np.pi / 2:
        return None
    raw = incs.sum() / (2 * np.pi)
    k = int(np.round(raw))
    if abs(raw - k) >= guard:
        return None
    return k


def winding_det(f: LaurentMatrix, cfg=DEFAULTS):
    """Winding number of det f around the origin.

    Phase increments are summed on a uniform grid; any increment above pi/2
    triggers one grid refinement before giving up.
    """
    if f.nvars != 1:
        raise ValueError("winding_det needs a one-variable symbol")
    grid = cfg.winding_grid
    for attempt in range(2):
        zs = np.exp(2j * np.pi * np.arange(grid) / grid)
        dets = np.linalg.det(f.eval_many(zs))
        small = np.abs(dets).min()
        if small <= cfg.winding_det_floor:
            raise SingularOnCircle(
                f"|det f| dips to {small:.3e} on the circle (floor "
                f"{cfg.winding_det_floor:.1e})"
            )
        k = _winding_from_dets(dets, cfg.winding_round_guard)
        if k is not None:
            return k
        grid *= 2
    raise PhaseJump("winding phase increment above pi/2 after refinement")


# ---------------------------------------------------------------------------
# partial-index diagnostics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PartialIndexReport:
    """Canonical/non-canonical decision with Fredholm diagnostics.

    The full nonincreasing index list is deliberately not computed; only the
    determinant winding and kernel/cokernel estimates of the half-line
    compression, whose difference must equal minus the winding.
    """

    winding_det: int
    ker_dim: int
    coker_dim: int
    canonical: bool


def _tall_kernel_dim(f: LaurentMatrix, nsites, tol):
    """Kernel dimension of the half-line compression, from a tall section.

    Rows cover every equation touching the first ``nsites`` columns, so the
    kernel of the rectangular matrix consists of truncated true kernel
    vectors up to exponentially small tails.
    """
    lo, hi = f.exponent_range(0)
    n = f.size
    nrows = nsites + max(hi, 0)
    mat = np.zeros((nrows, n, nsites, n), dtype=complex)
    for (k,), a in f.terms.items():
        for j in range(nsites):
            i = j + k
            if 0 <= i < nrows:
                mat[i, :, j, :] = a
    sv = np.linalg.svd(mat.reshape(nrows * n, nsites * n), compute_uv=False)
    return int(np.sum(sv < tol))


def partial_index_report(f: LaurentMatrix, cfg=DEFAULTS, nsites=96, tol=1e-6):
    wd = winding_det(f, cfg)
    ker = _tall_kernel_dim(f, nsites, tol)
    coker = _tall_kernel_dim(f.conjugate_transpose(), nsites, tol)
    return PartialIndexReport(
        winding_det=wd,
        ker_dim=ker,
        coker_dim=coker,
        canonical=(wd == 0 and ker == 0 and coker == 0),
    )


# ---------------------------------------------------------------------------
# canonical factorization
# ---------------------------------------------------------------------------


def _poly_eval(coeffs, z):
    """Evaluate ``sum_k coeffs[k] z^k`` for an array of scalars z (Horner)."""
    z = np.asarray(z, dtype=complex)
    out = np.broadcast_to(coeffs[-1], z.shape + coeffs.shape[1:]).copy()
    for c in coeffs[-2::-1]:
        out *= z[..., None, None]
        out += c
    return out


@dataclass
class CanonicalFactorization:
    """One-sided factorization data of a one-variable matrix symbol.

    ``side == "right"`` stores f = f_minus f_plus with ``plus_coeffs`` the
    Taylor coefficients of f_plus and ``minus_coeffs[k]`` the coefficient of
    z^{-k} in f_minus.  ``side == "left"`` stores f = f_plus f_minus through
    the right factorization of the flipped symbol; the exposed coefficient
    arrays refer to the left factors themselves.

    The inherent constant ambiguity (f_minus C^{-1}, C f_plus) is left
    unnormalized; the induced continuation cancels it.
    """

    side: str
    plus_coeffs: np.ndarray
    minus_coeffs: np.ndarray
    residual: float
    decay: float
    nblocks: int
    _h: np.ndarray = field(repr=False)
    _minus_raw: np.ndarray = field(repr=False)

    def extend(self, z):
        """Continuation value(s) at z; disk side must match ``side``.

        Right factorizations continue into |z| <= 1, left ones into
        |z| >= 1.  Vectorized over arrays.
        """
        z = np.asarray(z, dtype=complex)
        if self.side == "right":
            inner = z
        else:
            if np.any(z == 0):
                raise ValueError("left-side continuation needs |z| >= 1")
            with np.errstate(divide="ignore", invalid="ignore"):
                inner = np.where(
                    np.isinf(z), 0j, 1.0 / np.where(np.isinf(z), 1.0, z)
                )
        # minus factor at conj(inner)^{-1} is a polynomial in conj(inner)
        mvals = _poly_eval(self._minus_raw, np.conj(inner))
        pvals = np.linalg.inv(_poly_eval(self._h, inner))
        return mvals @ pvals


def _block_toeplitz(f: LaurentMatrix, nblocks):
    n = f.size
    mat = np.zeros((nblocks, n, nblocks, n), dtype=complex)
    for (k,), a in f.terms.items():
        if abs(k) >= nblocks:
            continue
        i0, j0 = max(k, 0), max(-k, 0)
        for t in range(nblocks - abs(k)):
            mat[i0 + t, :, j0 + t, :] = a
    return mat.reshape(nblocks * n, nblocks * n)


def _attempt_right(f, nblocks, residual_tol, decay_tol, residual_grid):
    """One truncation level; returns (factorization, failure_reason)."""
    n = f.size
    lo, hi = f.exponent_range(0)
    tmat = _block_toeplitz(f, nblocks)
    rhs = np.zeros((nblocks * n, n), dtype=complex)
    rhs[:n, :n] = np.eye(n)
    try:
        sol = scipy.linalg.solve(tmat, rhs)
    except scipy.linalg.LinAlgError:
        raise NonCanonical("block-Toeplitz section numerically singular")
    h = sol.reshape(nblocks, n, n)
    h0 = h[0]
    sv0 = np.linalg.svd(h0, compute_uv=False)
    if sv0[-1] < 1e-12 * max(sv0[0], 1.0):
        raise NonCanonical("leading solved coefficient not invertible")
    norms = np.linalg.norm(h, axis=(1, 2))
    decay = float(norms[-1] / norms[0])
    if decay > decay_tol:
        return None, decay, f"coefficient decay {decay:.2e} above {decay_tol:.1e}"

    # one-sided split of g = f h on a fine grid
    m = max(-lo, 0)
    mgrid = 4 * nblocks
    zs = np.exp(2j * np.pi * np.arange(mgrid) / mgrid)
    hpad = np.zeros((mgrid, n, n), dtype=complex)
    hpad[:nblocks] = h
    hvals = mgrid * np.fft.ifft(hpad, axis=0)
    fvals = f.eval_many(zs)
    ghat = np.fft.fft(fvals @ hvals, axis=0) / mgrid
    pos_res = float(np.linalg.norm(ghat[1: mgrid - m], axis=(1, 2)).max()) if mgrid - m > 1 else 0.0
    minus = np.stack([ghat[(-k) % mgrid] for k in range(m + 1)])

    # plus factor Taylor coefficients (for inspection; evaluation inverts h)
    pvals = np.linalg.inv(hvals)
    plus = np.fft.fft(pvals, axis=0)[:nblocks] / mgrid

    # factorization residual on the reporting grid
    step = max(mgrid // residual_grid, 1)
    sel = slice(0, mgrid, step)
    recon = _poly_eval(minus, np.conj(zs[sel])) @ pvals[sel]
    residual = float(np.linalg.norm(fvals[sel] - recon, axis=(1, 2)).max())
    residual = max(residual, pos_res)

    cf = CanonicalFactorization(
        side="right",
        plus_coeffs=plus,
        minus_coeffs=minus,
        residual=residual,
        decay=decay,
        nblocks=nblocks,
        _h=h,
        _minus_raw=minus,
    )
    if residual > residual_tol:
        return None, decay, f"residual {residual:.2e} above {residual_tol:.1e}"
    return cf, decay, None


def factorize_right(f: LaurentMatrix, cfg=DEFAULTS, residual_tol=None):
    """Right canonical factorization f = f_minus f_plus on the circle.

    Escalates the truncation level until the coefficient decay and the grid
    residual meet tolerance.  Raises :class:`NonCanonical` when the symbol
    cannot be canonically factorized (nonzero winding, singular sections, or
    persistent decay failure) and :class:`IllConditioned` when only the
    residual tolerance cannot be met.
    """
    if f.nvars != 1:
        raise ValueError("factorize_right needs a one-variable symbol")
    tol = residual_tol if residual_tol is not None else cfg.residual_tol
    wd = winding_det(f, cfg)
    if wd != 0:
        raise NonCanonical(f"determinant winding {wd} != 0")
    reason = "no truncation level attempted"
    decay_ok = False
    for nblocks in cfg.factor_blocks:
        cf, decay, reason = _attempt_right(
            f, nblocks, tol, cfg.decay_tol, cfg.residual_grid
        )
        if cf is not None:
            return cf
        decay_ok = decay <= cfg.decay_tol
    if not decay_ok:
        raise NonCanonical(f"factorization failed: {reason}")
    raise IllConditioned(f"factorization failed: {reason}")


def factorize_left(f: LaurentMatrix, cfg=DEFAULTS, residual_tol=None):
    """Left canonical factorization f = f_plus f_minus.

    Obtained from the right factorization of the flipped symbol
    g(z) = f(1/z): the left factors are f_plus(z) = g_minus(1/z) and
    f_minus(z) = g_plus(1/z).
    """
    g = f.flip_variable(0)
    inner = factorize_right(g, cfg, residual_tol)
    return CanonicalFactorization(
        side="left",
        plus_coeffs=inner.minus_coeffs,
        minus_coeffs=inner.plus_coeffs,
        residual=inner.residual,
        decay=inner.decay,
        nblocks=inner.nblocks,
        _h=inner._h,
        _minus_raw=inner._minus_raw,
    )


def extend_1var(cf: CanonicalFactorization, z):
    """Continuation value at z from a canonical factorization.

    Right factorizations continue into the closed unit disk, left ones into
    the closed outer disk (infinity included).
    """
    z = np.asarray(z, dtype=complex)
    mod = np.abs(z[np.isfinite(z)])
    if cf.side == "right" and mod.size and mod.max() > 1 + 1e-9:
        raise ValueError("right factorization continues into |z| <= 1 only")
    if cf.side == "left" and mod.size and mod.min() < 1 - 1e-9:
        raise ValueError("left factorization continues into |z| >= 1 only")
    return cf.extend(z)


# ---------------------------------------------------------------------------
# extension of two-variable symbols onto the glued space
# ---------------------------------------------------------------------------


class ExtendedSymbol:
    """Gap-preserving continuation of a two-variable symbol.

    The domain is the union of four solid tori: one variable ranges over the
    inner or outer closed disk while the other stays on the unit circle.
    Each requested patch value triggers (and caches) one canonical
    factorization of the symbol with the circle variable frozen; evaluation
    off the cached set of frozen values triggers a fresh factorization
    rather than interpolating factors.
    """

    def __init__(self, base: LaurentMatrix, cfg=DEFAULTS, residual_tol=None):
        if base.nvars != 2:
            raise ValueError("ExtendedSymbol needs a two-variable symbol")
        self.base = base
        self.cfg = cfg
        self.residual_tol = residual_tol
        self._cache = {}

    def factorization(self, axis, frozen, outer):
        """Cached right factorization for the patch.

        ``axis`` is the running variable (0 or 1), ``frozen`` the value of
        the other variable on the circle, ``outer`` selects the |.| >= 1
        disk (the symbol is flipped so evaluation happens at the reciprocal
        point).
        """
        key = (int(axis), bool(outer), complex(frozen))
        cf = self._cache.get(key)
        if cf is None:
            f = self.base.fix_variable(1 - axis, frozen)
            if outer:
                f = f.flip_variable(0)
            try:
                cf = factorize_right(f, self.cfg, self.residual_tol)
            except (NonCanonical, IllConditioned) as exc:
                patch = ("z" if axis == 0 else "w") + ("-outer" if outer else "-inner")
                raise type(exc)(f"patch {patch}, frozen value {frozen}: {exc}")
            self._cache.setdefault(key, cf)
        return cf

    def disk_values(self, axis, frozen, points):
        """Vectorized continuation with variable ``axis`` off the circle.

        ``points`` may mix inner and outer disk values; circle points (up to
        1e-12) are evaluated directly from the symbol.
        """
        pts = np.asarray(points, dtype=complex)
        flat = pts.reshape(-1)
        out = np.empty(flat.shape + (self.base.size, self.base.size), complex)
        mod = np.abs(flat)
        on_circle = np.abs(mod - 1.0) <= 1e-12
        inner = (mod < 1.0) & ~on_circle
        outer = (mod > 1.0) & ~on_circle
        if on_circle.any():
            f1 = self.base.fix_variable(1 - axis, frozen)
            out[on_circle] = f1.eval_many(flat[on_circle])
        if inner.any():
            cf = self.factorization(axis, frozen, outer=False)
            out[inner] = cf.extend(flat[inner])
        if outer.any():
            cf = self.factorization(axis, frozen, outer=True)
            out[outer] = cf.extend(1.0 / flat[outer])
        return out.reshape(pts.shape + (self.base.size, self.base.size))

    def value(self, z, w):
        """Continuation value at a single point (z, w) of the glued space."""
        z, w = complex(z), complex(w)
        z_off = abs(abs(z) - 1.0) > 1e-12
        w_off = abs(abs(w) - 1.0) > 1e-12
        if z_off and w_off:
            raise ValueError(
                "point lies outside the glued space: both variables off the circle"
            )
        if z_off:
            return self.disk_values(0, w, np.array([z]))[0]
        if w_off:
            return self.disk_values(1, z, np.array([w]))[0]
        return self.base.eval((z, w))


def extend_bulk(H: LaurentMatrix, gap: "GapReport", cfg=DEFAULTS) -> ExtendedSymbol:
    """Checked construction of the continuation: requires a passing gap report."""
    if not gap.passed:
        raise NonCanonical("gap certification did not pass; no continuation")
    return ExtendedSymbol(H, cfg)


# ---------------------------------------------------------------------------
# half-plane gap certification
# ---------------------------------------------------------------------------


@dataclass
class GapEdgeEntry:
    label: int
    invertible: bool
    min_singular: float
    section_sizes: list
    frozen_samples: int
    worst_momentum: complex = 0j
    worst_theta: float | None = None

    def to_dict(self):
        out = {
            "label": self.label,
            "invertible": bool(self.invertible),
            "min_singular": float(self.min_singular),
            "section_sizes": list(self.section_sizes),
            "frozen_samples": int(self.frozen_samples),
            "worst_momentum": [self.worst_momentum.real, self.worst_momentum.imag],
        }
        if self.worst_theta is not None:
            out["worst_theta"] = float(self.worst_theta)
        return out


@dataclass
class GapReport:
    entries: list
    passed: bool

    def entry(self, label):
        for e in self.entries:
            if e.label == label:
                return e
        raise KeyError(label)

    def to_dict(self):
        return {
            "passed": bool(self.passed),
            "entries": [e.to_dict() for e in self.entries],
        }


def _band_storage(f: LaurentMatrix, nsites):
    """LAPACK general-band storage of the half-line finite section."""
    n = f.size
    lo, hi = f.exponent_range(0)
    kl = max(hi, 0) * n + n - 1
    ku = max(-lo, 0) * n + n - 1
    dim = nsites * n
    ab = np.zeros((2 * kl + ku + 1, dim), dtype=complex, order="F")
    for (k,), a in f.terms.items():
        if abs(k) >= nsites:
            continue
        j0 = max(-k, 0)
        cnt = nsites - abs(k)
        for bi in range(n):
            for bj in range(n):
                row = kl + ku + k * n + bi - bj
                start = j0 * n + bj
                ab[row, start: start + cnt * n: n] = a[bi, bj]
    return ab, kl, ku, dim


def _section_sigma_min(f: LaurentMatrix, nsites, iters=60, rtol=1e-3, v0=None):
    """Smallest singular value of the half-line section via inverse power
    iteration on the banded LU factorization.

    Returns ``(sigma, v)``; reusing ``v`` as ``v0`` for a nearby symbol cuts
    the iteration count sharply (used by parameter sweeps).
    """
    ab, kl, ku, dim = _band_storage(f, nsites)
    lu, ipiv, info = zgbtrf(ab, kl, ku)
    if info > 0:
        return 0.0, None
    if info < 0:
        raise ValueError(f"zgbtrf failed with info={info}")
    if v0 is not None and v0.shape == (dim,):
        v = v0
    else:
        rng = np.random.default_rng(12345)
        v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        v /= np.linalg.norm(v)
    sigma_prev = np.inf
    sigma = np.inf
    for _ in range(iters):
        x, info = zgbtrs(lu, kl, ku, v, ipiv, trans=2)
        y, info = zgbtrs(lu, kl, ku, x, ipiv, trans=0)
        lam = np.linalg.norm(y)
        if not np.isfinite(lam) or lam == 0.0:
            return 0.0, None
        v = y / lam
        sigma = 1.0 / np.sqrt(lam)
        if abs(sigma - sigma_prev) <= rtol * sigma:
            break
        sigma_prev = sigma
    return float(sigma), v


def _frozen_symbol(symbol2, axis, flip, momentum):
    f = symbol2.fix_variable(1 - axis, momentum)
    if flip:
        f = f.flip_variable(0)
    return f


def _edge_geometry(edge):
    # edge 1: x >= 0, 2: y >= 0, 3: x <= 0, 4: y <= 0
    if edge not in (1, 2, 3, 4):
        raise ValueError(f"edge label must be 1..4, got {edge}")
    axis = 0 if edge in (1, 3) else 1
    flip = edge in (3, 4)
    return axis, flip


def _edge_grid_values(symbol2, axis, flip, momenta, cfg):
    """Symbol values on (momentum x winding-grid), shape (nm, grid, N, N).

    Powers are taken on the two one-dimensional axes only, which keeps the
    cost at one complex multiply-add per term and grid point.
    """
    grid = cfg.winding_grid
    zs = np.exp(2j * np.pi * np.arange(grid) / grid)
    if flip:
        zs = np.conj(zs)
    nm = len(momenta)
    n = symbol2.size
    vals = np.zeros((nm, grid, n, n), dtype=complex)
    for exp, mat in symbol2.terms.items():
        krun, kfrz = exp[axis], exp[1 - axis]
        factor = np.multiply.outer(momenta ** kfrz, zs ** krun)
        vals += factor[:, :, None, None] * mat
    return vals


def _windings_for_momenta(symbol2, axis, flip, momenta, cfg, vals=None):
    """Determinant windings of the frozen one-variable symbols, vectorized."""
    if vals is None:
        vals = _edge_grid_values(symbol2, axis, flip, momenta, cfg)
    dets = np.linalg.det(vals)
    small = np.abs(dets).min()
    if small <= cfg.winding_det_floor:
        raise SingularOnCircle(
            f"|det| dips to {small:.3e} during gap certification"
        )
    nm = len(momenta)
    out = np.empty(nm, dtype=int)
    for i in range(nm):
        k = _winding_from_dets(dets[i], cfg.winding_round_guard)
        if k is None:
            # refine this single momentum on a doubled grid
            f = _frozen_symbol(symbol2, axis, flip, momenta[i])
            out[i] = winding_det(f, cfg)
        else:
            out[i] = k
    return out


def _certify_momentum(f, cfg, warm=None, warm_key=None):
    """(status, sigma): status True/False for decided, None for undecided."""
    if len(f.terms) == 1 and (0,) in f.terms:
        # constant symbol: the section is block diagonal, sigma is exact
        sig = float(np.linalg.svd(f.terms[(0,)], compute_uv=False)[-1])
        return (sig > cfg.gap_floor), sig
    sizes = cfg.gap_sections
    sigmas = []
    for size in sizes:
        v0 = warm.get((warm_key, size)) if warm is not None else None
        sig, vec = _section_sigma_min(f, size, v0=v0)
        if warm is not None and vec is not None:
            warm[(warm_key, size)] = vec
        sigmas.append(sig)
    s_mid, s_big = sigmas[-2], sigmas[-1]
    sigma = min(s_mid, s_big)
    if s_big <= cfg.gap_floor:
        return False, sigma
    stable = abs(s_mid - s_big) <= cfg.gap_band * s_big
    if stable and s_big > cfg.gap_floor:
        return True, sigma
    return None, sigma


def half_plane_gap(symbol2: LaurentMatrix, edge, cfg=DEFAULTS, theta=None,
                   _vals=None, _warm=None):
    """Certify invertibility of one half-plane compression of a 2D symbol.

    For each frozen transverse momentum the one-variable symbol must have
    determinant winding zero and a stabilized smallest singular value of its
    finite sections above the floor.  An undecided stabilization raises
    :class:`Undecided`; it is never silently passed.
    """
    axis, flip = _edge_geometry(edge)
    if set(symbol2.terms) <= {(0, 0)}:
        # constant symbol: exact smallest singular value, winding zero
        sig = float(
            np.linalg.svd(symbol2.coeff((0, 0)), compute_uv=False)[-1]
        )
        return GapEdgeEntry(
            label=edge,
            invertible=sig > cfg.gap_floor,
            min_singular=sig,
            section_sizes=list(cfg.gap_sections),
            frozen_samples=cfg.gap_momenta,
            worst_momentum=1.0 + 0j,
            worst_theta=theta,
        )
    momenta = np.exp(2j * np.pi * np.arange(cfg.gap_momenta) / cfg.gap_momenta)
    windings = _windings_for_momenta(symbol2, axis, flip, momenta, cfg, vals=_vals)
    min_sigma = np.inf
    worst = momenta[0]
    invertible = True
    for i, mom in enumerate(momenta):
        if windings[i] != 0:
            return GapEdgeEntry(
                label=edge,
                invertible=False,
                min_singular=0.0,
                section_sizes=list(cfg.gap_sections),
                frozen_samples=len(momenta),
                worst_momentum=complex(mom),
                worst_theta=theta,
            )
        f = _frozen_symbol(symbol2, axis, flip, mom)
        status, sigma = _certify_momentum(f, cfg, warm=_warm, warm_key=i)
        if status is None:
            raise Undecided(
                f"edge {edge}: finite sections did not stabilize at momentum "
                f"{mom:.6f} (sigma ~ {sigma:.3e})"
            )
        if sigma < min_sigma:
            min_sigma = sigma
            worst = mom
        if not status:
            invertible = False
    return GapEdgeEntry(
        label=edge,
        invertible=invertible,
        min_singular=float(min_sigma),
        section_sizes=list(cfg.gap_sections),
        frozen_samples=len(momenta),
        worst_momentum=complex(worst),
        worst_theta=theta,
    )


def _surface_gap_3d(family: Family3D, edge, cfg):
    """Surface check across the hinge momentum circle, refined near the min.

    For mapping-torus families the grid values of the theta slice are an
    exact linear combination of two precomputed grids, and warm-started
    iteration vectors carry over between neighboring theta samples.
    """
    axis, flip = _edge_geometry(edge)
    momenta = np.exp(2j * np.pi * np.arange(cfg.gap_momenta) / cfg.gap_momenta)
    base_vals = None
    chi = None
    if family.kind == "suspension":
        base_vals = _edge_grid_values(family.base, axis, flip, momenta, cfg)
        chi = family.chiral

    def slice_vals(th):
        if base_vals is None:
            return None
        th = np.mod(th + np.pi, 2 * np.pi) - np.pi
        if abs(th) <= np.pi / 2:
            return np.cos(th) * base_vals - np.sin(th) * chi
        return None  # constant branch takes the shortcut inside half_plane_gap

    warm = {}
    nth = cfg.gap_theta_samples
    thetas = 2 * np.pi * np.arange(nth) / nth
    best = None
    for th in thetas:
        e = half_plane_gap(
            family.slice(th), edge, cfg, theta=float(th),
            _vals=slice_vals(th), _warm=warm,
        )
        if not e.invertible:
            return e
        if best is None or e.min_singular < best.min_singular:
            best = e
    # refine once around the weakest theta with doubled local resolution
    th0 = best.worst_theta
    step = 2 * np.pi / nth
    for th in (th0 - step / 2, th0 + step / 2):
        th = float(np.mod(th, 2 * np.pi))
        e = half_plane_gap(
            family.slice(th), edge, cfg, theta=th,
            _vals=slice_vals(th), _warm=warm,
        )
        if not e.invertible:
            return e
        if e.min_singular < best.min_singular:
            best = e
    samples = (nth + 2) * cfg.gap_momenta
    return GapEdgeEntry(
        label=edge,
        invertible=True,
        min_singular=best.min_singular,
        section_sizes=list(cfg.gap_sections),
        frozen_samples=samples,
        worst_momentum=best.worst_momentum,
        worst_theta=best.worst_theta,
    )


def assumption_check(model, cfg=DEFAULTS) -> GapReport:
    """All-edges (2D symbol) or all-surfaces (3D family) gap certification."""
    entries = []
    if isinstance(model, Family3D):
        for edge in (1, 2, 3, 4):
            entries.append(_surface_gap_3d(model, edge, cfg))
    elif isinstance(model, LaurentMatrix) and model.nvars == 2:
        for edge in (1, 2, 3, 4):
            entries.append(half_plane_gap(model, edge, cfg))
    else:
        raise ValueError("assumption_check needs a 2-variable symbol or a 3D family")
    return GapReport(entries=entries, passed=all(e.invertible for e in entries))
