"""Matrix-valued Laurent polynomials on the torus.

A translation-invariant lattice Hamiltonian with finitely many hopping terms
is, in momentum space, a matrix Laurent polynomial: a finite sum
``sum_k A_k z^k`` over integer exponent vectors ``k``.  This module provides
the exact coefficient-level representation, evaluation, the symmetry checks
(Hermiticity on the torus, inversion, chiral), and the one-parameter families
used for three-dimensional models.

All objects are immutable after construction; every operation returns a new
value, so concurrent evaluation needs no locking.
"""

from __future__ import annotations

import numpy as np

from .config import DEFAULTS
from .errors import MissingChiral, SymmetryError

__all__ = [
    "LaurentMatrix",
    "SymmetryData",
    "Family3D",
    "check_hermitian_on_torus",
    "check_inversion",
    "check_chiral",
    "fix_variable",
    "flip_variable",
    "suspend",
]


def _as_coeff(matrix, size):
    arr = np.asarray(matrix, dtype=complex)
    if arr.shape != (size, size):
        raise ValueError(f"coefficient shape {arr.shape} != ({size}, {size})")
    return arr


class LaurentMatrix:
    """Finite sum ``sum_k A_k z^k`` with N x N complex coefficients.

    Parameters
    ----------
    size : int
        Matrix dimension N.
    nvars : int
        Number of torus variables (1, 2 or 3).
    terms : dict
        Map from integer exponent tuples of length ``nvars`` to array-like
        N x N coefficients.  Coefficients with norm below the drop tolerance
        are removed, so the stored form is normalized.
    """

    __slots__ = ("size", "nvars", "terms")

    def __init__(self, size, nvars, terms, drop_tol=DEFAULTS.term_drop_tol):
        if nvars not in (1, 2, 3):
            raise ValueError("nvars must be 1, 2 or 3")
        if size < 1:
            raise ValueError("size must be positive")
        clean = {}
        for exp, mat in terms.items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != nvars:
                raise ValueError(f"exponent {exp} has length != nvars={nvars}")
            arr = _as_coeff(mat, size)
            if np.linalg.norm(arr) < drop_tol:
                continue
            arr = arr.copy()
            arr.flags.writeable = False
            clean[exp] = arr
        self.size = size
        self.nvars = nvars
        self.terms = clean

    # -- constructors ------------------------------------------------------

    @classmethod
    def constant(cls, matrix, nvars):
        matrix = np.asarray(matrix, dtype=complex)
        return cls(matrix.shape[0], nvars, {(0,) * nvars: matrix})

    @classmethod
    def zero(cls, size, nvars):
        return cls(size, nvars, {})

    # -- bookkeeping -------------------------------------------------------

    def coeff(self, exp):
        exp = tuple(int(e) for e in exp)
        mat = self.terms.get(exp)
        if mat is None:
            return np.zeros((self.size, self.size), dtype=complex)
        return mat

    def exponent_range(self, var):
        """(lowest, highest) exponent of variable ``var`` over all terms."""
        if not self.terms:
            return (0, 0)
        exps = [k[var] for k in self.terms]
        return (min(exps), max(exps))

    def items(self):
        return sorted(self.terms.items())

    def norm(self):
        if not self.terms:
            return 0.0
        return max(np.linalg.norm(a) for a in self.terms.values())

    def __repr__(self):
        return (f"LaurentMatrix(size={self.size}, nvars={self.nvars}, "
                f"nterms={len(self.terms)})")

    # -- algebra -----------------------------------------------------------

    def __add__(self, other):
        self._check_compatible(other)
        out = {k: np.array(v) for k, v in self.terms.items()}
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return LaurentMatrix(self.size, self.nvars, out)

    def __sub__(self, other):
        return self + other.scale(-1.0)

    def scale(self, c):
        return LaurentMatrix(
            self.size, self.nvars, {k: c * v for k, v in self.terms.items()}
        )

    def add_constant(self, matrix):
        return self + LaurentMatrix.constant(matrix, self.nvars)

    def __matmul__(self, other):
        """Symbol product, implemented by coefficient convolution."""
        self._check_compatible(other)
        out = {}
        for ka, a in self.terms.items():
            for kb, b in other.terms.items():
                k = tuple(x + y for x, y in zip(ka, kb))
                out[k] = out.get(k, 0) + a @ b
        return LaurentMatrix(self.size, self.nvars, out)

    def conjugate_transpose(self):
        """Symbol z -> f(z)^* on the torus: coefficients A_k -> A_{-k}^H."""
        return LaurentMatrix(
            self.size,
            self.nvars,
            {tuple(-e for e in k): v.conj().T for k, v in self.terms.items()},
        )

    def direct_sum(self, other):
        if self.nvars != other.nvars:
            raise ValueError("direct_sum requires matching nvars")
        n1, n2 = self.size, other.size
        out = {}
        for k, v in self.terms.items():
            blk = np.zeros((n1 + n2, n1 + n2), dtype=complex)
            blk[:n1, :n1] = v
            out[k] = blk
        for k, v in other.terms.items():
            blk = out.get(k)
            if blk is None:
                blk = np.zeros((n1 + n2, n1 + n2), dtype=complex)
                out[k] = blk
            else:
                out[k] = blk = np.array(blk)
            blk[n1:, n1:] += v
        return LaurentMatrix(n1 + n2, self.nvars, out)

    def _check_compatible(self, other):
        if self.size != other.size or self.nvars != other.nvars:
            raise ValueError("incompatible symbol dimensions")

    # -- evaluation --------------------------------------------------------

    def eval(self, point):
        """Value ``sum_k A_k point^k`` at one point of the torus.

        Unit modulus is the intended domain; off-circle values are accepted
        because the half-plane machinery evaluates flipped symbols at
        reciprocal points.
        """
        point = tuple(point) if np.iterable(point) else (point,)
        if len(point) != self.nvars:
            raise ValueError(f"point length {len(point)} != nvars={self.nvars}")
        acc = np.zeros((self.size, self.size), dtype=complex)
        for exp, mat in self.terms.items():
            factor = 1.0 + 0.0j
            for p, e in zip(point, exp):
                factor *= complex(p) ** e
            acc = acc + factor * mat
        return acc

    def eval_many(self, points):
        """Vectorized evaluation; ``points`` has shape (M, nvars)."""
        pts = np.asarray(points, dtype=complex)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.shape[1] != self.nvars:
            raise ValueError("points second axis must equal nvars")
        m = pts.shape[0]
        acc = np.zeros((m, self.size, self.size), dtype=complex)
        for exp, mat in self.terms.items():
            factor = np.ones(m, dtype=complex)
            for v, e in enumerate(exp):
                if e:
                    factor = factor * pts[:, v] ** e
            acc += factor[:, None, None] * mat
        return acc

    # -- variable surgery ----------------------------------------------------

    def fix_variable(self, var, value):
        """Substitute ``value`` for variable ``var`` and resum coefficients."""
        if not 0 <= var < self.nvars:
            raise IndexError(f"variable index {var} out of range")
        if self.nvars < 2:
            raise ValueError("fix_variable needs at least two variables")
        value = complex(value)
        out = {}
        for exp, mat in self.terms.items():
            rest = exp[:var] + exp[var + 1:]
            out[rest] = out.get(rest, 0) + (value ** exp[var]) * mat
        return LaurentMatrix(self.size, self.nvars - 1, out)

    def flip_variable(self, var):
        """Negate the exponent of variable ``var``: eval(flip, z) = eval(m, 1/z)."""
        if not 0 <= var < self.nvars:
            raise IndexError(f"variable index {var} out of range")
        out = {}
        for exp, mat in self.terms.items():
            new = list(exp)
            new[var] = -new[var]
            out[tuple(new)] = mat
        return LaurentMatrix(self.size, self.nvars, out)


class SymmetryData:
    """Inversion operator I and optional chiral operator Pi.

    Both must be Hermitian and unitary; when both are present they must
    anticommute.  Violations raise :class:`SymmetryError` at construction.
    """

    __slots__ = ("inversion", "chiral")

    def __init__(self, inversion, chiral=None, tol=DEFAULTS.coeff_tol):
        inv = np.asarray(inversion, dtype=complex)
        _require_hermitian_unitary(inv, "inversion operator", tol)
        self.inversion = inv
        if chiral is not None:
            chi = np.asarray(chiral, dtype=complex)
            _require_hermitian_unitary(chi, "chiral operator", tol)
            anti = np.linalg.norm(chi @ inv + inv @ chi)
            if anti > tol:
                raise SymmetryError(
                    f"chiral and inversion operators do not anticommute "
                    f"(defect {anti:.3e})"
                )
            self.chiral = chi
        else:
            self.chiral = None

    @property
    def size(self):
        return self.inversion.shape[0]


def _require_hermitian_unitary(mat, what, tol):
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise SymmetryError(f"{what} must be square")
    herm = np.linalg.norm(mat - mat.conj().T)
    if herm > tol:
        raise SymmetryError(f"{what} not Hermitian (defect {herm:.3e})")
    unit = np.linalg.norm(mat @ mat - np.eye(mat.shape[0]))
    if unit > tol:
        raise SymmetryError(f"{what} not an involution (defect {unit:.3e})")


# -- symmetry checks ---------------------------------------------------------


def check_hermitian_on_torus(m: LaurentMatrix, tol=DEFAULTS.coeff_tol):
    """Coefficient-level Hermiticity: A_{-k} = A_k^H for every term.

    Returns ``(ok, max_defect)``.
    """
    defect = 0.0
    seen = set(m.terms)
    for exp, mat in m.terms.items():
        neg = tuple(-e for e in exp)
        other = m.coeff(neg)
        defect = max(defect, float(np.linalg.norm(other - mat.conj().T)))
        seen.discard(exp)
    return defect <= tol, defect


def check_inversion(m: LaurentMatrix, s: SymmetryData, tol=DEFAULTS.coeff_tol):
    """Coefficient form of I H(z) I* = H(conj z): I A_k I* = A_{-k}."""
    inv = s.inversion
    defect = 0.0
    for exp, mat in m.terms.items():
        neg = tuple(-e for e in exp)
        defect = max(
            defect, float(np.linalg.norm(inv @ mat @ inv.conj().T - m.coeff(neg)))
        )
    return defect <= tol, defect


def check_chiral(m: LaurentMatrix, s: SymmetryData, tol=DEFAULTS.coeff_tol):
    """Coefficient form of Pi H Pi* = -H: Pi A_k Pi* = -A_k."""
    if s.chiral is None:
        raise MissingChiral("no chiral operator in symmetry data")
    chi = s.chiral
    defect = 0.0
    for mat in m.terms.values():
        defect = max(
            defect, float(np.linalg.norm(chi @ mat @ chi.conj().T + mat))
        )
    return defect <= tol, defect


def fix_variable(m: LaurentMatrix, var, value):
    return m.fix_variable(var, value)


def flip_variable(m: LaurentMatrix, var):
    return m.flip_variable(var)


# -- 3D families -------------------------------------------------------------


class Family3D:
    """Circle-parameterized family of two-variable symbols.

    ``kind == "laurent3"`` wraps an exact three-variable Laurent polynomial,
    sliced by substituting the third variable; ``kind == "suspension"`` is the
    piecewise mapping-torus construction from a chiral two-variable model and
    a constant reference: ``H cos(theta) - Pi sin(theta)`` on the half circle
    through theta = 0 and ``eps cos(theta) - Pi sin(theta)`` on the half
    circle through theta = pi.
    """

    __slots__ = ("kind", "size", "_base", "_epsilon", "_chiral")

    fixed_thetas = (0.0, np.pi)

    def __init__(self, kind, base, epsilon=None, chiral=None):
        if kind not in ("laurent3", "suspension"):
            raise ValueError(f"unknown family kind {kind!r}")
        self.kind = kind
        self._base = base
        self.size = base.size
        if kind == "laurent3":
            if base.nvars != 3:
                raise ValueError("laurent3 family needs a 3-variable symbol")
            self._epsilon = None
            self._chiral = None
        else:
            if base.nvars != 2:
                raise ValueError("suspension family needs a 2-variable symbol")
            if epsilon is None or chiral is None:
                raise ValueError("suspension family needs epsilon and chiral")
            self._epsilon = np.asarray(epsilon, dtype=complex)
            self._chiral = np.asarray(chiral, dtype=complex)

    @property
    def base(self):
        return self._base

    @property
    def epsilon(self):
        return self._epsilon

    @property
    def chiral(self):
        return self._chiral

    def slice(self, theta):
        """Two-variable symbol at hinge momentum angle ``theta``."""
        theta = float(theta)
        if self.kind == "laurent3":
            return self._base.fix_variable(2, np.exp(1j * theta))
        th = np.mod(theta + np.pi, 2 * np.pi) - np.pi  # (-pi, pi]
        c, s = np.cos(th), np.sin(th)
        if abs(th) <= np.pi / 2:
            return self._base.scale(c).add_constant(-s * self._chiral)
        const = c * self._epsilon - s * self._chiral
        return LaurentMatrix.constant(const, 2)


def suspend(H: LaurentMatrix, s: SymmetryData, epsilon) -> Family3D:
    """Mapping-torus family of a chiral two-variable model over a constant.

    Requires the chiral relation for both ``H`` and ``epsilon`` and an
    invertible constant ``epsilon``; slice(0) = H and slice(pi) = -epsilon.
    """
    if s.chiral is None:
        raise MissingChiral("suspension requires a chiral operator")
    ok, defect = check_chiral(H, s)
    if not ok:
        raise SymmetryError(f"base model violates chiral symmetry ({defect:.3e})")
    eps = np.asarray(epsilon, dtype=complex)
    chi = s.chiral
    anti = np.linalg.norm(chi @ eps @ chi.conj().T + eps)
    if anti > DEFAULTS.coeff_tol:
        raise SymmetryError(f"epsilon violates chiral symmetry ({anti:.3e})")
    if np.linalg.matrix_rank(eps) < eps.shape[0]:
        raise SymmetryError("epsilon must be invertible")
    return Family3D("suspension", H, epsilon=eps, chiral=chi)
