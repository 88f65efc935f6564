"""Built-in model zoo.

The centerpiece is a 3-band two-dimensional chiral model with inversion
symmetry exchanging the two sublattice blocks, known to carry a nontrivial
half-indicator, plus its one-parameter gapped deformation and its
mapping-torus suspension to three dimensions.  Closed-form one-sided factors
of the 3x3 block are included: they provide an independent reference for the
factorization and extension machinery.
"""

from __future__ import annotations

import numpy as np

from .laurent import Family3D, LaurentMatrix, SymmetryData, suspend

__all__ = [
    "block_model",
    "block_model_deformed",
    "chiral_hamiltonian",
    "paper_2d",
    "paper_2d_r",
    "paper_3d",
    "trivial_eps",
    "random_chiral_inversion_model",
    "degree_one_reference",
    "xfactor_minus",
    "xfactor_plus",
    "yfactor_minus",
    "yfactor_plus",
]


def block_model(r=0.0) -> LaurentMatrix:
    """3x3 off-diagonal block h_r(z, w); r=0 is the base model.

    All coefficient matrices are Hermitian, which makes the doubled
    Hamiltonian inversion-symmetric under the block swap.
    """
    r = float(r)
    a = (1.0 + r) / 2.0
    terms = {
        (1, 1): np.array([[1, 0, 0], [0, 0, 0], [0, 0, 0]], dtype=complex),
        (0, 1): np.array([[1, 0, 0], [0, 0, 0], [0, 0, 0]], dtype=complex),
        (1, 0): np.array([[0, 1, 0], [1, 0, 0], [0, 0, 0]], dtype=complex),
        (0, 0): np.array(
            [[0, -a, 0], [-a, r, 1], [0, 1, 0]], dtype=complex
        ),
        (1, -1): np.array([[0, 0, 0], [0, 1, 0], [0, 0, 0]], dtype=complex),
        (0, -1): np.array([[0, 0, 0], [0, a, 0], [0, 0, 0]], dtype=complex),
        (-1, 0): np.array([[0, 0, 0], [0, 0, 0], [0, 0, 1]], dtype=complex),
    }
    return LaurentMatrix(3, 2, terms)


def block_model_deformed() -> LaurentMatrix:
    """Endpoint r=1 of the deformation; its fixed-point spectra are simple."""
    return block_model(1.0)


def chiral_hamiltonian(block: LaurentMatrix) -> LaurentMatrix:
    """Double a block h into H = [[0, h*], [h, 0]]."""
    n = block.size
    terms = {}
    for exp, mat in block.terms.items():
        lower = terms.setdefault(exp, np.zeros((2 * n, 2 * n), dtype=complex))
        lower[n:, :n] += mat
        neg = tuple(-e for e in exp)
        upper = terms.setdefault(neg, np.zeros((2 * n, 2 * n), dtype=complex))
        upper[:n, n:] += mat.conj().T
    return LaurentMatrix(2 * n, block.nvars, terms)


def chiral_symmetry(n: int) -> SymmetryData:
    """Pi = diag(1_n, -1_n), I = offdiag(1_n, 1_n)."""
    one = np.eye(n)
    zero = np.zeros((n, n))
    inversion = np.block([[zero, one], [one, zero]])
    chiral = np.block([[one, zero], [zero, -one]])
    return SymmetryData(inversion, chiral)


def paper_2d(r=0.0):
    """The 6x6 two-dimensional model with its symmetry data."""
    H = chiral_hamiltonian(block_model(r))
    return H, chiral_symmetry(3)


def paper_2d_r():
    """Affine deformation data (base, delta) with H(r) = base + r * delta."""
    H0, sym = paper_2d(0.0)
    H1, _ = paper_2d(1.0)
    return H0, H1 - H0, sym


def paper_3d():
    """Suspension of the 2D model over the constant epsilon = I."""
    H, sym = paper_2d()
    family = suspend(H, sym, sym.inversion)
    return family, sym


def trivial_eps():
    """Constant gapped reference model epsilon = I with the same symmetries."""
    sym = chiral_symmetry(3)
    return LaurentMatrix.constant(sym.inversion, 2), sym


# -- closed-form one-sided factors of the block ------------------------------
#
# h(z, w) = xfactor_minus(z, w) @ xfactor_plus(z, w) for every w on the circle
# (factorization in z), and likewise yfactor_* for the factorization in w.
# alpha uses the principal square root; the radicand never crosses the
# negative real axis for |w| = 1, so the factors are continuous in w.


def _alpha(w):
    return np.sqrt(25.0 - 16.0 * w + 4.0 * w * w)


def xfactor_minus(z, w):
    z, w = complex(z), complex(w)
    al = _alpha(w)
    return np.array(
        [
            [1, 0, 0],
            [0, 1, 0],
            [
                (-1 + 2 * w + al) / (6 * z * w),
                1 / z,
                1 + (-5 + 2 * w + al) / (4 * z * w),
            ],
        ],
        dtype=complex,
    )


def xfactor_plus(z, w):
    z, w = complex(z), complex(w)
    al = _alpha(w)
    return np.array(
        [
            [(1 + z) * w, -0.5 + z, 0],
            [-0.5 + z, (1 + 2 * z) / (2 * w), 1],
            [(-5 - 2 * w - al) / 6, (-5 + 4 * w - al) / (6 * w), 0],
        ],
        dtype=complex,
    )


def yfactor_minus(z, w):
    z, w = complex(z), complex(w)
    return np.array(
        [
            [1, 0, 0],
            [(1 + 2 * z) / ((-1 + 2 * z) * w), 1, 0],
            [0, 0, 1],
        ],
        dtype=complex,
    )


def yfactor_plus(z, w):
    z, w = complex(z), complex(w)
    return np.array(
        [
            [(1 + z) * w, -0.5 + z, 0],
            [(1 + 10 * z) / (2 - 4 * z), 0, 1],
            [0, 1, 1 / z],
        ],
        dtype=complex,
    )


# -- randomized property-suite models ----------------------------------------


def random_chiral_inversion_model(seed, size=6, margin=0.35):
    """Seeded random gapped model with chiral and inversion symmetry.

    Draws a block with Hermitian coefficient matrices (which enforces the
    inversion relation for the doubled Hamiltonian), then rescales the
    off-constant part until the block stays invertible on a torus grid with
    the requested relative margin.

    Returns ``(H, sym)`` with ``H`` of dimension ``size`` (4 or 6).
    """
    if size % 2 != 0:
        raise ValueError("size must be even")
    n = size // 2
    rng = np.random.default_rng(seed)

    def herm(scale=1.0):
        m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        return scale * (m + m.conj().T) / 2.0

    base = herm(1.0) + np.diag(2.0 + rng.uniform(0.0, 1.0, size=n))
    exps = [(1, 0), (0, 1), (1, 1), (1, -1), (-1, 1), (2, 0), (0, 2)]
    picks = rng.choice(len(exps), size=3, replace=False)
    hop = {(0, 0): base}
    for idx in picks:
        hop[exps[idx]] = herm(rng.uniform(0.2, 0.6))

    block = LaurentMatrix(n, 2, hop)
    # shrink hoppings until the block clears the gap margin on a grid
    grid = np.exp(2j * np.pi * np.arange(24) / 24)
    pts = np.array([(z, w) for z in grid for w in grid])
    smin_base = np.linalg.svd(base, compute_uv=False)[-1]
    for _ in range(40):
        vals = block.eval_many(pts)
        smin = np.linalg.svd(vals, compute_uv=False)[:, -1].min()
        if smin > margin * smin_base:
            break
        shrunk = {k: (v if k == (0, 0) else 0.7 * np.asarray(v))
                  for k, v in block.terms.items()}
        block = LaurentMatrix(n, 2, shrunk)
    H = chiral_hamiltonian(block)
    return H, chiral_symmetry(n)


# -- reference map for the glued-sphere winding oracle ------------------------


def degree_one_reference(z, w):
    """Degree-one map on the glued three-sphere with both plus disks.

    Radially projects a point of the bidisk boundary onto the unit sphere of
    C^2 and applies the standard identification with 2x2 special unitaries.
    Accepts scalars or broadcasting arrays; returns shape (..., 2, 2).
    """
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    z, w = np.broadcast_arrays(z, w)
    norm = np.sqrt(np.abs(z) ** 2 + np.abs(w) ** 2)
    u = z / norm
    v = w / norm
    out = np.empty(z.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = u
    out[..., 0, 1] = -np.conj(v)
    out[..., 1, 0] = v
    out[..., 1, 1] = np.conj(u)
    return out
