import numpy as np
import pytest

from qpindex import models
from qpindex.boundary import (
    CORNER_SPHERES,
    CORNERS,
    BoundaryInvariants,
    corner_index,
    corner_indices,
    spectral_flow,
    spectral_flows,
    theorem_check,
    truncate,
    winding3,
    winding_oracle,
    _solve_pqr,
)
from qpindex.config import DEFAULTS
from qpindex.errors import GapViolation, RangeTooLarge
from qpindex.laurent import Family3D, LaurentMatrix, SymmetryData, suspend


# -- truncation -----------------------------------------------------------------


def test_truncate_constant_is_block_identity(eps_model):
    eps, _ = eps_model
    trunc = truncate(eps, "a", 4)
    dense = trunc.matrix.toarray()
    expected = np.kron(np.eye(16), eps.coeff((0, 0)))
    assert np.allclose(dense, expected)


def test_truncate_shift_symbol_is_nilpotent():
    m = LaurentMatrix(1, 2, {(1, 0): [[1.0]]})
    trunc = truncate(m, "a", 3)
    dense = trunc.matrix.toarray()
    assert dense.sum() == 6  # two interior x-links per row strip
    assert np.abs(np.linalg.matrix_power(dense, 3)).max() == 0


def test_truncate_corner_flips_transpose():
    m = LaurentMatrix(1, 2, {(1, 0): [[1.0]]})
    a = truncate(m, "a", 4).matrix.toarray()
    b = truncate(m, "b", 4).matrix.toarray()
    assert np.allclose(b, truncate(m.flip_variable(0), "a", 4).matrix.toarray())
    assert not np.allclose(a, b)


def test_truncate_hermitian_and_banded(paper2d):
    H, _ = paper2d
    trunc = truncate(H, "a", 24)
    dense = trunc.matrix
    assert abs(dense - dense.conj().T).max() < 1e-12
    coo = dense.tocoo()
    bandwidth = np.abs(coo.row - coo.col).max()
    assert bandwidth <= 6 * (24 + 1)


def test_truncate_range_guard():
    m = LaurentMatrix(1, 2, {(3, 0): [[1.0]], (-3, 0): [[1.0]]})
    with pytest.raises(RangeTooLarge):
        truncate(m, "a", 8)


def test_site_index_map(paper2d):
    H, _ = paper2d
    trunc = truncate(H, "a", 8)
    assert trunc.site_index(0, 0) == 0
    assert trunc.site_index(1, 0) == 8 * 6
    assert trunc.site_index(0, 1) == 6


# -- corner indices ----------------------------------------------------------------


def test_corner_indices_constant_reference(eps_model):
    eps, sym = eps_model
    values, _ = corner_indices(eps, sym, L=12)
    assert values == {"a": 0, "b": 0, "c": 0, "d": 0}


def test_corner_indices_of_corner_model(corner_values):
    values, diags = corner_values
    assert values == {"a": -1, "b": 0, "c": 1, "d": 0}
    assert (values["a"] + values["b"]) % 2 == 1
    assert values["a"] == -values["c"]
    assert values["b"] == -values["d"]
    assert sum(values.values()) == 0
    energies = diags["first"]["mode_energies"]
    assert len(energies) == 2
    assert max(abs(e) for e in energies) < 1e-10


def test_corner_index_single_label(paper2d, gap2d):
    H, sym = paper2d
    value, _ = corner_index(H, sym, "c", L=16, gap=gap2d)
    assert value == 1


def test_corner_pqr_reconstruction(corner_values):
    values, _ = corner_values
    p, q, r = _solve_pqr(values)
    assert (p + q, -q + r, -r, -p) == (
        values["a"], values["b"], values["c"], values["d"]
    )


def test_corner_indices_require_gap():
    # symbol with a winding edge: no certification, no index
    bad = LaurentMatrix(1, 2, {(1, 0): [[1.0]], (0, 1): [[0.1]], (0, -1): [[0.1]]})
    sym = SymmetryData(np.eye(1))
    with pytest.raises(GapViolation):
        corner_indices(bad, SymmetryData(np.eye(1), None), L=8)


def test_corner_indices_need_chiral(paper2d, gap2d):
    H, sym = paper2d
    with pytest.raises(GapViolation):
        corner_indices(H, SymmetryData(sym.inversion), L=8, gap=gap2d)


# -- spectral flow ------------------------------------------------------------------


def test_spectral_flow_theta_independent_family(eps_model):
    eps, sym = eps_model
    terms3 = {k + (0,): v for k, v in eps.terms.items()}
    fam = Family3D("laurent3", LaurentMatrix(6, 3, terms3))
    counts, diags = spectral_flows(
        fam, sym, L=8, theta_samples=16,
        cfg=DEFAULTS.replace(gap_theta_samples=8),
    )
    assert counts == {"a": 0, "b": 0, "c": 0, "d": 0}
    assert diags["crossings"] == []


def test_spectral_flow_of_suspension(flows12):
    counts, diags = flows12
    assert counts == {"a": 1, "b": 0, "c": -1, "d": 0}
    assert (counts["a"] + counts["b"]) % 2 == 1
    assert counts["a"] == -counts["c"]
    assert counts["b"] == -counts["d"]
    assert sum(counts.values()) == 0


def test_spectral_flow_reversed_family(paper2d, gap3d):
    # the reversed family has the same surface certification (its slices are
    # the forward slices at negated theta, and the theta grid is symmetric)
    H, sym = paper2d
    reversed_fam = Family3D(
        "suspension", H, epsilon=sym.inversion, chiral=-sym.chiral
    )
    counts, _ = spectral_flows(reversed_fam, sym, L=12, theta_samples=64,
                               gap=gap3d)
    assert counts == {"a": -1, "b": 0, "c": 1, "d": 0}


def test_spectral_flow_single_hinge(paper3d, gap3d):
    fam, sym = paper3d
    value, _ = spectral_flow(fam, sym, "a", L=12, theta_samples=64, gap=gap3d)
    assert value == 1


def test_suspension_flow_negates_corner_count(flows12, corner_values):
    # mapping-torus flows reproduce the negated corner counts of the base
    counts, _ = flows12
    values, _ = corner_values
    assert counts == {lab: -values[lab] for lab in CORNERS}


# -- glued-sphere winding -------------------------------------------------------------


def test_winding3_constant_map():
    const = lambda z, w: np.broadcast_to(
        np.eye(2), np.broadcast_shapes(np.shape(z), np.shape(w)) + (2, 2)
    ).copy()
    raw, rounded = winding3(const, (1, 1))
    assert rounded == 0
    assert abs(raw) < 1e-12


def test_winding3_reference_degree_one():
    raw, rounded = winding3(models.degree_one_reference, (1, 1))
    assert rounded == 1
    assert abs(raw - 1) < 0.05


def test_winding3_additivity():
    ref = models.degree_one_reference

    def prod(z, w):
        return ref(z, w) @ ref(z, w)

    raw1, _ = winding3(ref, (1, 1))
    raw2, rounded2 = winding3(prod, (1, 1))
    assert rounded2 == 2
    assert abs(raw2 - 2 * raw1) < 0.1


def test_winding3_conjugated_map_same_degree():
    rng = np.random.default_rng(9)
    mat = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    conj = np.linalg.inv(mat)

    def dressed(z, w):
        return mat @ models.degree_one_reference(z, w) @ conj

    _, rounded = winding3(dressed, (1, 1))
    assert rounded == 1


def test_winding_oracle_matches_corner_counts(paper2d, corner_values):
    H, sym = paper2d
    values, _ = corner_values
    cfg = DEFAULTS.replace(winding3_disk=16, winding3_circle=32)
    result = winding_oracle(H, sym, values, cfg)
    assert result["consistent"]
    assert result["global_sign"] in (-1, 1)
    for lab in CORNERS:
        assert abs(result["windings"][lab]["rounded"]) == abs(values[lab])


# -- correspondence -------------------------------------------------------------------


def test_theorem_check_2d(paper2d):
    H, sym = paper2d
    report = theorem_check(H, sym)
    assert report.passed
    assert report.dimension == 2
    assert report.theorem["lhs_half_mu"] == 1
    assert report.theorem["rhs_boundary_mod2"] == 1
    assert all(report.identities.values())


def test_theorem_check_trivial(eps_model):
    eps, sym = eps_model
    report = theorem_check(eps, sym, L=12)
    assert report.passed
    assert report.indicator.mu == 0
    assert set(report.boundary.values.values()) == {0}
    assert report.boundary.pqr == (0, 0, 0)


def test_theorem_check_3d(paper3d):
    fam, sym = paper3d
    cfg = DEFAULTS.replace(gap_theta_samples=16, gap_momenta=32)
    report = theorem_check(fam, sym, cfg=cfg, L=12, theta_samples=64)
    assert report.passed
    assert report.dimension == 3
    assert report.boundary.method == "spectral_flow"
    assert (report.boundary.values["a"] + report.boundary.values["b"]) % 2 == 1


def test_boundary_invariants_serialization(corner_values):
    values, _ = corner_values
    inv = BoundaryInvariants(values=values, pqr=_solve_pqr(values),
                             method="truncation")
    d = inv.to_dict()
    assert d["values"]["a"] == -1
    assert d["pqr"] == [0, -1, -1]
