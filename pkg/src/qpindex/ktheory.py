"""Exact integer ledger behind the bulk-boundary correspondence.

Everything here is exact integer arithmetic: the representation-ring
elements a + b t with t^2 = 1, the restriction table of the twelve
three-torus generator classes to the eight inversion-fixed momenta, the
images of the thirteen glued-space generators under restriction to the
torus, and the arithmetic identities tying the indicator coefficient to the
four boundary integers.  The tables are data, not derivations; the
verification routine checks their internal consistency.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

__all__ = [
    "RElement",
    "KClassT3",
    "KClassXT",
    "T3_GENERATORS",
    "F3_TABLE",
    "f3",
    "mu3d_ledger",
    "psi_phi_image",
    "w3_map",
    "verify_ledger",
]


@dataclass(frozen=True)
class RElement:
    """Element a + b t of the rank-two ring Z[t]/(t^2 - 1)."""

    a: int = 0
    b: int = 0

    def __add__(self, other):
        return RElement(self.a + other.a, self.b + other.b)

    def __sub__(self, other):
        return RElement(self.a - other.a, self.b - other.b)

    def __mul__(self, other):
        if isinstance(other, int):
            return RElement(self.a * other, self.b * other)
        return RElement(
            self.a * other.a + self.b * other.b,
            self.a * other.b + self.b * other.a,
        )

    __rmul__ = __mul__

    def __neg__(self):
        return RElement(-self.a, -self.b)

    def __repr__(self):
        return f"{self.a}+{self.b}t"


ONE = RElement(1, 0)
T = RElement(0, 1)
ZERO = RElement(0, 0)


# Basis of the equivariant K-group of the three-torus (rank 12), in the
# fixed documented order.
T3_GENERATORS = (
    "C0", "C1", "H12", "H23", "H13",
    "C1H12", "C1H23", "C1H13",
    "L1", "L2", "L3", "H12L3",
)

# Fixed momenta, ordered (1,1,1), (-1,1,1), (1,-1,1), (-1,-1,1),
# (1,1,-1), (-1,1,-1), (1,-1,-1), (-1,-1,-1).
FIXED_POINTS_T3 = tuple(
    (i, j, k) for k in (1, -1) for j in (1, -1) for i in (1, -1)
)

_t, _1 = T, ONE

# Restriction values of each generator at the eight fixed momenta.
F3_TABLE = {
    "C0":    (_1, _1, _1, _1, _1, _1, _1, _1),
    "C1":    (_t, _t, _t, _t, _t, _t, _t, _t),
    "H12":   (_t, _1, _1, _1, _t, _1, _1, _1),
    "H23":   (_t, _t, _1, _1, _1, _1, _1, _1),
    "H13":   (_t, _1, _t, _1, _1, _1, _1, _1),
    "C1H12": (_1, _t, _t, _t, _1, _t, _t, _t),
    "C1H23": (_1, _1, _t, _t, _t, _t, _t, _t),
    "C1H13": (_1, _t, _1, _t, _t, _t, _t, _t),
    "L1":    (_t, _1, _t, _1, _t, _1, _t, _1),
    "L2":    (_t, _t, _1, _1, _t, _t, _1, _1),
    "L3":    (_t, _t, _t, _t, _1, _1, _1, _1),
    "H12L3": (_1, _t, _t, _t, _t, _1, _1, _1),
}


@dataclass(frozen=True)
class KClassT3:
    """Integer vector in the twelve-generator basis of the three-torus."""

    coeffs: tuple

    def __post_init__(self):
        if len(self.coeffs) != 12 or not all(
            isinstance(c, int) for c in self.coeffs
        ):
            raise ValueError("KClassT3 needs 12 integer coefficients")

    @classmethod
    def from_dict(cls, d):
        return cls(tuple(int(d.get(g, 0)) for g in T3_GENERATORS))

    def __add__(self, other):
        return KClassT3(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other):
        return KClassT3(tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __rmul__(self, k):
        return KClassT3(tuple(int(k) * c for c in self.coeffs))

    def __repr__(self):
        parts = [
            f"{c}*{g}" for c, g in zip(self.coeffs, T3_GENERATORS) if c
        ]
        return " + ".join(parts) if parts else "0"


UNIT_T3 = KClassT3.from_dict({"C0": 1})


@dataclass(frozen=True)
class KClassXT:
    """Integer vector in the thirteen-generator basis of the glued space."""

    coeffs: tuple

    def __post_init__(self):
        if len(self.coeffs) != 13 or not all(
            isinstance(c, int) for c in self.coeffs
        ):
            raise ValueError("KClassXT needs 13 integer coefficients")

    @classmethod
    def generator(cls, i):
        if not 1 <= i <= 13:
            raise ValueError("generator index runs from 1 to 13")
        return cls(tuple(1 if j == i - 1 else 0 for j in range(13)))


def f3(c: KClassT3):
    """Fixed-point restriction data of a class: eight ring elements."""
    out = [ZERO] * 8
    for coeff, gen in zip(c.coeffs, T3_GENERATORS):
        if coeff == 0:
            continue
        row = F3_TABLE[gen]
        out = [acc + coeff * val for acc, val in zip(out, row)]
    return tuple(out)


def mu3d_ledger(c: KClassT3) -> int:
    """Indicator of a class: minus the sum of odd multiplicities, mod 4."""
    return (-sum(r.b for r in f3(c))) % 4


# Images of the thirteen glued-space generators under restriction to the
# three-torus, expanded in the twelve-generator basis.  Shorthand used in
# the expansions: l_i = C0 - L_i and h_ij = C0 - H_ij.
_PSI_PHI = {
    1: {"C0": 1},
    2: {"C1": 1},
    3: {"C0": 1, "L1": -1},                                # l1
    4: {},                                                 # 0
    5: {"C0": 1, "L2": -1},                                # l2
    6: {},                                                 # 0
    7: {"C0": 1, "C1": -1, "H12": -1, "C1H12": 1},         # (1-t) h12
    8: {"C0": 1, "L3": -1},                                # l3
    9: {"C0": 1, "C1": -1, "H13": -1, "C1H13": 1},         # (1-t) h13
    10: {"C0": 1, "C1": -1, "H23": -1, "C1H23": 1},        # (1-t) h23
    11: {"C0": 1, "H12": -1, "L3": -1, "H12L3": 1},        # h12 l3
    12: {},                                                # 0
    13: {},                                                # 0
}


def psi_phi_image(i: int) -> KClassT3:
    """Restriction of the i-th glued-space generator to the three-torus."""
    if not 1 <= i <= 13:
        raise ValueError("generator index runs from 1 to 13")
    return KClassT3.from_dict(_PSI_PHI[i])


def w3_map(p, q, r):
    """The four sphere windings of the class with ball coordinates (p,q,r)."""
    return (p + q, -q + r, -r, -p)


def _fixed_point_product(table, name_a, name_b):
    """Componentwise ring product of the rows (1 - A)(1 - B)."""
    row_a = table[name_a]
    row_b = table[name_b]
    one_row = table["C0"]
    return tuple(
        (oa - a) * (ob - b)
        for oa, a, ob, b in zip(one_row, row_a, one_row, row_b)
    )


def _f3_in_table(c: KClassT3, table):
    out = [ZERO] * 8
    for coeff, gen in zip(c.coeffs, T3_GENERATORS):
        if coeff:
            out = [acc + coeff * val for acc, val in zip(out, table[gen])]
    return tuple(out)


def verify_ledger(table=None):
    """Internal consistency checks of the ledger data.

    Returns a dict of named boolean results:

    * ``products_agree``: the three pair products (1 - H_ij)(1 - L_k) with
      {i, j, k} = {1, 2, 3} restrict to the same fixed-point data, namely
      2(1 - t) at the all-ones momentum and zero elsewhere.
    * ``mu_even``: the indicator of every basis generator lies in {0, 2}.
    * ``images_mu``: the indicator of the restricted glued-space generators
      is 2 exactly for generator 11 and 0 for all others.
    * ``w3_arithmetic``: over the integer lattice [-3, 3]^5 constrained by
      a11 + 2*a12 = p + r, the four windings sum to zero and a11 agrees
      mod 2 with the sum of the first two windings.

    Passing a modified ``table`` runs the same checks against it (used by
    fault-injection tests).
    """
    table = table if table is not None else F3_TABLE
    expected = tuple(
        [RElement(2, -2)] + [ZERO] * 7
    )
    prods = [
        _fixed_point_product(table, "H12", "L3"),
        _fixed_point_product(table, "H13", "L2"),
        _fixed_point_product(table, "H23", "L1"),
    ]
    products_agree = all(p == expected for p in prods)

    def mu_of_row(row):
        return (-sum(r.b for r in row)) % 4

    mu_even = all(
        mu_of_row(table[g]) in (0, 2) for g in T3_GENERATORS
    )

    images_mu = all(
        mu_of_row(_f3_in_table(psi_phi_image(i), table)) == (2 if i == 11 else 0)
        for i in range(1, 14)
    )

    w3_ok = True
    span = range(-3, 4)
    for p, q, r, a12 in product(span, span, span, span):
        a11 = p + r - 2 * a12
        if a11 < -3 or a11 > 3:
            continue
        values = w3_map(p, q, r)
        if sum(values) != 0:
            w3_ok = False
            break
        if (a11 - (values[0] + values[1])) % 2 != 0:
            w3_ok = False
            break

    return {
        "products_agree": products_agree,
        "mu_even": mu_even,
        "images_mu": images_mu,
        "w3_arithmetic": w3_ok,
    }
