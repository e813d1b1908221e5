"""Root system data for the finite simple Lie algebras, in the node labeling
used throughout this package.

Labeling (nodes 1..l):

* A_l, B_l, F_4, G_2: a path 1-2-...-l; in B_l the last node is short, in
  F_4 nodes 3 and 4 are short, in G_2 node 2 is short.
* C_l: a path with node 1 long and nodes 2..l short (the usual labels are
  reversed so that the root length classes read 1 <= nu_2 <= ... <= nu_l).
* D_l: path 1-...-(l-1) with node l attached to node l-2.
* E_6: path 1-...-5, node 6 attached to node 3.
* E_7: path 1-...-6, node 7 attached to node 3.
* E_8: path 1-...-7, node 8 attached to node 5.

``nu[i]`` is 1, 2 or 3 for squared lengths 2, 1, 2/3 (long roots have
squared length 2).  ``i_prime[i]`` is the designated earlier neighbour of
node ``i`` and ``mu[i] = nu[i] // nu[i_prime[i]]``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

FAMILIES = ("A", "B", "C", "D", "E", "F", "G")

# Enumeration cap for enumerate_positive_roots; E_8 has 120.
MAX_ROOTS = 2000


class InvalidAlgebra(ValueError):
    pass


@dataclass(frozen=True)
class AlgebraSpec:
    family: str
    rank: int

    def __post_init__(self):
        fam = self.family
        if fam not in FAMILIES:
            raise InvalidAlgebra(f"unknown family {fam!r}; expected one of {', '.join(FAMILIES)}")
        if not isinstance(self.rank, int) or isinstance(self.rank, bool):
            raise InvalidAlgebra(f"rank must be an integer, got {self.rank!r}")
        l = self.rank
        ok = {
            "A": l >= 1,
            "B": l >= 2,
            "C": l >= 2,
            "D": l >= 3,
            "E": l in (6, 7, 8),
            "F": l == 4,
            "G": l == 2,
        }[fam]
        if not ok:
            raise InvalidAlgebra(f"{fam}{l} is not a valid finite type")

    @property
    def name(self) -> str:
        return f"{self.family}{self.rank}"

    @classmethod
    def parse(cls, text: str) -> "AlgebraSpec":
        text = text.strip().upper()
        if len(text) < 2 or not text[1:].isdigit():
            raise InvalidAlgebra(f"cannot parse algebra name {text!r}")
        return cls(text[0], int(text[1:]))


def dynkin_edges(spec: AlgebraSpec) -> list[tuple[int, int]]:
    """Edges (i, j) with i < j, 1-based."""
    l, fam = spec.rank, spec.family
    if fam in "ABCFG":
        return [(i, i + 1) for i in range(1, l)]
    if fam == "D":
        return [(i, i + 1) for i in range(1, l - 1)] + [(l - 2, l)]
    branch = {6: 3, 7: 3, 8: 5}[l]
    return [(i, i + 1) for i in range(1, l - 1)] + [(branch, l)]


def root_length_classes(spec: AlgebraSpec) -> list[int]:
    l, fam = spec.rank, spec.family
    if fam == "B":
        return [1] * (l - 1) + [2]
    if fam == "C":
        return [1] + [2] * (l - 1)
    if fam == "F":
        return [1, 1, 2, 2]
    if fam == "G":
        return [1, 3]
    return [1] * l


def i_prime_map(spec: AlgebraSpec) -> dict[int, int]:
    l, fam = spec.rank, spec.family
    out = {i: i - 1 for i in range(2, l + 1)}
    if fam == "D":
        out[l] = l - 2
    elif fam == "E":
        out[l] = 5 if l == 8 else 3
    return out


def cartan_matrix(spec: AlgebraSpec) -> list[list[int]]:
    """Cartan matrix with a[i][j] = <alpha_i^vee, alpha_j> (0-based rows)."""
    l = spec.rank
    nu = root_length_classes(spec)
    a = [[2 if i == j else 0 for j in range(l)] for i in range(l)]
    for i, j in dynkin_edges(spec):
        i, j = i - 1, j - 1
        if nu[i] == nu[j]:
            a[i][j] = a[j][i] = -1
        elif nu[i] > nu[j]:
            a[i][j], a[j][i] = -(nu[i] // nu[j]), -1
        else:
            a[j][i], a[i][j] = -(nu[j] // nu[i]), -1
    return a


def enumerate_positive_roots(cartan, cap: int = MAX_ROOTS) -> list[tuple[int, ...]]:
    """Positive roots as simple-root coefficient vectors, by root strings.

    Roots are produced height by height.  For a root b and simple root
    alpha_i the alpha_i-string through b runs from b - p*alpha_i to
    b + q*alpha_i with p - q = <alpha_i^vee, b>; p is read off the roots
    already found.  A matrix that is not of finite type keeps producing
    roots and is rejected once ``cap`` is exceeded.
    """
    l = len(cartan)
    for i in range(l):
        if len(cartan[i]) != l or cartan[i][i] != 2:
            raise InvalidAlgebra("not a Cartan matrix: diagonal must be 2")
        for j in range(l):
            if i != j and (cartan[i][j] > 0 or (cartan[i][j] == 0) != (cartan[j][i] == 0)):
                raise InvalidAlgebra("not a Cartan matrix: bad off-diagonal pattern")
    simple = [tuple(int(i == j) for j in range(l)) for i in range(l)]
    found = set(simple)
    layer = list(simple)
    ordered = list(simple)
    while layer:
        nxt = []
        for b in layer:
            for i in range(l):
                pairing = sum(b[j] * cartan[i][j] for j in range(l))
                p = 0
                down = list(b)
                while True:
                    down[i] -= 1
                    if tuple(down) in found:
                        p += 1
                    else:
                        break
                if p - pairing > 0:
                    up = list(b)
                    up[i] += 1
                    up = tuple(up)
                    if up not in found:
                        found.add(up)
                        nxt.append(up)
                        if len(found) > cap:
                            raise InvalidAlgebra(
                                f"more than {cap} positive roots; matrix is not of finite type")
        nxt.sort()
        ordered.extend(nxt)
        layer = nxt
    return ordered


def level_one_fundamental_nodes(spec: AlgebraSpec) -> tuple[int, ...]:
    """Nodes j admitting rectangular weights k0*Lambda_0 + kj*Lambda_j.

    Empty for families where rectangular mode is not supported.
    """
    if spec.family == "D":
        return (1, spec.rank - 1, spec.rank)
    if spec.family == "E" and spec.rank == 6:
        return (1, 6)
    if spec.family == "E" and spec.rank == 7:
        return (1,)
    return ()


def height(root) -> int:
    return sum(root)


@dataclass(frozen=True)
class RootSystemData:
    spec: AlgebraSpec
    cartan: tuple[tuple[int, ...], ...]
    nu: tuple[int, ...]
    i_prime: dict[int, int] = field(hash=False)
    mu: dict[int, int] = field(hash=False)
    positive_roots: tuple[tuple[int, ...], ...]
    highest_root: tuple[int, ...]
    level_one_nodes: tuple[int, ...]

    @property
    def rank(self) -> int:
        return self.spec.rank

    def norm2(self, i: int) -> Fraction:
        """Squared length of alpha_i (1-based)."""
        return Fraction(2, self.nu[i - 1])

    def inner(self, i: int, j: int) -> Fraction:
        """<alpha_i, alpha_j> for 1-based node indices."""
        return Fraction(self.cartan[i - 1][j - 1], self.nu[i - 1])

    def adjacent(self, i: int, j: int) -> bool:
        return i != j and self.cartan[i - 1][j - 1] != 0

    def roots_by_height(self) -> list[tuple[int, ...]]:
        return sorted(self.positive_roots, key=lambda r: (height(r), r))

    def to_dict(self) -> dict:
        return {
            "family": self.spec.family,
            "rank": self.spec.rank,
            "cartan": [list(row) for row in self.cartan],
            "nu": list(self.nu),
            "i_prime": {str(i): v for i, v in sorted(self.i_prime.items())},
            "mu": {str(i): v for i, v in sorted(self.mu.items())},
            "positive_roots": [list(r) for r in self.roots_by_height()],
            "highest_root": list(self.highest_root),
            "level_one_nodes": list(self.level_one_nodes),
        }

    def to_json(self, indent=None) -> str:
        return json.dumps(self.to_dict(), indent=indent)


def build_root_system(spec: AlgebraSpec | str) -> RootSystemData:
    if isinstance(spec, str):
        spec = AlgebraSpec.parse(spec)
    cartan = cartan_matrix(spec)
    nu = root_length_classes(spec)
    ip = i_prime_map(spec)
    mu = {}
    for i, j in ip.items():
        if nu[i - 1] % nu[j - 1]:
            raise AssertionError(f"nu_{j} does not divide nu_{i} in {spec.name}")
        mu[i] = nu[i - 1] // nu[j - 1]
    roots = enumerate_positive_roots(cartan)
    top = max(roots, key=height)
    return RootSystemData(
        spec=spec,
        cartan=tuple(tuple(r) for r in cartan),
        nu=tuple(nu),
        i_prime=ip,
        mu=mu,
        positive_roots=tuple(roots),
        highest_root=top,
        level_one_nodes=level_one_fundamental_nodes(spec),
    )


def expected_positive_root_count(spec: AlgebraSpec) -> int:
    l = spec.rank
    return {
        "A": l * (l + 1) // 2,
        "B": l * l,
        "C": l * l,
        "D": l * (l - 1),
        "E": {6: 36, 7: 63, 8: 120}.get(l, 0),
        "F": 24,
        "G": 6,
    }[spec.family]
