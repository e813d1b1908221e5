"""Quasi-particle monomials, their difference conditions, and the census of
monomials up to a total energy.

A monomial holds, for every color i, quasi-particles x_{n alpha_i}(m) with
charges non-increasing in the position p; the energy of one particle is -m
and the monomial's q-degree is the total energy.

Bounds on the mode m of particle p of color i (largest admissible value):

    -n + sum_q min(mu*n_q(partner), n) - 2(p-1)n        (sum over partner particles)

minus max(0, n - k0) for the distinguished color of a rectangular weight.
Equal adjacent charges also need m_(p+1) <= m_p - 2n_p, and a level k caps
charges at k*nu_i.  No ordering is imposed between energies of particles of
different charges.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache

from .colortree import TreeStats, tree_sum
from .forms import BlockForm, ColorPlan, alt_e_plan, cross_term, standard_plan
from .lie_data import RootSystemData
from .series import TruncatedSeries, pack, unpack

MODES = ("verma", "standard", "rectangular", "alt_e")


class WeightError(ValueError):
    pass


class MonomialError(ValueError):
    pass


# types -------------------------------------------------------------------------

@dataclass(frozen=True)
class QuasiParticle:
    color: int
    charge: int
    mode: int  # m in x_{n alpha_i}(m); the particle carries energy -m

    def __post_init__(self):
        if self.charge < 1:
            raise MonomialError(f"charge must be >= 1, got {self.charge}")

    @property
    def energy(self) -> int:
        return -self.mode


@dataclass(frozen=True)
class QPMonomial:
    """Per-color tuples of quasi-particles, charges non-increasing in p."""
    colors: tuple

    def __post_init__(self):
        for i, block in enumerate(self.colors, 1):
            for a, b in zip(block, block[1:]):
                if b.charge > a.charge:
                    raise MonomialError(f"charges of color {i} must be non-increasing")
            for qp in block:
                if qp.color != i:
                    raise MonomialError(f"particle of color {qp.color} stored under color {i}")

    @classmethod
    def from_lists(cls, charges, modes) -> "QPMonomial":
        """``charges[i-1]``, ``modes[i-1]``: aligned lists for color i."""
        if len(charges) != len(modes):
            raise MonomialError("charges and modes disagree on the rank")
        blocks = []
        for i, (ns, ms) in enumerate(zip(charges, modes), 1):
            if len(ns) != len(ms):
                raise MonomialError(f"color {i}: {len(ns)} charges but {len(ms)} modes")
            blocks.append(tuple(QuasiParticle(i, n, m) for n, m in zip(ns, ms)))
        return cls(tuple(blocks))

    @classmethod
    def empty(cls, rank: int) -> "QPMonomial":
        return cls(tuple(() for _ in range(rank)))

    @property
    def rank(self) -> int:
        return len(self.colors)

    def charges(self, i: int) -> tuple:
        return tuple(qp.charge for qp in self.colors[i - 1])

    def modes(self, i: int) -> tuple:
        return tuple(qp.mode for qp in self.colors[i - 1])

    def charge_type(self) -> tuple:
        return tuple(self.charges(i) for i in range(1, self.rank + 1))

    def energy_type(self) -> tuple:
        return tuple(self.modes(i) for i in range(1, self.rank + 1))

    def color_type(self) -> tuple:
        """(n_1, ..., n_l), n_i the total charge of color i."""
        return tuple(sum(ch) for ch in self.charge_type())

    def dual(self) -> tuple:
        return tuple(charge_to_dual(ch) for ch in self.charge_type())

    def energy(self) -> int:
        return -sum(qp.mode for block in self.colors for qp in block)

    def triples(self):
        return [(qp.color, qp.charge, qp.energy) for block in self.colors for qp in block]


@dataclass(frozen=True)
class WeightSpec:
    """Which module: generalized Verma, standard of level k, rectangular
    k0*Lambda_0 + kj*Lambda_j, or standard of level k with the alternative
    E-type basis."""
    mode: str
    k: int | None = None
    k0: int | None = None
    j: int | None = None
    kj: int | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise WeightError(f"unknown mode {self.mode!r}; expected one of {', '.join(MODES)}")

        def positive(name, v):
            if not isinstance(v, int) or isinstance(v, bool) or v < 1:
                raise WeightError(f"{name} must be a positive integer, got {v!r}")

        if self.mode in ("standard", "alt_e"):
            positive("k", self.k)
        elif self.mode == "rectangular":
            positive("k0", self.k0)
            positive("kj", self.kj)
            if not isinstance(self.j, int):
                raise WeightError("rectangular weights need a node j")

    @classmethod
    def verma(cls):
        return cls("verma")

    @classmethod
    def standard(cls, k):
        return cls("standard", k=k)

    @classmethod
    def rectangular(cls, k0, j, kj):
        return cls("rectangular", k0=k0, j=j, kj=kj)

    @classmethod
    def alt_e(cls, k):
        return cls("alt_e", k=k)

    @property
    def level(self) -> int | None:
        """Charge cap multiplier; None for the Verma module."""
        if self.mode == "verma":
            return None
        if self.mode == "rectangular":
            return self.k0 + self.kj
        return self.k

    @property
    def rect(self):
        """(j, k0) for rectangular weights, else None."""
        return (self.j, self.k0) if self.mode == "rectangular" else None

    def validate(self, rs: RootSystemData) -> None:
        if self.mode == "rectangular":
            if not rs.level_one_nodes:
                raise WeightError(f"rectangular weights are not supported for {rs.spec.name}")
            if self.j not in rs.level_one_nodes:
                raise WeightError(f"node {self.j} is not a level-one node of {rs.spec.name} "
                                  f"(allowed: {list(rs.level_one_nodes)})")
        if self.mode == "alt_e" and rs.spec.family != "E":
            raise WeightError(f"alternative E bases need type E, got {rs.spec.name}")

    def plan(self, rs: RootSystemData) -> ColorPlan:
        self.validate(rs)
        return alt_e_plan(rs) if self.mode == "alt_e" else standard_plan(rs)

    def to_dict(self) -> dict:
        d = {"mode": self.mode}
        for name in ("k", "k0", "j", "kj"):
            v = getattr(self, name)
            if v is not None:
                d[name] = v
        return d


# charge / dual conversion ------------------------------------------------------------

def _check_partition(seq, what):
    seq = tuple(seq)
    for x in seq:
        if not isinstance(x, int) or x < 1:
            raise MonomialError(f"{what} entries must be positive integers: {seq}")
    for a, b in zip(seq, seq[1:]):
        if b > a:
            raise MonomialError(f"{what} must be non-increasing: {seq}")
    return seq


def charge_to_dual(charges) -> tuple:
    """r^(n) = #{p : n_p >= n} for n = 1..max charge."""
    charges = _check_partition(charges, "charges")
    if not charges:
        return ()
    return tuple(sum(1 for c in charges if c >= n) for n in range(1, charges[0] + 1))


def dual_to_charge(dual) -> tuple:
    """Inverse of charge_to_dual (the conjugate partition)."""
    dual = _check_partition(dual, "dual counts")
    if not dual:
        return ()
    return tuple(sum(1 for r in dual if r >= p) for p in range(1, dual[0] + 1))


@lru_cache(maxsize=None)
def _conjugate(dual: tuple) -> tuple:
    return dual_to_charge(dual)


# difference conditions ---------------------------------------------------------------

def c1_satisfied(block) -> bool:
    """Equal adjacent charges need m_(p+1) <= m_p - 2 n_p.

    ``block`` is one color's sequence of QuasiParticles or (charge, mode) pairs.
    """
    pairs = [(qp.charge, qp.mode) if isinstance(qp, QuasiParticle) else tuple(qp) for qp in block]
    for (n1, m1), (n2, m2) in zip(pairs, pairs[1:]):
        if n1 == n2 and m2 > m1 - 2 * n1:
            return False
    return True


def own_bound(n: int, p: int, spec: WeightSpec | None, color: int) -> int:
    """The part of the mode bound that involves only the particle's own
    color: -n - 2(p-1)n, and the rectangular correction."""
    b = -n - 2 * (p - 1) * n
    if spec is not None and spec.mode == "rectangular" and color == spec.j:
        b -= max(0, n - spec.k0)
    return b


def partner_bound(n: int, partner_charges, mu: int) -> int:
    """sum over partner particles q of min(mu * n_q, n)."""
    return sum(min(mu * c, n) for c in partner_charges)


def c2_bound(rs: RootSystemData, spec: WeightSpec, monomial: QPMonomial, i: int, p: int) -> int:
    """Largest admissible mode of particle p (1-based) of color i."""
    plan = spec.plan(rs)
    block = monomial.colors[i - 1]
    if not 1 <= p <= len(block):
        raise MonomialError(f"color {i} has no particle at position {p}")
    n = block[p - 1].charge
    b = own_bound(n, p, spec, i)
    for s, mu in plan.partner_list(i):
        b += partner_bound(n, monomial.charges(s), mu)
    return b


def c3_satisfied(rs: RootSystemData, k: int, monomial: QPMonomial) -> bool:
    for i in range(1, rs.rank + 1):
        cap = k * rs.nu[i - 1]
        if any(n > cap for n in monomial.charges(i)):
            return False
    return True


def satisfies_all(rs: RootSystemData, spec: WeightSpec, monomial: QPMonomial) -> bool:
    spec.validate(rs)
    if monomial.rank != rs.rank:
        raise MonomialError(f"monomial has rank {monomial.rank}, algebra has {rs.rank}")
    for i, block in enumerate(monomial.colors, 1):
        if not c1_satisfied(block):
            return False
        for p, qp in enumerate(block, 1):
            if qp.mode > c2_bound(rs, spec, monomial, i, p):
                return False
    if spec.level is not None and not c3_satisfied(rs, spec.level, monomial):
        return False
    return True


# ordering ---------------------------------------------------------------------------

def _flat(seqs):
    # reading order of the linear order: color 1 positions 1, 2, ..., then color 2, ...
    return tuple(x for seq in seqs for x in seq)


def _seq_cmp(x, y) -> int:
    for a, b in zip(x, y):
        if a != b:
            return -1 if a < b else 1
    if len(x) == len(y):
        return 0
    return -1 if len(x) < len(y) else 1


def compare_monomials(a: QPMonomial, b: QPMonomial) -> int:
    """-1, 0 or 1: charge-types first, then energy-types (by modes); a
    proper initial segment is the smaller sequence."""
    if a.color_type() != b.color_type():
        raise MonomialError("monomials of different color-types are not compared")
    c = _seq_cmp(_flat(a.charge_type()), _flat(b.charge_type()))
    if c:
        return c
    return _seq_cmp(_flat(a.energy_type()), _flat(b.energy_type()))


def monomial_sort_key(m: QPMonomial):
    """Listing order: energy, color-type, then the linear order.  Python's
    tuple comparison already treats a proper prefix as smaller."""
    return (m.energy(), m.color_type(), _flat(m.charge_type()), _flat(m.energy_type()))


# checks of the minimal-energy identities --------------------------------------------

def check_energy_identities(rs: RootSystemData, monomial: QPMonomial) -> bool:
    """The five F4 identities turning charge sums into dual-count sums."""
    if rs.spec.name != "F4":
        raise ValueError("these identities are stated for F4")
    ch = monomial.charge_type()
    r = monomial.dual()

    def rr(i, t):
        lst = r[i - 1]
        return lst[t - 1] if 1 <= t <= len(lst) else 0

    for i in range(1, 5):
        lhs = sum((2 * (p - 1) + 1) * n for p, n in enumerate(ch[i - 1], 1))
        if lhs != sum(x * x for x in r[i - 1]):
            return False
    width = max([len(x) for x in r] + [0]) + 1
    pairs12 = sum(min(a, b) for a in ch[1] for b in ch[0])
    if pairs12 != sum(rr(1, t) * rr(2, t) for t in range(1, width)):
        return False
    pairs34 = sum(min(a, b) for a in ch[3] for b in ch[2])
    if pairs34 != sum(rr(3, t) * rr(4, t) for t in range(1, width)):
        return False
    pairs23 = sum(min(a, 2 * b) for a in ch[2] for b in ch[1])
    if pairs23 != sum(rr(2, t) * (rr(3, 2 * t - 1) + rr(3, 2 * t)) for t in range(1, width)):
        return False
    return True


# energy fillings --------------------------------------------------------------------

@lru_cache(maxsize=200000)
def energy_fillings(charges: tuple, bounds: tuple, limit: int) -> tuple:
    """c[e] = number of mode sequences m_p <= bounds[p] obeying the equal-charge
    gap condition with sum(bounds) - sum(m) = e, for e = 0..limit.

    Partner terms shift every bound of an equal-charge run by the same
    amount, so the count does not depend on them.
    """
    if limit < 0:
        return ()
    # state: (mode of the previous particle, excess used so far) -> count
    states = {(None, 0): 1}
    prev_n = None
    for n, b in zip(charges, bounds):
        nxt: dict = {}
        for (m_prev, used), cnt in states.items():
            for e in range(limit - used + 1):
                m = b - e
                if n == prev_n and m > m_prev - 2 * prev_n:
                    continue
                key = (m, used + e)
                nxt[key] = nxt.get(key, 0) + cnt
        states = nxt
        prev_n = n
    out = [0] * (limit + 1)
    for (_, used), cnt in states.items():
        out[used] += cnt
    return tuple(out)


# census -----------------------------------------------------------------------------

class CensusWeights:
    """Census factors for the tree sum.

    A color's factor is q^(-sum of own bounds) times the count of energy
    fillings; an edge contributes q^(-sum of partner terms).  Every visited
    partition and pair is also checked against the minimal-energy formula
    (the pruning relies on it); disagreements are collected in ``failures``.
    """

    def __init__(self, rs: RootSystemData, spec: WeightSpec, plan: ColorPlan):
        self.rs = rs
        self.spec = spec
        self.mu = {(s, c): mu for c in plan.order for s, mu in plan.partner_list(c)}
        self.failures: list = []
        self.checked_partitions = 0
        self.checked_pairs = 0
        self.min_energy_equalities = 0

    def unary(self, color, r, limit):
        charges = _conjugate(tuple(r))
        level = self.spec.level
        if level is not None and charges and charges[0] > level * self.rs.nu[color - 1]:
            return {}
        bounds = tuple(own_bound(n, p, self.spec, color) for p, n in enumerate(charges, 1))
        e0 = -sum(bounds)
        self.checked_partitions += 1
        expected = sum(x * x for x in r)
        if self.spec.mode == "rectangular" and color == self.spec.j:
            expected += sum(r[self.spec.k0:])
        if e0 == expected:
            self.min_energy_equalities += 1
        else:
            self.failures.append({"color": color, "dual": list(r), "energy": e0,
                                  "formula": expected})
        if e0 > limit:
            return {}
        fills = energy_fillings(charges, bounds, limit - e0)
        return {e0 + d: c for d, c in enumerate(fills) if c}

    def edge(self, partner, dependent, r_partner, r_dependent):
        mu = self.mu[(partner, dependent)]
        theirs = _conjugate(tuple(r_partner))
        x = sum(partner_bound(n, theirs, mu) for n in _conjugate(tuple(r_dependent)))
        self.checked_pairs += 1
        formula = cross_term(r_partner, r_dependent, mu)
        if x == formula:
            self.min_energy_equalities += 1
        else:
            self.failures.append({"edge": [partner, dependent], "duals": [list(r_partner),
                                  list(r_dependent)], "energy": x, "formula": formula})
        return x


@dataclass
class Census:
    spec_name: str
    weight: WeightSpec
    M: int
    rank: int
    entries: dict  # (q, color_type) -> count
    monomials: list | None = None
    checks: dict = field(default_factory=dict)

    def total(self) -> int:
        return sum(self.entries.values())

    def to_dict(self) -> dict:
        d = {
            "spec": self.spec_name,
            "mode": self.weight.to_dict(),
            "M": self.M,
            "entries": [{"q": q, "color_type": list(ct), "count": str(c)}
                        for (q, ct), c in sorted(self.entries.items())],
        }
        if self.monomials is not None:
            d["monomials"] = [[list(t) for t in m.triples()] for m in self.monomials]
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))


def census_series(rs: RootSystemData, spec: WeightSpec, M: int, stats: TreeStats | None = None,
                  weights_out: list | None = None) -> TruncatedSeries:
    """The census as a series, summed along the Dynkin tree."""
    plan = spec.plan(rs)
    bf = BlockForm(rs, plan, rect=spec.rect)
    weights = CensusWeights(rs, spec, plan)
    s = tree_sum(bf, weights, M, max_blocks=spec.level, stats=stats)
    if weights_out is not None:
        weights_out.append(weights)
    return s


def enumerate_census(rs: RootSystemData, spec: WeightSpec, M: int, list_guard: int = 2000,
                     force_list: bool = False, listing: bool = False) -> Census:
    """Count the monomials of total energy <= M satisfying every condition.

    With ``listing`` the monomials themselves are produced as well when the
    count stays within ``list_guard`` (or ``force_list``); the listing comes
    from an independent configuration-by-configuration search and its tally
    is compared with the counts.
    """
    if M < 0:
        raise ValueError("M must be nonnegative")
    spec.validate(rs)
    stats = TreeStats()
    holder: list = []
    series = census_series(rs, spec, M, stats=stats, weights_out=holder)
    weights = holder[0]
    entries = {(q, y): c for (q, y), c in series.terms()}
    census = Census(rs.spec.name, spec, M, rs.rank, entries)
    census.checks = {
        "partitions_checked": weights.checked_partitions,
        "pairs_checked": weights.checked_pairs,
        "min_energy_equalities": weights.min_energy_equalities,
        "min_energy_failures": weights.failures[:10],
        "tree": stats.to_dict(),
    }
    if listing:
        total = census.total()
        if total <= list_guard or force_list:
            mons = list_monomials(rs, spec, M)
            census.monomials = mons
            tally: dict = {}
            for m in mons:
                key = (m.energy(), m.color_type())
                tally[key] = tally.get(key, 0) + 1
            census.checks["listing_agrees"] = tally == entries
        else:
            census.checks["listing_suppressed"] = f"{total} monomials exceed the guard {list_guard}"
    return census


def census_to_series(census: Census, rank: int | None = None, M: int | None = None) -> TruncatedSeries:
    rank = census.rank if rank is None else rank
    M = census.M if M is None else M
    s = TruncatedSeries(rank, M)
    for (q, ct), c in census.entries.items():
        s.add_term(q, pack(ct, rank), c)
    return s


# configuration-by-configuration listing ---------------------------------------------------

def _mode_sequences(charges, bounds, budget):
    """All mode tuples m_p <= bounds[p] with the equal-charge gap condition and
    total excess <= budget, with their excess."""
    out = []
    m = [0] * len(charges)

    def rec(p, used):
        if p == len(charges):
            out.append((tuple(m), used))
            return
        for e in range(budget - used + 1):
            v = bounds[p] - e
            if p and charges[p] == charges[p - 1] and v > m[p - 1] - 2 * charges[p - 1]:
                continue
            m[p] = v
            rec(p + 1, used + e)

    rec(0, 0)
    return out


def list_monomials(rs: RootSystemData, spec: WeightSpec, M: int) -> list:
    """Every admissible monomial of energy <= M, sorted by
    ``monomial_sort_key``.  Configurations come from the full block search;
    bounds come from ``c2_bound`` on the actual monomial; every result is
    rechecked with ``satisfies_all``."""
    plan = spec.plan(rs)
    bf = BlockForm(rs, plan, rect=spec.rect)
    out = []
    for cfg, Q in bf.configurations(M, max_blocks=spec.level):
        charges = [dual_to_charge(lst) for lst in cfg]
        skeleton = QPMonomial.from_lists(charges, [[0] * len(c) for c in charges])
        bounds = [[c2_bound(rs, spec, skeleton, i, p) for p in range(1, len(charges[i - 1]) + 1)]
                  for i in range(1, rs.rank + 1)]
        e_min = -sum(sum(b) for b in bounds)
        if e_min != Q:
            raise ArithmeticError(f"least energy {e_min} differs from exponent {Q} for {cfg}")
        per_color = [_mode_sequences(charges[i], bounds[i], M - e_min) for i in range(rs.rank)]

        def combine(i, used, acc):
            if i == rs.rank:
                mono = QPMonomial.from_lists(charges, acc)
                if not satisfies_all(rs, spec, mono):
                    raise ArithmeticError(f"listed monomial fails its conditions: {mono}")
                out.append(mono)
                return
            for modes, e in per_color[i]:
                if used + e <= M - e_min:
                    combine(i + 1, used + e, acc + [modes])

        combine(0, 0, [])
    out.sort(key=monomial_sort_key)
    return out


def census_from_listing(rs: RootSystemData, spec: WeightSpec, M: int) -> TruncatedSeries:
    s = TruncatedSeries(rs.rank, M)
    for m in list_monomials(rs, spec, M):
        s.add_term(m.energy(), pack(m.color_type(), rs.rank), 1)
    return s


def color_type_of(key: int, rank: int) -> tuple:
    return unpack(key, rank)
