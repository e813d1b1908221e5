"""Cross-checks between the census, the sum sides, the product side and the
PBW oracle, with deterministic JSON reports."""
from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from . import characters as ch
from .forms import BlockForm, FormNotPositiveDefinite
from .lie_data import AlgebraSpec, InvalidAlgebra, build_root_system
from .qp_enum import (WeightError, WeightSpec, c2_bound, census_to_series, dual_to_charge,
                      enumerate_census, list_monomials, satisfies_all, QPMonomial)
from .series import TruncatedSeries, first_mismatch, ts_specialize_y

STATUSES = ("verified", "mismatch", "aborted")
ROW_MODES = ("identity", "verma", "standard", "rectangular", "alt_e")
FAULTS = ("drop_root",)


class ManifestError(ValueError):
    pass


@dataclass
class VerificationReport:
    task: str
    spec: str
    params: dict
    M: int
    status: str = "verified"
    first_mismatch: dict | None = None
    term_counts: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)
    timing: dict = field(default_factory=dict)
    error: str | None = None

    def to_dict(self, with_timing: bool = False) -> dict:
        d = {
            "task": self.task,
            "spec": self.spec,
            "params": self.params,
            "M": self.M,
            "status": self.status,
            "first_mismatch": self.first_mismatch,
            "term_counts": self.term_counts,
            "checks": self.checks,
        }
        if self.error is not None:
            d["error"] = self.error
        if with_timing:
            d["timing"] = {k: round(v, 3) for k, v in self.timing.items()}
        return d


def _compare(report: VerificationReport, sides: list) -> None:
    """Compare every side with the first; keep the smallest mismatching key."""
    (ref_name, ref), rest = sides[0], sides[1:]
    found = []
    comparisons = {}
    for name, s in rest:
        mm = first_mismatch(ref, s)
        label = f"{ref_name} vs {name}"
        comparisons[label] = "equal" if mm is None else "differ"
        if mm is not None:
            (q, y), a, b = mm
            found.append(((q, y), {"comparison": label, "q": q, "y": list(y),
                                   "lhs": str(a), "rhs": str(b)}))
    report.checks["comparisons"] = comparisons
    if found:
        found.sort(key=lambda t: t[0])
        report.status = "mismatch"
        report.first_mismatch = found[0][1]


def _timed(report, name, fn, *args, **kwargs):
    t = time.perf_counter()
    out = fn(*args, **kwargs)
    report.timing[name] = time.perf_counter() - t
    return out


def _expectations(report: VerificationReport, reference: TruncatedSeries, expect) -> None:
    if not expect:
        return
    want = expect.get("q_coefficients")
    if want is None:
        return
    got = ts_specialize_y(reference).q_coefficients()
    report.checks["expected_q_coefficients"] = "checked"
    for q, w in enumerate(want):
        g = got[q] if q < len(got) else None
        if g != int(w):
            report.checks["expected_q_coefficients"] = "differ"
            if report.status == "verified":
                report.status = "mismatch"
                report.first_mismatch = {"comparison": "y-specialized vs expectation", "q": q,
                                         "y": [], "lhs": str(g), "rhs": str(w)}
            return


def verify_identity(rs, M: int, fault: str | None = None, root=None, expect=None,
                    task: str | None = None) -> VerificationReport:
    """product = N-sum = PBW count = Verma census, exactly."""
    params = {"mode": "identity"}
    if fault:
        params["fault"] = fault
    report = VerificationReport(task or f"{rs.spec.name}-identity-M{M}", rs.spec.name, params, M)
    drop = None
    if fault == "drop_root":
        drop = tuple(root) if root is not None else ch.ordered_roots(rs)[-1]
        params["root"] = list(drop)
    product = _timed(report, "product", ch.char_product, rs, M, drop_root=drop)
    n_sum = _timed(report, "N_sum", ch.char_N_sum, rs, M)
    pbw = _timed(report, "pbw", ch.pbw_census, rs, M)
    census = _timed(report, "census", enumerate_census, rs, WeightSpec.verma(), M)
    census_series = census_to_series(census)
    sides = [("product", product), ("N_sum", n_sum), ("pbw", pbw), ("census", census_series)]
    report.term_counts = {name: len(s) for name, s in sides}
    report.checks["census"] = _census_checks(census)
    _compare(report, sides)
    _census_consistency(report, census)
    _expectations(report, product, expect)
    return report


def _census_checks(census) -> dict:
    c = dict(census.checks)
    c.pop("tree", None)
    return c


def _census_consistency(report, census) -> None:
    if census.checks.get("min_energy_failures"):
        report.status = "aborted"
        report.first_mismatch = None
        report.error = "census energies disagree with the exponent form; pruning is not justified"
    if census.checks.get("listing_agrees") is False and report.status == "verified":
        report.status = "mismatch"
        report.first_mismatch = {"comparison": "census vs listing", "q": None, "y": [],
                                 "lhs": None, "rhs": None}


def closed_form(rs, spec: WeightSpec, M: int) -> tuple:
    if spec.mode == "verma":
        return "N_sum", ch.char_N_sum(rs, M)
    if spec.mode == "rectangular":
        return "rect_sum", ch.char_rect_sum(rs, spec.k0, spec.j, spec.kj, M)
    return "L_sum", ch.char_L_sum(rs, spec.k, M)


def verify_basis(rs, spec: WeightSpec, M: int, expect=None, listing: bool = False,
                 task: str | None = None) -> VerificationReport:
    """Census of admissible monomials against the matching closed form."""
    spec.validate(rs)
    params = spec.to_dict()
    desc = "-".join(f"{k}={v}" for k, v in params.items() if k != "mode")
    name = f"{rs.spec.name}-{spec.mode}{('-' + desc) if desc else ''}-M{M}"
    report = VerificationReport(task or name, rs.spec.name, params, M)
    census = _timed(report, "census", enumerate_census, rs, spec, M, listing=listing,
                    list_guard=10 ** 6)
    formula, rhs = _timed(report, "closed_form", closed_form, rs, spec, M)
    lhs = census_to_series(census)
    report.term_counts = {"census": len(lhs), formula: len(rhs), "monomials": str(census.total())}
    report.checks["census"] = _census_checks(census)
    _compare(report, [("census", lhs), (formula, rhs)])
    _census_consistency(report, census)
    _expectations(report, rhs, expect)
    return report


# structural checks ------------------------------------------------------------------

def inclusion_chain(rs, k: int, M: int) -> dict:
    """Standard(k) within Standard(k+1) within the Verma census, as sets.

    Level k monomials are listed and rechecked literally under level k+1 and
    the Verma conditions.  For level k+1 inside Verma, every level k+1
    charge configuration is checked to have identical mode bounds under both
    conditions (so identical energy fillings), and counts are compared
    coefficientwise.
    """
    low, high, verma = WeightSpec.standard(k), WeightSpec.standard(k + 1), WeightSpec.verma()
    listed = list_monomials(rs, low, M)
    in_high = all(satisfies_all(rs, high, m) for m in listed)
    in_verma = all(satisfies_all(rs, verma, m) for m in listed)
    bf = BlockForm(rs, high.plan(rs))
    same_bounds = True
    configs = 0
    for cfg, _ in bf.configurations(M, max_blocks=k + 1):
        configs += 1
        charges = [dual_to_charge(lst) for lst in cfg]
        sk = QPMonomial.from_lists(charges, [[0] * len(c) for c in charges])
        for i in range(1, rs.rank + 1):
            for p in range(1, len(charges[i - 1]) + 1):
                if c2_bound(rs, high, sk, i, p) != c2_bound(rs, verma, sk, i, p):
                    same_bounds = False
    series = [census_to_series(enumerate_census(rs, s, M)) for s in (low, high, verma)]
    monotone = True
    for a, b in zip(series, series[1:]):
        for q in range(M + 1):
            for key, c in a.layers[q].items():
                if b.layers[q].get(key, 0) < c:
                    monotone = False
    return {"listed": len(listed), "low_in_high": in_high, "low_in_verma": in_verma,
            "high_configs": configs, "high_bounds_match_verma": same_bounds,
            "counts_monotone": monotone,
            "ok": in_high and in_verma and same_bounds and monotone}


# suites ---------------------------------------------------------------------------

def parse_row(row) -> dict:
    """Validate one manifest row; raises ManifestError."""
    if not isinstance(row, dict):
        raise ManifestError(f"manifest rows must be objects, got {row!r}")
    for key in ("family", "rank", "mode", "M"):
        if key not in row:
            raise ManifestError(f"manifest row lacks {key!r}: {row}")
    try:
        spec = AlgebraSpec(str(row["family"]).upper(), int(row["rank"]))
    except (InvalidAlgebra, ValueError, TypeError) as e:
        raise ManifestError(str(e)) from None
    mode = row["mode"]
    if mode not in ROW_MODES:
        raise ManifestError(f"unknown mode {mode!r}; expected one of {', '.join(ROW_MODES)}")
    M = row["M"]
    if not isinstance(M, int) or isinstance(M, bool) or M < 0:
        raise ManifestError(f"M must be a nonnegative integer: {row}")
    fault = row.get("fault")
    if fault is not None and fault not in FAULTS:
        raise ManifestError(f"unknown fault {fault!r}")
    weight = None
    if mode != "identity":
        try:
            weight = WeightSpec(mode, k=row.get("k"), k0=row.get("k0"), j=row.get("j"),
                                kj=row.get("kj"))
            weight.validate(build_root_system(spec))
        except WeightError as e:
            raise ManifestError(str(e)) from None
    return {"spec": spec, "mode": mode, "weight": weight, "M": M, "fault": fault,
            "root": row.get("root"), "expect": row.get("expect"), "task": row.get("task")}


def load_manifest(path) -> list:
    try:
        with open(path) as fh:
            rows = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise ManifestError(f"cannot read manifest {path}: {e}") from None
    if not isinstance(rows, list):
        raise ManifestError("manifest must be a JSON array of rows")
    return [parse_row(r) for r in rows]


def run_row(parsed: dict) -> VerificationReport:
    rs = build_root_system(parsed["spec"])
    try:
        if parsed["mode"] == "identity":
            return verify_identity(rs, parsed["M"], fault=parsed["fault"], root=parsed["root"],
                                   expect=parsed["expect"], task=parsed["task"])
        return verify_basis(rs, parsed["weight"], parsed["M"], expect=parsed["expect"],
                            task=parsed["task"])
    except (FormNotPositiveDefinite, ArithmeticError, MemoryError) as e:
        params = {"mode": parsed["mode"]}
        if parsed["weight"] is not None:
            params = parsed["weight"].to_dict()
        return VerificationReport(parsed["task"] or f"{rs.spec.name}-{parsed['mode']}-M{parsed['M']}",
                                  rs.spec.name, params, parsed["M"], status="aborted",
                                  error=f"{type(e).__name__}: {e}")


def run_suite(rows: list, threads: int = 1) -> list:
    """Run parsed rows; reports come back in manifest order."""
    if threads <= 1 or len(rows) <= 1:
        return [run_row(r) for r in rows]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(run_row, rows))


def suite_exit_code(reports) -> int:
    return 0 if all(r.status == "verified" for r in reports) else 1


def reports_json(reports, with_timing: bool = False) -> str:
    return json.dumps([r.to_dict(with_timing) for r in reports], indent=2, sort_keys=True) + "\n"
