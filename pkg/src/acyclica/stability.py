"""Finite sweeps standing in for the direct and inverse limits.

Every statement about a limit over all finite subsets B is checked as a
for-all over an explicit, increasing list of parameter values, and the
report records that list.  The cofinality and spectral-sequence steps of the
limit arguments are not modelled; they add nothing checkable beyond the
per-parameter vanishing recorded here.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

from ._parallel import pmap
from .exactla import DEFAULT_FIELD, Field, rank
from .gradedcomplex import ChainMap, CohomologyTable, Window, cohomology
from .polykoszul import VariableSet, dual_koszul_complex
from .symcoalgebra import acyclic_comodule_lc, acyclic_contramodule_lc

FAMILIES = ("comodule", "contramodule", "koszul-dual", "subcomplex", "quotient")


@dataclass(frozen=True)
class ParameterSweep:
    family: str
    parameters: tuple[int, ...]
    window: Window
    a: int | None = None  # ambient dim W for the subcomplex / quotient families
    field: Field = DEFAULT_FIELD

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        ps = list(self.parameters)
        if any(b <= a for a, b in zip(ps, ps[1:])):
            raise ValueError("parameters must be strictly increasing")
        if self.family in ("subcomplex", "quotient"):
            if self.a is None or (ps and ps[-1] > self.a):
                raise ValueError("subcomplex/quotient sweeps need a >= every parameter")


def threshold(family: str, n: int) -> int:
    """H^n must vanish for every parameter strictly above this value."""
    if family in ("comodule", "contramodule"):
        return abs(n)
    if family == "koszul-dual":
        return max(n, 0)
    if family == "subcomplex":
        return -n if n < 0 else 0  # concentration at positions <= -m
    return n if n > 0 else 0  # quotient: concentration at positions >= m


def family_complex(family: str, param: int, window: Window, field: Field = DEFAULT_FIELD, a: int | None = None):
    if family == "comodule":
        return acyclic_comodule_lc(param).realize(window, field)
    if family == "contramodule":
        return acyclic_contramodule_lc(param).realize(window, field)
    if family == "koszul-dual":
        return dual_koszul_complex(VariableSet.standard(param), window, field)
    if family == "subcomplex":
        return acyclic_comodule_lc(a).restrict(param).realize(window, field)
    if family == "quotient":
        return acyclic_contramodule_lc(a).restrict(param).realize(window, field)
    raise ValueError(f"unknown family {family!r}")


def _table(args) -> CohomologyTable:
    family, param, window, field, a = args
    return cohomology(family_complex(family, param, window, field, a))


def stable_range_report(sweep: ParameterSweep, assert_positions=None) -> dict:
    """Per-parameter cohomology in the window and the threshold verdicts.

    ``assert_positions`` limits which positions are asserted (default: all
    positions in the window); flagged bidegrees never count.
    """
    w = sweep.window
    tables = pmap(_table, [(sweep.family, p, w, sweep.field, sweep.a) for p in sweep.parameters])
    positions = list(assert_positions) if assert_positions is not None else list(w.positions())
    per = {}
    verdicts = {}
    for p, H in zip(sweep.parameters, tables):
        per[p] = {n: H.total(n) for n in w.positions()}
        per_flagged = sorted(b for b in H.flagged)
        per[p] = {"dims": per[p], "flagged": per_flagged}
    ok = True
    for n in positions:
        th = threshold(sweep.family, n)
        bad = [p for p, H in zip(sweep.parameters, tables) if p > th and H.total(n) != 0]
        vanishing_from = next((p for p in sweep.parameters
                               if all(H.total(n) == 0 for q, H in zip(sweep.parameters, tables) if q >= p)), None)
        verdicts[n] = {"threshold": th, "violations": bad, "vanishes_from": vanishing_from, "pass": not bad}
        ok &= not bad
    return {
        "family": sweep.family,
        "parameters": list(sweep.parameters),
        "a": sweep.a,
        "window": w.to_json_obj(),
        "field": sweep.field.name,
        "cohomology": {str(p): {"dims": {str(n): k for n, k in v["dims"].items()},
                                "flagged": [list(b) for b in v["flagged"]]} for p, v in per.items()},
        "verdicts": {str(n): v for n, v in verdicts.items()},
        "pass": ok,
    }


def transition_map(family: str, m1: int, m2: int, a: int, window: Window, field: Field = DEFAULT_FIELD) -> ChainMap:
    """Inclusion of the m1-subcomplex in the m2-subcomplex, or the projection
    from the m2-quotient onto the m1-quotient."""
    if not m1 <= m2 <= a:
        raise ValueError(f"need m' <= m'' <= a, got {m1}, {m2}, {a}")
    if family == "subcomplex":
        lc = acyclic_comodule_lc(a)
        return ChainMap.from_labels(lc.restrict(m1).realize(window, field), lc.restrict(m2).realize(window, field))
    if family == "quotient":
        lc = acyclic_contramodule_lc(a)
        return ChainMap.from_labels(lc.restrict(m2).realize(window, field), lc.restrict(m1).realize(window, field))
    raise ValueError("transition maps exist for the subcomplex and quotient families")


def transition_vanishing_check(family: str, m1: int, m2: int, a: int, window: Window,
                               field: Field = DEFAULT_FIELD, positions=None) -> bool:
    """Induced map on H^n is zero for every n in range.

    Subcomplex family: n > -m2 (the target vanishes there).  Quotient
    family: n < m2 (the source vanishes there).  Flagged bidegrees of either
    end are skipped.
    """
    f = transition_map(family, m1, m2, a, window, field)
    Hs, Ht = cohomology(f.source), cohomology(f.target)
    if positions is None:
        positions = [n for n in window.positions() if (n > -m2 if family == "subcomplex" else n < m2)]
    for n in positions:
        for t in window.degrees():
            if (n, t) in Hs.flagged or (n, t) in Ht.flagged:
                continue
            if f.induced_rank(n, t):
                return False
    return True


def mittag_leffler_check(n: int, a: int, stages, window: Window | None = None, field: Field = DEFAULT_FIELD) -> dict:
    """Surjectivity of Hom(C_{m''}, L^n W) -> Hom(C_{m'}, L^n W) per internal-degree slice."""
    stages = list(stages)
    if any(s > a for s in stages) or any(y <= x for x, y in zip(stages, stages[1:])):
        raise ValueError("stages must be increasing and at most a")
    term = acyclic_contramodule_lc(a)
    # the single free term Hom(C, L^n W) at position n
    single = replace(term, spaces={n: term.spaces[n]}, ops={})
    if window is None:
        window = Window(n, n, n - 6, n)
    rows = []
    ok = True
    for m1, m2 in zip(stages, stages[1:]):
        big = single.restrict(m2).realize(window, field)
        small = single.restrict(m1).realize(window, field)
        proj = ChainMap.from_labels(big, small)
        for t in window.degrees():
            d = small.dim(n, t)
            r = rank(proj.f(n, t)) if d else 0
            rows.append({"from": m2, "to": m1, "internal_degree": t, "target_dim": d, "rank": r,
                         "surjective": r == d})
            ok &= r == d
    return {"n": n, "a": a, "stages": stages, "window": window.to_json_obj(), "rows": rows, "pass": ok}
