"""Command-line driver: run verification suites and write reports.

Exit codes: 0 when every non-flagged assertion passes, 1 on any failed
assertion, 2 on a configuration or I/O error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
import time
from dataclasses import asdict, dataclass, field as dc_field
from typing import Callable

from ._parallel import pmap
from .exactla import QQ, Field, parse_field
from .gradedcomplex import CohomologyTable, Window, cohomology, tensor
from .monomialalg import F2, augmentation_certificate, verify_exactness
from .polykoszul import (
    FPGradedModule,
    VariableSet,
    dual_koszul_complex,
    dual_koszul_free_complex,
    free_resolution_of_variable_quotient,
    graded_ext_k_R,
    koszul_complex,
    tensor_fp_module,
    tensor_free,
)
from .stability import ParameterSweep, mittag_leffler_check, stable_range_report, transition_vanishing_check
from .symcoalgebra import (
    acyclic_comodule_lc,
    acyclic_contramodule_lc,
    cohom_quotient,
    comodule_coresolution,
    contramodule_resolution,
    cotensor_subcomplex,
    exterior_zero_complex,
)

log = logging.getLogger("acyclica")

SCHEMA = "acyclica.report/1"
SUITES = ("koszul", "ext", "coresolution", "dual-koszul", "concentration", "stable-range", "mittag-leffler",
          "dress", "universal", "remark83")


class ConfigError(ValueError):
    pass


@dataclass
class SuiteConfig:
    suite: str = "all"
    field: str | None = None  # None: Fp:101, or F_2 for the universal suite
    m: int | None = None  # None: 3, or 2 for the concentration suite
    a: int = 4
    min_pos: int | None = None
    max_pos: int | None = None
    max_internal_degree: int = 8
    n_gens: int = 4
    max_length: int = 6
    trials: int = 100
    seed: int = 0
    out: str = "-"
    format: str = "json"

    def validate(self) -> "SuiteConfig":
        if self.suite != "all" and self.suite not in SUITES:
            raise ConfigError(f"unknown suite {self.suite!r}")
        try:
            self.field_obj
        except ValueError as e:
            raise ConfigError(str(e)) from None
        if self.format not in ("json", "csv"):
            raise ConfigError(f"unknown format {self.format!r}")
        for name in ("m", "a", "n_gens", "max_length"):
            if getattr(self, name) is not None and getattr(self, name) < 1:
                raise ConfigError(f"--{name.replace('_', '-')} must be >= 1")
        if self.max_internal_degree < 0 or self.trials < 0:
            raise ConfigError("--max-internal-degree and --trials must be >= 0")
        if self.min_pos is not None and self.max_pos is not None and self.min_pos > self.max_pos:
            raise ConfigError("--min-pos exceeds --max-pos")
        return self

    def m_or(self, default: int) -> int:
        return default if self.m is None else self.m

    @property
    def field_obj(self) -> Field:
        return parse_field(self.field or "Fp:101")

    def params(self) -> dict:
        d = asdict(self)
        d.pop("out")
        return d


@dataclass
class Report:
    config: dict
    suites: dict = dc_field(default_factory=dict)
    tables: list = dc_field(default_factory=list)  # (suite, check, CohomologyTable)
    timing: dict = dc_field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(s["pass"] for s in self.suites.values())

    def body(self) -> dict:
        return {
            "config": self.config,
            "suites": self.suites,
            "tables": [{"suite": s, "check": c, "table": t.to_json_obj()} for s, c, t in self.tables],
            "pass": self.passed,
        }


# ---------------------------------------------------------------------------
# suites


def _concentrated(H: CohomologyTable, expected: dict) -> bool:
    """Trusted nonzero cohomology equals ``expected`` {(n, t): dim} exactly."""
    return H.nonzero() == expected


def _summary(H: CohomologyTable) -> dict:
    return {"nonzero": [[n, t, k] for (n, t), k in H.nonzero().items()], "flagged": len(H.flagged)}


def suite_koszul(cfg: SuiteConfig, rep: Report) -> dict:
    out = {}
    # the configured field for every m, plus Q on the smallest cases
    runs = [(cfg.field_obj, m) for m in range(1, cfg.m_or(3) + 1)]
    if cfg.field_obj != QQ:
        runs += [(QQ, m) for m in range(1, min(cfg.m_or(3), 2) + 1)]
    for f, m in runs:
        B = VariableSet.standard(m)
        H = cohomology(koszul_complex(B, Window(-m, 0, 0, cfg.max_internal_degree), f))
        ok = _concentrated(H, {(0, 0): 1})
        out[f"m={m},field={f.name}"] = {**_summary(H), "pass": ok}
        rep.tables.append(("koszul", f"m={m},field={f.name}", H))
    return {"checks": out, "pass": all(c["pass"] for c in out.values())}


def suite_ext(cfg: SuiteConfig, rep: Report) -> dict:
    out = {}
    for m in range(1, cfg.m_or(3) + 1):
        B = VariableSet.standard(m)
        H = graded_ext_k_R(B, Window(0, m, -m, cfg.max_internal_degree), cfg.field_obj)
        ok = sorted(H.by_position()) == [m] and H.total() == 1
        out[f"m={m}"] = {**_summary(H), "position": m, "pass": ok}
        rep.tables.append(("ext", f"m={m}", H))
    return {"checks": out, "pass": all(c["pass"] for c in out.values())}


def suite_dual_koszul(cfg: SuiteConfig, rep: Report) -> dict:
    out = {}
    f = cfg.field_obj
    D = cfg.max_internal_degree
    m = cfg.m_or(3)
    for k in range(1, m + 1):
        H = cohomology(dual_koszul_complex(VariableSet.standard(k), Window(0, k, -k, D), f))
        out[f"R-dual,m={k}"] = {**_summary(H), "pass": sorted(H.by_position()) == [k] and H.total() == 1}
        rep.tables.append(("dual-koszul", f"R-dual,m={k}", H))
    for a in range(1, cfg.a + 1):
        H = cohomology(acyclic_comodule_lc(a).realize(Window(-a, 0, -a, D), f))
        out[f"comodule,a={a}"] = {**_summary(H), "pass": _concentrated(H, {(-a, -a): 1})}
        rep.tables.append(("dual-koszul", f"comodule,a={a}", H))
        H = cohomology(acyclic_contramodule_lc(a).realize(Window(0, a, -D, a), f))
        out[f"contramodule,a={a}"] = {**_summary(H), "pass": _concentrated(H, {(a, a): 1})}
        rep.tables.append(("dual-koszul", f"contramodule,a={a}", H))
    return {"checks": out, "pass": all(c["pass"] for c in out.values())}


def suite_coresolution(cfg: SuiteConfig, rep: Report) -> dict:
    out = {}
    f = cfg.field_obj
    D = cfg.max_internal_degree
    for a in range(1, cfg.a + 1):
        H = cohomology(comodule_coresolution(a, Window(-1, a, 0, D), f))
        out[f"comodule,a={a}"] = {**_summary(H), "pass": H.is_zero()}
        rep.tables.append(("coresolution", f"comodule,a={a}", H))
        H = cohomology(contramodule_resolution(a, Window(-a, 1, -D, 0), f))
        out[f"contramodule,a={a}"] = {**_summary(H), "pass": H.is_zero()}
        rep.tables.append(("coresolution", f"contramodule,a={a}", H))
    return {"checks": out, "pass": all(c["pass"] for c in out.values())}


def suite_concentration(cfg: SuiteConfig, rep: Report) -> dict:
    f = cfg.field_obj
    a = cfg.a
    m = min(cfg.m_or(2), a)
    D = cfg.max_internal_degree
    w_sub = Window(-a, 0, -a, D)
    sub, inc = cotensor_subcomplex(acyclic_comodule_lc(a), m, w_sub, f)
    Hs = cohomology(sub)
    oracle = cohomology(tensor(acyclic_comodule_lc(m).realize(Window(-m, 0, -m, D), f),
                               exterior_zero_complex(a - m, offset=m, dual=True, field=f)))
    by_pos = Hs.by_position()
    expected = {-m - q: _binom(a - m, q) for q in range(a - m + 1)}
    oracle_ok = all(Hs.get(n, t) == oracle.get(n, t) for n, t in Hs.trusted() if (n, t) not in oracle.flagged)
    sub_ok = by_pos == expected and all(n <= -m for n in by_pos) and oracle_ok and not inc.failures()
    w_quo = Window(0, a, -D, a)
    quo, proj = cohom_quotient(acyclic_contramodule_lc(a), m, w_quo, f)
    Hq = cohomology(quo)
    quo_ok = all(n >= m for n in Hq.by_position()) and Hq.total() > 0 and not proj.failures()
    rep.tables.append(("concentration", f"cotensor,a={a},m={m}", Hs))
    rep.tables.append(("concentration", f"cohom,a={a},m={m}", Hq))
    return {"checks": {
        f"cotensor,a={a},m={m}": {**_summary(Hs), "expected_by_position": {str(k): v for k, v in expected.items()},
                                  "kunneth_oracle_agrees": oracle_ok, "pass": sub_ok},
        f"cohom,a={a},m={m}": {**_summary(Hq), "pass": quo_ok},
    }, "pass": sub_ok and quo_ok}


def _binom(n, k):
    from math import comb

    return comb(n, k)


def suite_stable_range(cfg: SuiteConfig, rep: Report) -> dict:
    f = cfg.field_obj
    top = max(cfg.a, 5) if cfg.suite == "all" else cfg.a
    lo = -3 if cfg.min_pos is None else cfg.min_pos
    hi = 3 if cfg.max_pos is None else cfg.max_pos
    w = Window(lo, hi, -6, 6)
    asserted = [n for n in range(lo + 1, hi) if abs(n) <= 2] if cfg.min_pos is None and cfg.max_pos is None \
        else list(range(lo + 1, hi))
    params = tuple(range(1, top + 1))
    checks = {}
    for fam in ("comodule", "contramodule", "koszul-dual"):
        checks[fam] = stable_range_report(ParameterSweep(fam, params, w, field=f), asserted)
    checks["subcomplex"] = stable_range_report(ParameterSweep("subcomplex", params, w, a=top, field=f), asserted)
    checks["quotient"] = stable_range_report(ParameterSweep("quotient", params, w, a=top, field=f), asserted)
    trans = {}
    for fam in ("subcomplex", "quotient"):
        for m1 in range(1, top):
            for m2 in range(m1 + 1, top + 1):
                pos = [n for n in asserted if (n > -m2 if fam == "subcomplex" else n < m2)]
                trans[f"{fam},{m1}->{m2}"] = transition_vanishing_check(fam, m1, m2, top, w, f, pos)
    checks["transitions"] = {"results": trans, "pass": all(trans.values())}
    return {"checks": checks, "pass": all(c["pass"] for c in checks.values())}


def suite_mittag_leffler(cfg: SuiteConfig, rep: Report) -> dict:
    a = min(cfg.a, 3) if cfg.suite == "all" else cfg.a
    stages = tuple(range(1, a + 1))
    checks = {}
    for n in range(0, min(a, 2) + 1):
        r = mittag_leffler_check(n, a, stages, Window(n, n, n - cfg.max_internal_degree, n), cfg.field_obj)
        checks[f"n={n}"] = {"stages": r["stages"], "slices": len(r["rows"]),
                            "all_surjective": r["pass"], "pass": r["pass"]}
    return {"checks": checks, "pass": all(c["pass"] for c in checks.values())}


def suite_universal(cfg: SuiteConfig, rep: Report) -> dict:
    f = F2 if cfg.field is None else cfg.field_obj
    ex = verify_exactness(cfg.n_gens, cfg.max_length, f)
    aug = augmentation_certificate(cfg.n_gens, f)
    return {"checks": {"exactness": ex, "augmentation": aug}, "pass": ex["pass"] and aug["pass"]}


def _dress_trial(args):
    from .endotransfer import dress_trial

    field_name, seed = args
    f = parse_field(field_name)
    M = _dress_module(f)
    return dress_trial(M, seed, _dress_algebra(f))


_DRESS_CACHE: dict = {}


def _dress_module(f):
    from .endotransfer import truncated_cofree_module

    if ("M", f) not in _DRESS_CACHE:
        _DRESS_CACHE[("M", f)] = truncated_cofree_module(2, 2, 2, f)
    return _DRESS_CACHE[("M", f)]


def _dress_algebra(f):
    from .endotransfer import endomorphism_algebra

    if ("S", f) not in _DRESS_CACHE:
        _DRESS_CACHE[("S", f)] = endomorphism_algebra(_dress_module(f), opposite=True)
    return _DRESS_CACHE[("S", f)]


def trial_seeds(master: int, n: int) -> list[int]:
    return [master * 1_000_003 + i for i in range(n)]


def suite_dress(cfg: SuiteConfig, rep: Report) -> dict:
    from .endotransfer import (
        block_splittings,
        module_complex_from_labelled,
        noncontractibility_certificate,
        truncated_cofree_module,
        truncated_free_module,
    )
    from .symcoalgebra import comodule_coresolution_lc, contramodule_resolution_lc

    f = cfg.field_obj
    S = _dress_algebra(f)
    results = pmap(_dress_trial, [(f.name, s) for s in trial_seeds(cfg.seed, cfg.trials)])
    agree = sum(1 for r in results if r["agree"])
    ff = sum(1 for r in results if r["fully_faithful"])
    passed = sum(1 for r in results if r["pass"])
    contractible = sum(1 for r in results if r["contractible_in_addM"])
    transfer = {"trials": cfg.trials, "master_seed": cfg.seed, "agreements": agree, "fully_faithful": ff,
                "contractible_cases": contractible, "End_dim": S.dim,
                "failed_seeds": [r["seed"] for r in results if not r["pass"]], "pass": passed == cfg.trials}
    certs = {}
    for name, lc in (("comodule-coresolution", comodule_coresolution_lc(1, augmented=False)),
                     ("contramodule-resolution", contramodule_resolution_lc(1, augmented=False))):
        X = module_complex_from_labelled(lc, 2, f)
        unit = truncated_cofree_module(1, 2, 1, f).dim
        M = (truncated_cofree_module if lc.carrier == "cofree" else truncated_free_module)(1, 2, 2, f)
        X.splittings = block_splittings(X, M, unit)
        c = noncontractibility_certificate(M, X, seed=cfg.seed)
        certs[name] = {**(c.to_json_obj() if c else {"noncontractible": False}),
                       "pass": bool(c and c.noncontractible and c.fully_faithful)}
    return {"checks": {"transfer": transfer, "certificates": certs},
            "pass": transfer["pass"] and all(c["pass"] for c in certs.values())}


def suite_remark83(cfg: SuiteConfig, rep: Report) -> dict:
    f = cfg.field_obj
    B = VariableSet.standard(2)
    M = FPGradedModule.quotient_by_variables(B, [0])
    X = dual_koszul_free_complex(B)
    w = Window(-1, 2, -3, cfg.max_internal_degree)
    H1 = cohomology(tensor_fp_module(M, X, w, f))
    H2 = cohomology(tensor_free(free_resolution_of_variable_quotient(B, 0), X).realize(w, f))
    keys = set(H1.trusted()) & set(H2.trusted())
    ok = all(H1.get(*b) == H2.get(*b) for b in keys) and bool(keys)
    rep.tables.append(("remark83", "M(x)dualK", H1))
    rep.tables.append(("remark83", "G(x)dualK", H2))
    return {"checks": {"quasi-isomorphic": {"compared_bidegrees": len(keys), "M_side": _summary(H1),
                                            "G_side": _summary(H2), "pass": ok}}, "pass": ok}


RUNNERS: dict[str, Callable] = {
    "koszul": suite_koszul,
    "ext": suite_ext,
    "coresolution": suite_coresolution,
    "dual-koszul": suite_dual_koszul,
    "concentration": suite_concentration,
    "stable-range": suite_stable_range,
    "mittag-leffler": suite_mittag_leffler,
    "dress": suite_dress,
    "universal": suite_universal,
    "remark83": suite_remark83,
}


def run_suite(cfg: SuiteConfig) -> Report:
    cfg.validate()
    rep = Report(config=cfg.params())
    names = SUITES if cfg.suite == "all" else (cfg.suite,)
    for name in names:
        t0 = time.perf_counter()
        log.info("running suite %s", name)
        rep.suites[name] = RUNNERS[name](cfg, rep)
        rep.timing[name] = round(time.perf_counter() - t0, 3)
    return rep


# ---------------------------------------------------------------------------
# output


def _canon(x):
    if isinstance(x, dict):
        return {str(k): _canon(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_canon(v) for v in x]
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    return str(x)  # Fractions and field elements as exact strings


def canonical_body(rep: Report) -> str:
    return json.dumps(_canon(rep.body()), sort_keys=True, separators=(",", ":"))


def render(rep: Report, fmt: str) -> str:
    if fmt == "json":
        doc = {"schema": SCHEMA, "body": _canon(rep.body()), "timing": rep.timing}
        return json.dumps(doc, sort_keys=True, indent=1) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["kind", "suite", "check", "position", "internal_degree", "dim", "boundary_flag", "pass"])
    for s, c, t in rep.tables:
        for n, d, k, fl in t.rows():
            w.writerow(["table", s, c, n, d, k, int(fl), ""])
    for s, body in rep.suites.items():
        w.writerow(["verdict", s, "", "", "", "", "", int(body["pass"])])
    return buf.getvalue()


def emit_report(rep: Report, fmt: str, path: str) -> None:
    text = render(rep, fmt)
    if path in ("-", ""):
        sys.stdout.write(text)
        return
    with open(path, "w") as fh:
        fh.write(text)


def parse_csv_tables(text: str) -> dict:
    """(suite, check) -> CohomologyTable from a CSV report."""
    rows = list(csv.DictReader(io.StringIO(text)))
    grouped: dict = {}
    for r in rows:
        if r["kind"] != "table":
            continue
        grouped.setdefault((r["suite"], r["check"]), []).append(r)
    out = {}
    for key, rs in grouped.items():
        lines = ["position,internal_degree,dim,boundary_flag"]
        lines += [f"{r['position']},{r['internal_degree']},{r['dim']},{r['boundary_flag']}" for r in rs]
        out[key] = CohomologyTable.from_csv("\n".join(lines))
    return out


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="acyclica", description="Exact verification suites for acyclic complexes.")
    p.add_argument("--config", help="JSON file with the same keys as the flags")
    p.add_argument("--suite", choices=SUITES + ("all",))
    p.add_argument("--field", help='"Q" or "Fp:<p>" (default Fp:101)')
    p.add_argument("--m", type=int, help="number of polynomial variables / size of B")
    p.add_argument("--a", type=int, help="dimension of W")
    p.add_argument("--min-pos", type=int)
    p.add_argument("--max-pos", type=int)
    p.add_argument("--max-internal-degree", type=int)
    p.add_argument("--n-gens", type=int, help="N: generators x_0..x_N of the universal algebra")
    p.add_argument("--max-length", type=int, help="L: word length truncation")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="output path, - for stdout")
    p.add_argument("--format", choices=("json", "csv"))
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def config_from_args(ns: argparse.Namespace) -> SuiteConfig:
    values: dict = {}
    if ns.config:
        try:
            with open(ns.config) as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot read config: {e}") from None
        known = set(SuiteConfig.__dataclass_fields__)
        for k, v in raw.items():
            key = k.replace("-", "_")
            if key not in known:
                raise ConfigError(f"unknown config key {k!r}")
            values[key] = v
    for k, v in vars(ns).items():
        if k in ("config", "verbose") or v is None:
            continue
        values[k] = v
    try:
        return SuiteConfig(**values).validate()
    except TypeError as e:
        raise ConfigError(str(e)) from None


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = config_from_args(ns)
    except ConfigError as e:
        print(f"acyclica: error: {e}", file=sys.stderr)
        return 2
    rep = run_suite(cfg)
    try:
        emit_report(rep, cfg.format, cfg.out)
    except OSError as e:
        print(f"acyclica: cannot write report: {e}", file=sys.stderr)
        return 2
    return 0 if rep.passed else 1


if __name__ == "__main__":
    sys.exit(main())
