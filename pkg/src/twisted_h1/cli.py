"""Command-line driver: ``twisted-h1 {compute-h1, decide, verify}``.

Exit codes: 0 complete/decided/passed, 2 incomplete/undecided, 1 numerical
or mathematical error, 64 usage or configuration error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .automorphism import (
    LATTICE,
    Automorphism,
    is_one_semisimple,
    make_automorphism,
    order_of,
    rank_tolerance,
)
from .cohomology import COMPLETE, H1Config, compute_h1, decide_cohomologous_Z, torus_h1_Z
from .errors import ConfigError, NotOneSemisimple, TwistedH1Error, UnsupportedFamily
from .fixed_torus import maximal_torus_in_fixed
from .group_model import DEFAULT_MEMBERSHIP_TOL, GroupDescriptor, make_group
from .serialization import (
    decode_complex_matrix,
    decode_fraction,
    encode_complex_matrix,
    encode_fraction,
    to_jsonable,
)
from .twisted_conjugacy import (
    DEFAULT_RESTARTS,
    DEFAULT_WITNESS_TOL,
    UNDECIDED,
    are_sigma_conjugate,
    verify_witness,
)
from .verifier import SUITES, run_suite

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INCOMPLETE = 2
EXIT_USAGE = 64

DEFAULT_RANK_THRESHOLD = 1e-8
DEFAULT_BUDGET = 8


class UsageError(Exception):
    pass


# --------------------------------------------------------------------------
# scenario configuration


def _check_keys(d, allowed, where):
    if not isinstance(d, dict):
        raise ConfigError(f"{where}: expected an object")
    extra = set(d) - set(allowed)
    if extra:
        raise ConfigError(f"{where}: unknown field(s) {sorted(extra)}")


def _parse_group(d) -> dict:
    if isinstance(d, dict) and "product" in d:
        _check_keys(d, {"product"}, "group")
        if not isinstance(d["product"], list) or not d["product"]:
            raise ConfigError("group.product must be a non-empty list")
        return {"product": [_parse_group(x) for x in d["product"]]}
    _check_keys(d, {"family", "n_or_k"}, "group")
    if "family" not in d or "n_or_k" not in d:
        raise ConfigError("group needs 'family' and 'n_or_k'")
    if not isinstance(d["n_or_k"], int) or isinstance(d["n_or_k"], bool):
        raise ConfigError("group.n_or_k must be an integer")
    return {"family": str(d["family"]), "n_or_k": d["n_or_k"]}


def _build_group(d: dict, membership_tol: float) -> GroupDescriptor:
    if "product" in d:
        factors = [_build_group(x, membership_tol) for x in d["product"]]
        return make_group("product", factors, membership_tol)
    return make_group(d["family"], d["n_or_k"], membership_tol)


def _parse_entry(x):
    if isinstance(x, (list, tuple)) and len(x) == 2 and all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in x):
        return complex(x[0], x[1])
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        return x
    raise ConfigError(f"bad matrix entry {x!r}")


def _parse_matrix(rows, integer: bool) -> list:
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise ConfigError("matrix must be a list of rows")
    if integer:
        if not all(isinstance(v, int) and not isinstance(v, bool) for r in rows for v in r):
            raise ConfigError("lattice matrices take plain integers")
        return [list(r) for r in rows]
    return [[_parse_entry(v) for v in r] for r in rows]


def _encode_matrix(M: list, integer: bool) -> list:
    if integer:
        return M
    return encode_complex_matrix(np.array(M, dtype=complex))


def _parse_coordinate(x):
    if isinstance(x, dict):
        _check_keys(x, {"num", "den"}, "coordinate")
        return decode_fraction(x)
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        return x
    raise ConfigError(f"bad torus coordinate {x!r}")


def _parse_point(x):
    """A pair member: a list of torus coordinates (turns), or {"matrix": ...}."""
    if isinstance(x, dict):
        _check_keys(x, {"matrix"}, "pair member")
        return {"matrix": decode_complex_matrix(_parse_matrix(x["matrix"], False))}
    if isinstance(x, list):
        return {"coords": [_parse_coordinate(v) for v in x]}
    raise ConfigError(f"bad pair member {x!r}")


def _encode_point(p: dict):
    if "matrix" in p:
        return {"matrix": encode_complex_matrix(p["matrix"])}
    return [encode_fraction(c) if isinstance(c, Fraction) else float(c) for c in p["coords"]]


@dataclass
class ScenarioConfig:
    group: dict
    automorphism: dict
    action: dict = field(default_factory=dict)
    pairs: list = field(default_factory=list)
    tolerances: dict = field(default_factory=dict)
    search: dict = field(default_factory=dict)
    seed: int = 0

    FIELDS = ("group", "automorphism", "action", "pairs", "tolerances", "search", "seed")

    @classmethod
    def from_dict(cls, d: dict) -> "ScenarioConfig":
        _check_keys(d, cls.FIELDS, "config")
        for key in ("group", "automorphism"):
            if key not in d:
                raise ConfigError(f"config needs '{key}'")
        group = _parse_group(d["group"])
        a = d["automorphism"]
        _check_keys(a, {"kind", "matrix"}, "automorphism")
        if "kind" not in a or "matrix" not in a:
            raise ConfigError("automorphism needs 'kind' and 'matrix'")
        kind = str(a["kind"]).lower()
        if kind not in ("hol", "antihol", "lattice"):
            raise ConfigError(f"unknown automorphism kind {a['kind']!r}")
        auto = {"kind": kind, "matrix": _parse_matrix(a["matrix"], kind == LATTICE)}

        action = d.get("action", {"cyclic": None})
        _check_keys(action, {"cyclic", "integers"}, "action")
        if len(action) != 1:
            raise ConfigError("action is either {cyclic: n} or {integers: true}")
        if "integers" in action:
            if action["integers"] is not True:
                raise ConfigError("action.integers must be true")
        else:
            c = action["cyclic"]
            if c is not None and (not isinstance(c, int) or isinstance(c, bool) or c < 1):
                raise ConfigError("action.cyclic must be a positive integer")
            action = {"cyclic": c}

        pairs = d.get("pairs", [])
        if not isinstance(pairs, list):
            raise ConfigError("pairs must be a list")
        parsed_pairs = []
        for p in pairs:
            if not isinstance(p, list) or len(p) != 2:
                raise ConfigError("each pair has exactly two members")
            parsed_pairs.append([_parse_point(p[0]), _parse_point(p[1])])

        tol = d.get("tolerances", {})
        _check_keys(tol, {"membership", "witness", "rank_threshold"}, "tolerances")
        tolerances = {
            "membership": float(tol.get("membership", DEFAULT_MEMBERSHIP_TOL)),
            "witness": float(tol.get("witness", DEFAULT_WITNESS_TOL)),
            "rank_threshold": float(tol.get("rank_threshold", DEFAULT_RANK_THRESHOLD)),
        }
        if not all(v > 0 for v in tolerances.values()):
            raise ConfigError("tolerances must be positive")
        s = d.get("search", {})
        _check_keys(s, {"restarts", "budget"}, "search")
        search = {"restarts": int(s.get("restarts", DEFAULT_RESTARTS)),
                  "budget": int(s.get("budget", DEFAULT_BUDGET))}
        if search["restarts"] < 1 or search["budget"] < 1:
            raise ConfigError("search.restarts and search.budget must be positive")
        seed = d.get("seed", 0)
        if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
            raise ConfigError("seed must be an unsigned integer")
        return cls(group, auto, action, parsed_pairs, tolerances, search, seed)

    @classmethod
    def from_json(cls, text: str) -> "ScenarioConfig":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc}") from None
        return cls.from_dict(d)

    def to_dict(self) -> dict:
        return {
            "group": self.group,
            "automorphism": {"kind": self.automorphism["kind"],
                             "matrix": _encode_matrix(self.automorphism["matrix"],
                                                      self.automorphism["kind"] == LATTICE)},
            "action": dict(self.action),
            "pairs": [[_encode_point(a), _encode_point(b)] for a, b in self.pairs],
            "tolerances": dict(self.tolerances),
            "search": dict(self.search),
            "seed": self.seed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @property
    def integers(self) -> bool:
        return "integers" in self.action

    def build(self) -> Automorphism:
        G = _build_group(self.group, self.tolerances["membership"])
        kind = self.automorphism["kind"]
        M = self.automorphism["matrix"]
        M = np.array(M, dtype=object) if kind == LATTICE else np.array(M, dtype=complex)
        return make_automorphism(G, kind, M, seed=self.seed)

    def h1_config(self) -> H1Config:
        return H1Config(restarts=self.search["restarts"], witness_tol=self.tolerances["witness"],
                        budget=self.search["budget"], seed=self.seed)


def load_config(path: str) -> ScenarioConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    return ScenarioConfig.from_json(text)


def apply_flags(cfg: ScenarioConfig, args) -> ScenarioConfig:
    if args.seed is not None:
        cfg.seed = args.seed
    if args.tol is not None:
        cfg.tolerances["witness"] = args.tol
    if args.restarts is not None:
        cfg.search["restarts"] = args.restarts
    return cfg


# --------------------------------------------------------------------------
# report building


def _point_record(p) -> dict:
    return {"index": p.index, "coords": [encode_fraction(c) for c in p.coords],
            "matrix": encode_complex_matrix(p.element.matrix)}


def _certificate_record(pair, cert) -> dict:
    rec = {"pair": list(pair)}
    rec.update(to_jsonable(cert))
    return rec


def h1_report(cfg: ScenarioConfig, R) -> dict:
    classes = []
    for c in R.classes:
        classes.append({
            "representative": c.representative.index,
            "representative_coords": [encode_fraction(x) for x in c.representative.coords],
            "members": [p.index for p in c.members],
            "witnesses": [{"pair": list(pair), "matrix": encode_complex_matrix(g),
                           "residual": verify_witness(R.points[pair[0]].element,
                                                      R.points[pair[1]].element,
                                                      R.automorphism, g)}
                          for pair, g in c.witnesses],
            "certificates": [_certificate_record(pair, cert) for pair, cert in c.certificates],
        })
    return {
        "torus_rank": R.torus_rank,
        "torsion_count": len(R.points),
        "class_count": R.class_count,
        "points": [_point_record(p) for p in R.points],
        "classes": classes,
        "status": R.status,
        "unresolved": [list(u) for u in R.unresolved],
        "weyl": {"generators": len(R.weyl.generators),
                 "permutation_group_order": R.weyl.permutation_group_order,
                 "saturated": R.weyl.saturated, "researched": R.weyl.researched},
    }


def decision_record(d) -> dict:
    return {
        "verdict": d.verdict,
        "witness": None if d.witness is None else encode_complex_matrix(d.witness),
        "residual": d.best_residual,
        "certificate": None if d.certificate is None else to_jsonable(d.certificate),
        "method": d.method,
        "restarts_used": d.restarts_used,
    }


def _pair_matrix(p: dict, sigma: Automorphism, torus_cache: dict) -> np.ndarray:
    if "matrix" in p:
        return np.asarray(p["matrix"], dtype=complex)
    G = sigma.group
    y = np.array([float(c) for c in p["coords"]])
    if G.family == "T":
        if y.size != G.param:
            raise ConfigError(f"expected {G.param} torus coordinates")
        return np.diag(np.exp(2j * np.pi * y))
    if "T" not in torus_cache:
        torus_cache["T"] = maximal_torus_in_fixed(sigma, 0)
    T = torus_cache["T"]
    if y.size != T.rank:
        raise ConfigError(f"expected {T.rank} fixed-torus coordinates")
    return T.point(y)


def verify_report_witnesses(report: dict) -> list[dict]:
    """Recompute every witness residual from a report's own contents."""
    cfg = ScenarioConfig.from_dict(report["config"])
    sigma = cfg.build()
    tol = cfg.tolerances["witness"]
    out = []
    if "points" in report:
        mats = {p["index"]: decode_complex_matrix(p["matrix"]) for p in report["points"]}
        for c in report["classes"]:
            for w in c["witnesses"]:
                i, j = w["pair"]
                r = verify_witness(mats[i], mats[j], sigma, decode_complex_matrix(w["matrix"]))
                out.append({"pair": [i, j], "residual": r, "ok": r <= tol})
    for k, rec in enumerate(report.get("decisions", [])):
        if rec["witness"] is None:
            continue
        a, b = (decode_complex_matrix(m) for m in rec["inputs"])
        r = verify_witness(a, b, sigma, decode_complex_matrix(rec["witness"]))
        out.append({"pair": k, "residual": r, "ok": r <= tol})
    return out


# --------------------------------------------------------------------------
# commands


def cmd_compute_h1(cfg: ScenarioConfig) -> tuple[int, dict]:
    sigma = cfg.build()
    report = {"command": "compute-h1"}
    if cfg.integers:
        if not is_one_semisimple(sigma):
            raise NotOneSemisimple("not 1-semisimple")
        if sigma.kind != LATTICE:
            raise ConfigError("compute-h1 over the integers needs a lattice automorphism; "
                              "use decide for pairwise questions")
        info = torus_h1_Z(sigma)
        report.update({"torus_rank": sigma.group.param, "h1_dimension": info["dimension"],
                       "characters": info["characters"], "status": COMPLETE})
        return EXIT_OK, report
    order = order_of(sigma)
    n = cfg.action["cyclic"]
    if n is None:
        if order == math.inf:
            raise NotOneSemisimple("σ has infinite order; give action {integers: true}")
        n = int(order)
        cfg.action["cyclic"] = n
    R = compute_h1(sigma, n, cfg.h1_config())
    report.update(h1_report(cfg, R))
    return (EXIT_OK if R.status == COMPLETE else EXIT_INCOMPLETE), report


def cmd_decide(cfg: ScenarioConfig) -> tuple[int, dict]:
    sigma = cfg.build()
    if not cfg.integers and cfg.action["cyclic"] is None:
        order = order_of(sigma)
        cfg.action["cyclic"] = None if order == math.inf else int(order)
    h1 = cfg.h1_config()
    cache: dict = {}
    records = []
    for a, b in cfg.pairs:
        ta, tb = _pair_matrix(a, sigma, cache), _pair_matrix(b, sigma, cache)
        if cfg.integers:
            d = decide_cohomologous_Z(sigma, ta, tb, h1)
        else:
            if not is_one_semisimple(sigma):
                raise NotOneSemisimple("not 1-semisimple")
            d = are_sigma_conjugate(ta, tb, sigma, restarts=h1.restarts, seed=h1.seed,
                                    witness_tol=h1.witness_tol)
        rec = decision_record(d)
        rec["inputs"] = [encode_complex_matrix(ta), encode_complex_matrix(tb)]
        records.append(rec)
    undecided = sum(r["verdict"] == UNDECIDED for r in records)
    report = {"command": "decide", "decisions": records, "undecided": undecided}
    return (EXIT_OK if undecided == 0 else EXIT_INCOMPLETE), report


def cmd_verify(suite: str, args) -> tuple[int, dict]:
    if suite != "all" and suite not in SUITES:
        raise UsageError(f"unknown suite {suite!r}; choose from all, {', '.join(SUITES)}")
    seed = args.seed if args.seed is not None else 0
    h1 = H1Config(restarts=args.restarts or DEFAULT_RESTARTS,
                  witness_tol=args.tol or DEFAULT_WITNESS_TOL, seed=seed)
    reports = run_suite(suite, seed, h1)
    passed = all(r.passed for r in reports)
    out = {"command": "verify", "suite": suite, "seed": seed, "passed": passed,
           "reports": [r.to_dict() for r in reports]}
    return (EXIT_OK if passed else EXIT_ERROR), out


# --------------------------------------------------------------------------
# rendering


def render_text(report: dict) -> str:
    lines = []
    cmd = report.get("command")
    if "error" in report:
        lines.append(f"error: {report['error']['message']} ({report['error']['type']})")
    elif cmd == "compute-h1" and "classes" in report:
        lines.append(f"status          {report['status']}")
        lines.append(f"torus rank      {report['torus_rank']}")
        lines.append(f"|E_n(T)|        {report['torsion_count']}")
        lines.append(f"classes         {report['class_count']}")
        lines.append(f"|W| (on E_n)    {report['weyl']['permutation_group_order']}")
        for k, c in enumerate(report["classes"]):
            coords = ", ".join(f"{x['num']}/{x['den']}" for x in c["representative_coords"])
            lines.append(f"  [{k}] rep {c['representative']:>3} ({coords})  "
                         f"size {len(c['members'])}")
        if report["unresolved"]:
            lines.append(f"unresolved      {report['unresolved']}")
    elif cmd == "compute-h1":
        lines.append(f"status          {report['status']}")
        lines.append(f"H1 dimension    {report['h1_dimension']}")
        lines.append(f"characters      {report['characters']}")
    elif cmd == "decide":
        for k, rec in enumerate(report["decisions"]):
            lines.append(f"  pair {k:>3}  {rec['verdict']:<14} residual {rec['residual']:.3e}"
                         f"  via {rec['method']}")
    elif cmd == "verify":
        for r in report["reports"]:
            mark = "PASS" if r["passed"] else "FAIL"
            lines.append(f"[{mark}] {r['check_name']:<24} {r['inputs'].get('config', '')}")
        lines.append(f"{sum(r['passed'] for r in report['reports'])}/{len(report['reports'])}"
                     " checks passed")
    if "timing" in report:
        lines.append(f"time            {report['timing']['seconds']:.2f} s")
    return "\n".join(lines)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--tol", type=float, default=None, help="witness residual tolerance")
    common.add_argument("--restarts", type=int, default=None)
    common.add_argument("--json", metavar="PATH", default=None, help="write the report here")
    common.add_argument("--quiet", action="store_true")
    parser = _Parser(prog="twisted-h1", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    p = sub.add_parser("compute-h1", parents=[common], help="classify H1(Z/n, G)")
    p.add_argument("config")
    p = sub.add_parser("decide", parents=[common], help="decide the pairs in a config")
    p.add_argument("config")
    p = sub.add_parser("verify", parents=[common], help="run verification suites")
    p.add_argument("suite", help="all, " + ", ".join(SUITES))
    return parser


def run(argv: Optional[list] = None) -> tuple[int, dict]:
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    cfg = None
    try:
        if args.seed is not None and args.seed < 0:
            raise UsageError("--seed must be unsigned")
        if args.command == "verify":
            code, report = cmd_verify(args.suite, args)
        else:
            cfg = apply_flags(load_config(args.config), args)
            with rank_tolerance(cfg.tolerances["rank_threshold"]):
                if args.command == "compute-h1":
                    code, report = cmd_compute_h1(cfg)
                else:
                    code, report = cmd_decide(cfg)
    except (ConfigError, UnsupportedFamily, UsageError) as exc:
        code, report = EXIT_USAGE, {"command": args.command,
                                    "error": {"type": type(exc).__name__, "message": str(exc)}}
    except TwistedH1Error as exc:
        code, report = EXIT_ERROR, {"command": args.command,
                                    "error": {"type": type(exc).__name__, "message": str(exc)}}
    if cfg is not None:
        report["config"] = cfg.to_dict()
        report["seed"] = cfg.seed
    report["exit_code"] = code
    report["timing"] = {"seconds": time.perf_counter() - start}
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(to_jsonable(report), fh, sort_keys=True, indent=2)
            fh.write("\n")
    if not args.quiet:
        print(render_text(report))
    return code, report


def main(argv: Optional[list] = None) -> int:
    return run(argv)[0]


if __name__ == "__main__":
    sys.exit(main())
