"""Command-line entry point.

Exit codes: 0 all checks pass, 1 a check failed, 2 usage error, 3 I/O error.
The default tolerance is 1e-9 and can be overridden by FRIEDLAB_TOL or --tol.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import random
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from friedlab import clifford_dirac as cd
from friedlab import eta_pipeline as ep
from friedlab import lattice_data as ld
from friedlab import zeta_engine as ze
from friedlab.errors import (FriedlabError, ParseError, SchemaVersionMismatch, UnknownPreset)
from friedlab.group_model import (CORRUPTIONS, build_preset, corrupt_model, model_from_pieces,
                                  preset_names, validate_model, PRESETS)
from friedlab.lie_characters import TorusElement
from friedlab.representations import (casimir_scalar, commutant_dim, decompose_by_b,
                                      find_admissible_metric, full_h_character,
                                      is_theta_invariant, parse_rep_spec, theta_twist)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


@dataclass
class Check:
    name: str
    status: str
    residual: float | None = None
    elapsed: float = 0.0
    detail: str = ""

    def as_dict(self) -> dict:
        return {"name": self.name, "status": self.status, "residual": self.residual,
                "elapsed": round(self.elapsed, 4), "detail": self.detail}


@dataclass
class RunReport:
    """Command echo plus per-check outcomes; 'info' entries never affect the exit code."""

    command: str
    checks: list = field(default_factory=list)
    data: dict = field(default_factory=dict)

    @property
    def exit_code(self) -> int:
        return EXIT_FAIL if any(c.status == "FAIL" for c in self.checks) else EXIT_OK

    def run(self, name: str, fn: Callable[[], tuple], tol: float | None = None):
        """Runs ``fn`` returning (ok or residual, detail) and records the outcome."""
        t0 = time.perf_counter()
        try:
            val, detail = fn()
        except FriedlabError as err:
            self.checks.append(Check(name, "FAIL", None, time.perf_counter() - t0,
                                     f"{type(err).__name__}: {err}"))
            return
        dt = time.perf_counter() - t0
        if isinstance(val, bool):
            self.checks.append(Check(name, "PASS" if val else "FAIL", None, dt, detail))
        else:
            res = float(val)
            ok = res <= (tol if tol is not None else 0.0)
            self.checks.append(Check(name, "PASS" if ok else "FAIL", res, dt, detail))

    def info(self, name: str, detail: str, residual: float | None = None):
        self.checks.append(Check(name, "info", residual, 0.0, detail))

    def as_dict(self) -> dict:
        return {"command": self.command, "exit_code": self.exit_code,
                "checks": [c.as_dict() for c in self.checks], "data": self.data}

    def render(self, as_json: bool) -> str:
        if as_json:
            return json.dumps(self.as_dict(), indent=2, default=str)
        lines = [f"# {self.command}"]
        for c in self.checks:
            res = "" if c.residual is None else f" residual={c.residual:.3e}"
            det = f"  {c.detail}" if c.detail else ""
            lines.append(f"{c.status:4s} {c.name}{res} ({c.elapsed:.3f}s){det}")
        for k, v in self.data.items():
            lines.append(f"{k}: {v}")
        lines.append(f"exit {self.exit_code}")
        return "\n".join(lines)


def default_tol() -> float:
    env = os.environ.get("FRIEDLAB_TOL")
    if env is None:
        return 1e-9
    try:
        return float(env)
    except ValueError as err:
        raise UsageError(f"FRIEDLAB_TOL is not a number: {env!r}") from err


def _preset(name: str):
    try:
        return build_preset(name)
    except UnknownPreset as err:
        raise UsageError(f"unknown preset {name!r}; choose from {preset_names()}") from err


def _rep(model, spec: str):
    try:
        rep = parse_rep_spec(model, spec)
    except (ValueError, ZeroDivisionError) as err:
        raise UsageError(f"bad rep spec {spec!r}: {err}") from err
    return rep


def _samples(seed: int, n: int, dt: int, db: int = 1) -> list:
    rng = random.Random(seed)
    out = []
    for _ in range(n):
        a = tuple(rng.uniform(0.05, 2.5) for _ in range(db))
        ang = tuple(rng.uniform(-math.pi, math.pi) for _ in range(dt))
        out.append(TorusElement(a, ang))
    return out


def _load(path: str):
    try:
        return ld.load_classes(path)
    except OSError as err:
        raise IOError(str(err)) from err


# commands ----------------------------------------------------------------------


def cmd_model(args, report: RunReport):
    if args.action == "list":
        report.data["presets"] = preset_names()
        return
    model = _preset(args.name)
    if args.action == "info":
        report.data.update({k: str(v) for k, v in model.describe().items()})
    elif args.action == "validate":
        target = model
        if args.corrupt:
            target = corrupt_model(model_from_pieces(model.name, PRESETS[model.name][0],
                                                     PRESETS[model.name][1]), args.corrupt)
        vr = validate_model(target)
        for name, ok, detail in vr.checks:
            report.checks.append(Check(name, "PASS" if ok else "FAIL", None, 0.0, detail))
    elif args.action == "export":
        report.data["model"] = json.dumps(model.describe(), default=str)


def cmd_rep(args, report: RunReport):
    model = _preset(args.preset)
    rep = _rep(model, args.rep)
    report.data["dim"] = rep.dim
    report.run("homomorphism", lambda: (rep.homomorphism_residual(), ""), 0.0)
    report.run("admissible_metric", lambda: (find_admissible_metric(rep) is not None, ""))
    report.run("casimir_scalar", lambda: (True, f"C = {casimir_scalar(rep)}"))
    report.data["theta_invariant"] = is_theta_invariant(rep)
    report.data["irreducible"] = commutant_dim(rep) == 1
    if model.delta == 1:
        blocks = decompose_by_b(rep)
        report.data["b_blocks"] = {str(b.beta): str(b.k_m_character) for b in blocks}


def _parthasarathy_checks(model, rep, report: RunReport, paths=("p", "uperp")):
    find_admissible_metric(rep)
    for path in paths:
        if path == "uperp" and (model.delta != 1 or model.n.shape[1] == 0):
            continue

        def run(path=path):
            cm = cd.p_clifford(model) if path == "p" else cd.uperp_clifford(model)
            return cd.verify_parthasarathy(cd.dirac_operator(rep, cm)), ""
        report.run(f"parthasarathy[{path}]", run, 0.0)


def cmd_dirac(args, report: RunReport):
    model = _preset(args.preset)
    rep = _rep(model, args.rep)
    paths = ("p", "uperp") if args.path == "both" else (args.path,)
    _parthasarathy_checks(model, rep, report, paths)


def _family(model, rep, augment: bool):
    mode = "direct" if model.zperp.shape[1] == 0 else "dirac"
    return ep.compute_eta_family(rep, mode, augment_theta=augment)


def _eta_checks(model, rep, report: RunReport, args, tol: float):
    holder = {}

    def build():
        holder["fam"] = _family(model, rep, args.augment_theta)
        return True, holder["fam"].mode
    report.run("eta_family", build)
    fam = holder.get("fam")
    if fam is None:
        return None
    fam_checks = ep.verify_family(fam)
    report.run("eta_beta_symmetry", lambda: (fam_checks["beta_symmetry"], ""))
    report.run("eta_casimir", lambda: (ep.verify_casimir_scalar_eta(fam), ""), 0.0)
    samples = _samples(args.seed, 100, model.dt)
    res = {}

    def ident():
        res["530"] = ep.verify_pointwise_identity(fam, samples)
        return res["530"][0], ""
    report.run("module_identity", ident)
    if "530" in res:
        report.run("trace_identity", lambda: (res["530"][1], "100 samples"), tol)
    report.run("localization", lambda: (ep.verify_localization(fam, samples[:20]), ""), tol)

    def hat():
        r = ep.verify_lift_identity(ep.compute_eta_hat(fam), fam.rep)
        return r.equal and r.w_invariant, ""
    report.run("eta_hat_identity", hat)
    report.data["eta"] = {str(b): (str(p), str(m)) for b, (p, m) in fam.entries.items()}
    report.data["sigma_eta"] = {str(b): str(s) for b, s in fam.sigma().items()}
    return fam


def cmd_eta(args, report: RunReport):
    model = _preset(args.preset)
    rep = _rep(model, args.rep)
    tol = args.tol
    if args.action == "compute":
        fam = _family(model, rep, args.augment_theta)
        report.data["mode"] = fam.mode
        report.data["eta"] = {str(b): (str(p), str(m)) for b, (p, m) in fam.entries.items()}
        report.data["sigma_eta"] = {str(b): str(s) for b, s in fam.sigma().items()}
    elif args.action == "verify":
        _eta_checks(model, rep, report, args, tol)
    elif args.action == "hat":
        fam = _family(model, rep, args.augment_theta)
        eh = ep.compute_eta_hat(fam)
        report.data["eta_hat"] = {str(b): str(k.character) for b, k in eh.entries.items()}
        r = ep.verify_lift_identity(eh, fam.rep)
        report.run("eta_hat_identity", lambda: (r.equal and r.w_invariant, str(r.diff or "")))


def _hc_checks(model, rep, report: RunReport):
    """Harish-Chandra comparison on each irreducible summand.

    The sign-consistent comparison B*(L,L) - B*(rho,rho) = -C^{g,rho} is a check;
    the comparison without the sign is reported as information.
    """
    from friedlab.representations import build_irrep

    summands = rep.label.split("++")
    for s in summands:
        s = s[: -len("+theta")] if s.endswith("+theta") else s
        r = _rep(model, s)
        if commutant_dim(r) != 1:
            continue
        out = {}

        def run(r=r):
            out["hc"] = ep.hc_casimir_crosscheck(r)
            return out["hc"].signed_residual, f"HC value {out['hc'].hc_value}"
        report.run(f"hc_casimir_signed[{s}]", run, 0.0)
        if "hc" in out:
            h = out["hc"]
            report.info(f"hc_casimir_literal[{s}]",
                        f"B*(L,L)-B*(rho,rho) = {h.hc_value}, C = {h.casimir}",
                        float(h.residual))


def cmd_verify_all(args, report: RunReport):
    tol = args.tol
    base = _preset(args.preset)
    model = base
    if args.corrupt:
        pieces, delta = PRESETS[base.name]
        model = corrupt_model(model_from_pieces(base.name, pieces, delta), args.corrupt)
    vr = validate_model(model)
    for name, ok, detail in vr.checks:
        report.checks.append(Check(f"model:{name}", "PASS" if ok else "FAIL", None, 0.0, detail))
    if not vr.passed:
        return
    rep = _rep(model, args.rep)
    _parthasarathy_checks(model, rep, report)
    report.run("kostant", lambda: (ep.kostant_checks(model).passed, ""))
    if model.delta == 1 and model.n.shape[1]:
        cm = cd.uperp_clifford(model)

        def spinor():
            got = cd.spinor_b_m_characters(cm, model)
            return got == cd.expected_spinor_graded(model) == cd.expected_spinor_twisted(model), ""
        report.run("spinor_decomposition", spinor)
        samples = _samples(args.seed, 100, model.dt)
        report.run("spinor_supertrace",
                   lambda: (max(cd.supertrace_determinant_check(cm, model, t)[0]
                                for t in samples), ""), tol)
    if model.delta == 1:
        if not is_theta_invariant(rep) and not args.augment_theta:
            report.info("eta", "representation is not theta-invariant; use --augment-theta")
        else:
            _eta_checks(model, rep, report, args, tol)
    _hc_checks(model, rep, report)


def _zeta_family(args):
    model = _preset(args.preset)
    rep = _rep(model, args.rep)
    return model, rep


def _series_out(series: ze.LogZetaSeries) -> list:
    return [[l, c.real, c.imag] for l, c in series.terms]


def cmd_zeta(args, report: RunReport):
    tol = args.tol
    if args.action in ("ruelle", "selberg", "factor-check", "conj-check"):
        if not args.classes:
            raise UsageError("--classes is required")
        cf = _load(args.classes)
        model, rep = _zeta_family(args)
        bad = [(r.id, r.problems()) for r in cf.records if r.problems() or r.holonomy.is_elliptic()]
        for rid, probs in bad:
            report.checks.append(Check(f"record:{rid}", "FAIL", None, 0.0,
                                       "; ".join(probs) or "elliptic"))
        if bad:
            return
        recs = cf.records
        if args.action == "ruelle":
            report.data["log_ruelle"] = _series_out(ze.ruelle_log_series(recs, full_h_character(rep)))
        elif args.action == "conj-check":
            report.run("conjugation_symmetry",
                       lambda: (ze.conjugation_symmetry_check(
                           recs, full_h_character(rep), full_h_character(theta_twist(rep))), ""),
                       max(tol, 1e-12))
        else:
            fam = _family(model, rep, args.augment_theta)
            if args.action == "selberg":
                report.data["log_selberg"] = {
                    str(b): _series_out(ze.selberg_log_series(recs, fam.eta(b), model))
                    for b in fam.betas() if b >= 0}
            else:
                chi = full_h_character(fam.rep)

                def one(r):
                    return ze.factorization_check([r], fam, chi)
                if args.parallel:
                    with ThreadPoolExecutor() as pool:
                        per = list(pool.map(one, recs))
                else:
                    per = [one(r) for r in recs]
                report.run("factorization", lambda: (max(per, default=0.0), f"{len(recs)} classes"),
                           max(tol, 1e-10))
                report.data["log_ruelle"] = _series_out(ze.ruelle_log_series(recs, chi))
    elif args.action == "orders":
        doc = _read_json(args.table)
        tab = ze.SpectrumTable.build([(Fraction(str(l)), p, q) for l, p, q in doc["rows"]])
        s_eta = Fraction(str(doc.get("sigma_eta", 0)))
        preds = ze.selberg_zero_predictions(tab, s_eta)
        report.data["zeros"] = [[str(z), o] for z, o in preds]
    elif args.action == "torsion":
        doc = _read_json(args.table)
        tabs = [ze.SpectrumTable.build([(Fraction(str(l)), p, q) for l, p, q in rows])
                for rows in doc["degrees"]]
        lead = ze.torsion_leading_term(tabs)
        report.data.update({"T_squared": str(lead.t_squared), "exponent": lead.exponent,
                            "euler": lead.euler})


def _read_json(path: str | None):
    if not path:
        raise UsageError("--table is required")
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as err:
        raise IOError(str(err)) from err
    except json.JSONDecodeError as err:
        raise ParseError(err.msg, err.lineno) from err


def cmd_lattice(args, report: RunReport):
    if args.action == "synth":
        cf = ld.synthesize_classes(args.seed, args.count, model=args.preset)
    elif args.action == "enumerate":
        gens = {"diag2": [[[2, 0], [0, Fraction(1, 2)]]],
                "free2": [[[3, 0], [0, Fraction(1, 3)]],
                          [[Fraction(5, 3), Fraction(4, 3)], [Fraction(4, 3), Fraction(5, 3)]]]}
        if args.gens not in gens:
            raise UsageError(f"unknown generator set {args.gens!r}; choose from {sorted(gens)}")
        cf = ld.enumerate_words(gens[args.gens], args.max_len)
    else:
        if not args.classes:
            raise UsageError("--classes is required")
        cf = _load(args.classes)
        report.run("schema", lambda: (True, f"{len(cf.records)} records"))
        return
    text = ld.dumps(cf)
    if args.out_file:
        try:
            with open(args.out_file, "w") as fh:
                fh.write(text)
        except OSError as err:
            raise IOError(str(err)) from err
        report.data["written"] = f"{args.out_file} ({len(cf.records)} records)"
    else:
        report.data["classes"] = text


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--preset", default="sl2c")
    common.add_argument("--rep", default="1,0++0,1")
    common.add_argument("--classes")
    common.add_argument("--tol", type=float, default=None)
    mode = common.add_mutually_exclusive_group()
    mode.add_argument("--exact", dest="exact", action="store_true", default=True)
    mode.add_argument("--float", dest="exact", action="store_false")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--json", action="store_true")
    common.add_argument("--parallel", action="store_true")
    common.add_argument("--augment-theta", action="store_true")

    p = argparse.ArgumentParser(prog="friedlab", description="Exact checks for rank-one zeta data.")
    sub = p.add_subparsers(dest="cmd", required=True)
    m = sub.add_parser("model", parents=[common])
    m.add_argument("action", choices=["list", "info", "validate", "export"])
    m.add_argument("name", nargs="?", default="sl2c")
    m.add_argument("--corrupt", choices=CORRUPTIONS)
    sub.add_parser("rep", parents=[common]).add_argument("action", choices=["info"])
    d = sub.add_parser("dirac", parents=[common])
    d.add_argument("action", choices=["check"])
    d.add_argument("--path", choices=["p", "uperp", "both"], default="both")
    sub.add_parser("eta", parents=[common]).add_argument("action",
                                                         choices=["compute", "verify", "hat"])
    z = sub.add_parser("zeta", parents=[common])
    z.add_argument("action", choices=["ruelle", "selberg", "factor-check", "conj-check",
                                      "orders", "torsion"])
    z.add_argument("--table")
    z.add_argument("--out", choices=["text", "json"], default="text")
    lat = sub.add_parser("lattice", parents=[common])
    lat.add_argument("action", choices=["synth", "enumerate", "validate"])
    lat.add_argument("--count", type=int, default=50)
    lat.add_argument("--gens", default="diag2")
    lat.add_argument("--max-len", type=int, default=6)
    lat.add_argument("--out-file")
    v = sub.add_parser("verify-all", parents=[common])
    v.add_argument("--corrupt", choices=CORRUPTIONS)
    return p


COMMANDS = {"model": cmd_model, "rep": cmd_rep, "dirac": cmd_dirac, "eta": cmd_eta,
            "zeta": cmd_zeta, "lattice": cmd_lattice, "verify-all": cmd_verify_all}


def main(argv: list | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return EXIT_USAGE if err.code else EXIT_OK
    as_json = args.json or getattr(args, "out", "text") == "json"
    report = RunReport(" ".join(["friedlab"] + list(argv if argv is not None else sys.argv[1:])))
    try:
        if args.tol is None:
            args.tol = default_tol()
        COMMANDS[args.cmd](args, report)
    except UsageError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (IOError, ParseError, SchemaVersionMismatch) as err:
        print(f"I/O error: {err}", file=sys.stderr)
        return EXIT_IO
    except FriedlabError as err:
        report.checks.append(Check(args.cmd, "FAIL", None, 0.0, f"{type(err).__name__}: {err}"))
    print(report.render(as_json))
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
