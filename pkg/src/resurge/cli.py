"""Command-line front end: ``resurge invariants|oracle|compare|profile|selftest``.

Exit codes: 0 success, 1 failed comparison or self-test, 2 invalid
configuration, 3 convergence failure (a partial record is still written).
"""

import argparse
import csv
import json
import math
import sys
import time
from pathlib import Path

from . import __version__, acceptance, alien, config, mp
from .cache import KernelCache, cache_dir
from .errors import ConfigError, ConvergenceError, InternalError
from .germ import from_descriptor, germ_data
from .horn import HornOracle
from .paths import gamma_tilde, polyline, segment_gamma_m

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_CONVERGENCE = 0, 1, 2, 3


class Run:
    """One CLI invocation: validated config, output directory, record and timings."""

    def __init__(self, cfg, quiet=False):
        self.cfg = cfg
        self.quiet = quiet
        self.out = Path(cfg["output"])
        self.record = config.record_header(cfg)
        self.timings = {}
        self._data = None
        root = cache_dir(self.out / "cache")
        self.cache = KernelCache(root) if root is not None else None

    def say(self, msg):
        if not self.quiet:
            print(msg, flush=True)

    @property
    def data(self):
        if self._data is None:
            spec = from_descriptor(self.cfg["germ"])
            self._data = germ_data(spec, self.cfg["D"], self.cfg["precision_bits"])
        return self._data

    def gamma(self, m):
        verts = self.cfg["path_override"]
        if verts is None:
            return segment_gamma_m(m)
        pts = [complex(a, b) for a, b in verts]
        if abs(pts[0] - 1) > 1e-12 or abs(pts[-1] - complex(1, 2 * math.pi * m)) > 1e-9:
            raise ConfigError("path_override must run from 1 to 1 + 2πim")
        # the end vertex is stored exactly as 1 + 2πim
        return polyline(pts[:-1] + [(1, m)])

    def timed(self, key, fn, *args, **kw):
        t = time.perf_counter()
        try:
            return fn(*args, **kw)
        finally:
            self.timings[key] = round(time.perf_counter() - t, 3)

    def write(self):
        self.out.mkdir(parents=True, exist_ok=True)
        with open(self.out / "record.json", "w", encoding="utf-8") as fh:
            json.dump(self.record, fh, indent=2, sort_keys=True, ensure_ascii=False)
            fh.write("\n")
        # wall-times vary from run to run, so they live outside the record
        with open(self.out / "timings.json", "w", encoding="utf-8") as fh:
            json.dump(self.timings, fh, indent=2, sort_keys=True)
            fh.write("\n")


# ------------------------------------------------------------------ commands

def cmd_invariants(run):
    cfg = run.cfg
    acfg = config.alien_config(cfg, run.cache)
    out = run.record.setdefault("residua", {})
    results = {}
    for m in cfg["m_list"]:
        try:
            res = run.timed(f"residua_m{m}", alien.residua, run.data, m, run.gamma(m), cfg["k_max"], acfg)
        except ConvergenceError as exc:
            partial = getattr(exc, "result", None)
            if partial is not None:
                out[str(m)] = partial.to_json(cfg["precision_bits"])
            raise
        out[str(m)] = res.to_json(cfg["precision_bits"])
        results[m] = res
        run.say(f"m = {m:+d}: S = {complex(res.total):.12g}, A_{-m:+d} = {complex(res.A):.12g} "
                f"({res.horn} horn), Λ = {res.lambda_fit:.3g}")
    return results


def cmd_oracle(run):
    orc = run.timed("oracle_setup", HornOracle, run.data.spec, config.oracle_config(run.cfg))
    out = run.record.setdefault("oracle", {})
    results = {}
    for side in ("up", "low"):
        fr = run.timed(f"oracle_{side}", orc.fourier, side)
        out[side] = fr.to_json()
        results[side] = fr
        run.out.mkdir(parents=True, exist_ok=True)
        with open(run.out / f"horn_{side}.csv", "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["X", "re_h", "im_h"])
            for x, h in fr.samples:
                w.writerow([repr(x), repr(h.real), repr(h.imag)])
        modes = ", ".join(f"A_{k:+d} = {v:.10g}" for k, v in sorted(fr.A.items()))
        run.say(f"{side} horn at |Im Z| = {fr.H:.4g}: const {fr.const_term:.6g} "
                f"(expected {fr.const_expected:.6g}); {modes or 'no modes above the noise floor'}")
    return results


def cmd_compare(run):
    res = cmd_invariants(run)
    four = cmd_oracle(run)
    tol = run.cfg["tolerance"]
    rows, ok = [], True
    for m, r in res.items():
        idx = -m
        fr = four["low" if m > 0 else "up"]
        A_or = fr.A.get(idx)
        A_res = complex(r.A)
        if A_or is None:
            rel, verdict = None, "NO-ORACLE"
            ok = False
        else:
            rel = abs(A_res - A_or) / abs(A_or)
            verdict = "PASS" if rel <= tol else "FAIL"
            ok = ok and verdict == "PASS"
        rows.append({"index": idx, "A_residua": [repr(A_res.real), repr(A_res.imag)],
                     "A_oracle": None if A_or is None else [repr(A_or.real), repr(A_or.imag)],
                     "rel_diff": rel, "verdict": verdict})
        run.say(f"A_{idx:+d}: residua {A_res:.10g} | oracle "
                f"{'n/a' if A_or is None else format(A_or, '.10g')} | rel {rel if rel is None else format(rel, '.2e')} "
                f"→ {verdict}")
    run.record["comparison"] = {"tolerance": tol, "rows": rows, "passed": ok}
    with open(run.out / "compare.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["index", "re_A_residua", "im_A_residua", "re_A_oracle", "im_A_oracle", "rel_diff", "verdict"])
        for r in rows:
            o = r["A_oracle"] or ["", ""]
            w.writerow([r["index"], *r["A_residua"], *o, "" if r["rel_diff"] is None else repr(r["rel_diff"]),
                        r["verdict"]])
    return ok


def cmd_profile(run, k):
    cfg = run.cfg
    m = cfg["m_list"][0]
    prec = cfg["precision_bits"]
    with mp.working(prec):
        omega = complex(mp.two_pi_i(prec) * m)
    path = gamma_tilde(run.gamma(m), omega)
    acfg = config.alien_config(cfg, run.cache)
    sysm = run.timed("profile_system", alien.VolterraSystem, run.data, m, path, acfg)
    G = sysm.levels(k)[k][0]
    g = sysm.grid
    inv = g.inv_expm1()
    starts = [0.0]
    for i in range(path.n_segments):
        starts.append(starts[-1] + abs(complex(path.vertices[i + 1]) - complex(path.vertices[i])))
    run.out.mkdir(parents=True, exist_ok=True)
    name = run.out / f"profile_m{m}_k{k}.csv"
    with open(name, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["s", "re_zeta", "im_zeta", "re_phi", "im_phi", "abs_phi"])
        for pan in g.panels:
            a = complex(path.vertices[pan.seg])
            for j in range(pan.start, pan.stop):
                z = complex(g.zeta[j])
                with mp.working(sysm.work):
                    v = complex(sysm.value(G[j]) * mp.from_acb(inv[j], sysm.work))
                w.writerow([repr(starts[pan.seg] + abs(z - a)), repr(z.real), repr(z.imag),
                            repr(v.real), repr(v.imag), repr(abs(v))])
    run.record["profile"] = {"m": m, "k": k, "file": name.name, "nodes": g.n}
    run.say(f"wrote {name} ({g.n} nodes)")


def cmd_selftest(only, quiet, out=None):
    lines = []
    report = None if quiet else (lambda s: (print(s, flush=True), lines.append(s)))
    checks = acceptance.run_all(only=only, report=report)
    ok = all(c.passed for c in checks)
    if out:
        Path(out).mkdir(parents=True, exist_ok=True)
        with open(Path(out) / "selftest.json", "w", encoding="utf-8") as fh:
            json.dump([{"criterion": c.number, "name": c.name, "passed": c.passed, "measured": c.measured,
                        "threshold": c.threshold, "detail": c.detail, "seconds": round(c.seconds, 3)}
                       for c in checks], fh, indent=2, ensure_ascii=False)
    if not quiet:
        print(f"{sum(c.passed for c in checks)}/{len(checks)} criteria passed")
    return EXIT_OK if ok else EXIT_FAIL


# ------------------------------------------------------------------ parsing

def _parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON run configuration")
    common.add_argument("--germ", help="preset name, used when no config file is given")
    common.add_argument("--m", type=int, action="append", help="singularity index (repeatable)")
    common.add_argument("--kmax", type=int, help="highest residuum level")
    common.add_argument("--precision", type=int, help="working precision in bits")
    common.add_argument("--out", metavar="DIR", help="output directory")
    common.add_argument("--quiet", action="store_true", help="print nothing but errors")
    p = argparse.ArgumentParser(prog="resurge", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"resurge {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("invariants", parents=[common], help="residua, their sums and the invariants A_{-m}")
    sub.add_parser("oracle", parents=[common], help="Fourier coefficients of the horn maps")
    sub.add_parser("compare", parents=[common], help="residua route against the horn oracle")
    pp = sub.add_parser("profile", parents=[common], help="CSV of the continued Borel image of Φ_k along the path")
    pp.add_argument("--k", type=int, default=0, help="level k (default 0)")
    st = sub.add_parser("selftest", parents=[common], help="run the acceptance suite")
    st.add_argument("--only", type=int, nargs="+", metavar="N", help="run only these criteria")
    return p


def build_config(args):
    raw = config.load(args.config) if args.config else {}
    if args.germ is not None:
        raw["germ"] = args.germ
    if "germ" not in raw:
        raise ConfigError("no germ given: pass --config or --germ")
    if args.m:
        raw["m_list"] = args.m
    if args.kmax is not None:
        raw["k_max"] = args.kmax
    if args.precision is not None:
        raw["precision_bits"] = args.precision
    if args.out is not None:
        raw["output"] = args.out
    return config.validate(raw)


def main(argv=None):
    args = _parser().parse_args(argv)
    if args.command == "selftest":
        return cmd_selftest(args.only, args.quiet, args.out)
    try:
        cfg = build_config(args)
    except ConfigError as exc:
        print(f"resurge: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    run = Run(cfg, args.quiet)
    code = EXIT_OK
    try:
        if args.command == "invariants":
            cmd_invariants(run)
        elif args.command == "oracle":
            cmd_oracle(run)
        elif args.command == "compare":
            code = EXIT_OK if cmd_compare(run) else EXIT_FAIL
        elif args.command == "profile":
            cmd_profile(run, args.k)
    except ConfigError as exc:
        print(f"resurge: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConvergenceError, InternalError) as exc:
        run.record["error"] = {"type": type(exc).__name__, "message": str(exc)}
        run.write()
        print(f"resurge: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    run.write()
    return code


if __name__ == "__main__":
    sys.exit(main())
