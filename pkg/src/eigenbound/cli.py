"""Command-line front end.

Exit codes: 0 success, 1 input error, 2 mathematical validation failure,
3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
import warnings
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .koiso_sakane import (KSData, KSDegenerate, KSError, ks_bound, ks_family_wq,
                           parse_int_list, table2)
from .moments import MomentTensor, moment_tensors
from .polytope import (PolytopeError, barycenter, check_delzant, check_fano_normalized,
                       parse_polytope, vertices)
from .presets import PRESET_NAMES, disc_moments, preset
from .rayleigh_ritz import (POTENTIAL_PRESETS, InvalidPotential, SpectrumError,
                            parse_potential, potential_preset, rayleigh_ritz_spectrum)
from .toric_bound import BoundError, bound_from_raw_moments, toric_bound

EXIT_OK, EXIT_INPUT, EXIT_MATH, EXIT_NUMERIC = 0, 1, 2, 3

log = logging.getLogger("eigenbound")

TABLE1_ROWS = (
    ("CP^1", "cp1"),
    ("CP^2", "cp2"),
    ("CP^1 x CP^1", "cp1xcp1"),
    ("CP^2 # 3(-CP^2)", "dp6"),
    ("P(O + O(1,-1))", "threefold"),
)

RAW_PRESETS = {"disc": disc_moments}


class NotConverged(RuntimeError):
    pass


@dataclass
class RunReport:
    command: list
    input_digest: str
    results: object
    version: str = __version__

    def to_dict(self) -> dict:
        return {"command": self.command, "input_digest": self.input_digest,
                "results": self.results, "version": self.version}


def fmt_float(x: float) -> str:
    return f"{x:.10g}"


def fmt_rational(q: Optional[Fraction], fallback: Optional[float] = None) -> str:
    if q is None:
        return fmt_float(fallback) if fallback is not None else "-"
    text = str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"
    return f"{text} (~{fmt_float(float(q))})"


def _digest(*chunks: bytes) -> str:
    h = hashlib.sha256()
    for c in chunks:
        h.update(c)
    return "sha256:" + h.hexdigest()


def _load_polytope(args):
    if getattr(args, "preset", None):
        p = preset(args.preset)
        blob = json.dumps(p.to_dict(), sort_keys=True).encode()
        return p, blob
    if not getattr(args, "polytope", None):
        raise PolytopeError("give a polytope file or --preset")
    try:
        blob = Path(args.polytope).read_bytes()
    except OSError as exc:
        raise PolytopeError(f"cannot read {args.polytope}: {exc}") from exc
    return parse_polytope(blob.decode("utf-8")), blob


def _emit(args, report: RunReport, text: str) -> None:
    if getattr(args, "json", False):
        print(json.dumps(report.to_dict(), indent=2))
    else:
        print(text)


def _threads(args) -> int:
    if getattr(args, "threads", None):
        return args.threads
    return int(os.environ.get("EIGENBOUND_THREADS", "1") or 1)


# ----------------------------------------------------------------------------
# commands
# ----------------------------------------------------------------------------

def cmd_bound_toric(args) -> RunReport:
    p, blob = _load_polytope(args)
    result = toric_bound(p, args.lam, recenter=args.recenter)
    payload = result.to_dict()
    lines = [f"polytope: {p.name or args.polytope}",
             f"lambda:   {fmt_float(args.lam)}",
             f"bound:    {fmt_rational(result.exact, result.bound)}",
             f"argmin a: [{', '.join(fmt_float(x) for x in result.argmin_a)}] (whitened)",
             f"raw dir:  [{', '.join(fmt_float(x) for x in result.raw_direction)}]"]
    return RunReport(list(args.argv), _digest(blob), {"kind": "toric_bound", **payload}), \
        "\n".join(lines)


def cmd_bound_raw(args) -> RunReport:
    if args.preset:
        m = RAW_PRESETS[args.preset]()
        blob = json.dumps(m.to_dict(), sort_keys=True).encode()
    else:
        if not args.moments:
            raise PolytopeError("give a moments file or --preset")
        try:
            blob = Path(args.moments).read_bytes()
            m = MomentTensor.from_dict(json.loads(blob))
        except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise PolytopeError(f"cannot read moments: {exc}") from exc
    result = bound_from_raw_moments(m, args.lam)
    text = f"bound: {fmt_rational(result.exact, result.bound)}"
    return RunReport(list(args.argv), _digest(blob), {"kind": "raw_bound", **result.to_dict()}), text


def _ks_text(label: str, res) -> str:
    ints = res.integrals
    lines = [label, f"  I0={ints.I0} I2={ints.I2} I3={ints.I3} I4={ints.I4}",
             f"  futaki integral: {res.futaki}",
             f"  bound: {fmt_rational(res.exact)}"]
    lines += [f"  warning: {w}" for w in res.warnings]
    return "\n".join(lines)


def _ks_run(data: KSData):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        res = ks_bound(data)
    for w in res.warnings:
        print(f"warning: {w}", file=sys.stderr)
    return res


def cmd_bound_ks(args) -> RunReport:
    try:
        n, p, q = parse_int_list(args.n), parse_int_list(args.p), parse_int_list(args.q)
    except ValueError as exc:
        raise KSError(f"bad integer list: {exc}") from exc
    data = KSData(tuple(n), tuple(p), tuple(q), args.lam)
    res = _ks_run(data)
    blob = json.dumps({"n": n, "p": p, "q": q}).encode()
    return RunReport(list(args.argv), _digest(blob), {"kind": "ks_bound", **res.to_dict()}), \
        _ks_text(f"Koiso-Sakane n={n} p={p} q={q}", res)


def cmd_bound_ks_family(args) -> RunReport:
    if args.table:
        rows = []
        lines = [f"{'N':>3} {'q':>3}  bound"]
        for N, q, res in table2(args.lam):
            rows.append({"N": N, "q": q, **res.to_dict()})
            lines.append(f"{N:>3} {q:>3}  {res.bound:.4f}  ({fmt_rational(res.exact)})")
        return RunReport(list(args.argv), _digest(b"table2"), {"kind": "ks_table", "rows": rows}), \
            "\n".join(lines)
    if args.N is None or args.q is None:
        raise KSError("give --N and --q, or --table")
    res = _ks_run(ks_family_wq(args.N, args.q, args.lam))
    blob = json.dumps({"N": args.N, "q": args.q}).encode()
    return RunReport(list(args.argv), _digest(blob), {"kind": "ks_bound", **res.to_dict()}), \
        _ks_text(f"W_(q,-q) N={args.N} q={args.q}", res)


def cmd_moments(args) -> RunReport:
    p, blob = _load_polytope(args)
    m = moment_tensors(p, args.max_degree)
    payload = {"kind": "moments", "max_degree": args.max_degree, **m.to_dict()}
    for key in ("t3", "t4"):
        if payload[key] is None:
            del payload[key]
    report = RunReport(list(args.argv), _digest(blob), payload)
    return report, json.dumps(report.to_dict()["results"], indent=2)


def cmd_spectrum(args) -> RunReport:
    p, blob = _load_polytope(args)
    if args.potential in POTENTIAL_PRESETS:
        pot = potential_preset(args.potential)
        pblob = args.potential.encode()
    else:
        try:
            pblob = Path(args.potential).read_bytes()
        except OSError as exc:
            raise SpectrumError(f"cannot read potential {args.potential}: {exc}") from exc
        pot = parse_potential(pblob.decode("utf-8"), p.dim)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        res = rayleigh_ritz_spectrum(p, pot, args.degree, args.tol,
                                     check_convergence=args.check_convergence,
                                     threads=_threads(args))
    rep = res.quadrature_report
    if not rep.get("converged", True):
        raise NotConverged(f"quadrature did not converge: {rep['cap_hits']} simplices at the "
                           f"depth cap, estimated error {rep['estimated_error']:.3g}")
    text = "eigenvalues: " + ", ".join(f"{x:.4f}" for x in res.eigenvalues)
    return RunReport(list(args.argv), _digest(blob, pblob), {"kind": "spectrum", **res.to_dict()}), text


def cmd_check(args) -> RunReport:
    p, blob = _load_polytope(args)
    if args.emit_polytope:
        print(json.dumps(p.to_dict(), indent=2))
        return None, None
    fano = check_fano_normalized(p)
    delz = check_delzant(p)
    verts = vertices(p)
    bc = barycenter(p)
    payload = {"kind": "check", "fano_normalized": fano.ok, "constants_equal": fano.constants_equal,
               "constants_one": fano.constants_one,
               "barycenter": [_qs(c) for c in bc], "delzant": delz.ok,
               "vertices": [[_qs(c) for c in v] for v in verts], "messages": fano.messages}
    lines = [f"Fano-normalized: {'yes' if fano.ok else 'no'}",
             f"barycenter: ({', '.join(_qs(c) for c in bc)})",
             f"Delzant: {'yes' if delz.ok else 'no'}",
             f"vertices: {len(verts)}"]
    lines += [f"note: {m}" for m in fano.messages]
    return RunReport(list(args.argv), _digest(blob), payload), "\n".join(lines)


def _qs(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def cmd_table1(args) -> RunReport:
    rows = []
    lines = [f"{'manifold':<18} {'upper bound':<28} method"]
    for label, name in TABLE1_ROWS:
        res = toric_bound(preset(name), args.lam)
        rows.append({"manifold": label, "preset": name, "method": "toric", "bound": res.bound,
                     "exact": None if res.exact is None else _qs(res.exact)})
        lines.append(f"{label:<18} {fmt_rational(res.exact, res.bound):<28} toric polytope")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        ks = ks_bound(ks_family_wq(1, 1, args.lam))
    rows.append({"manifold": "P(O + O(1,-1))", "preset": "threefold", "method": "koiso-sakane",
                 "bound": ks.bound, "exact": _qs(ks.exact)})
    lines.append(f"{'P(O + O(1,-1))':<18} {fmt_rational(ks.exact):<28} Koiso-Sakane integrals")
    lines.append("note: the Koiso-Sakane bound uses a test function invariant under a larger "
                 "symmetry group and is weaker than the toric bound")
    return RunReport(list(args.argv), _digest(b"table1"), {"kind": "table1", "rows": rows}), \
        "\n".join(lines)


# ----------------------------------------------------------------------------
# parser
# ----------------------------------------------------------------------------

def _add_polytope_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("polytope", nargs="?", help="polytope JSON file")
    p.add_argument("--preset", choices=PRESET_NAMES, help="built-in polytope")


def _add_common(p: argparse.ArgumentParser, lam: bool = True) -> None:
    p.add_argument("--json", action="store_true", help="emit a machine-readable run report")
    if lam:
        p.add_argument("--lambda", dest="lam", type=float, default=1.0,
                       help="Einstein constant (default 1, matching facet constants 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="eigenbound", description=__doc__.splitlines()[0])
    parser.add_argument("--threads", type=int, default=None,
                        help="worker threads for quadrature (default: $EIGENBOUND_THREADS or 1)")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    bound = sub.add_parser("bound", help="upper bounds for lambda_2")
    bsub = bound.add_subparsers(dest="kind", required=True)

    toric = bsub.add_parser("toric", help="toric Kähler-Einstein bound from a polytope")
    _add_polytope_args(toric)
    _add_common(toric)
    toric.add_argument("--recenter", action="store_true",
                       help="translate to the barycenter first (alters Fano normalisation)")
    toric.set_defaults(func=cmd_bound_toric)

    raw = bsub.add_parser("raw", help="the same bound from externally supplied moments")
    raw.add_argument("moments", nargs="?", help="moment tensor JSON file")
    raw.add_argument("--preset", choices=sorted(RAW_PRESETS))
    _add_common(raw)
    raw.set_defaults(func=cmd_bound_raw)

    ks = bsub.add_parser("ks", help="Koiso-Sakane bound from (n, p, q) data")
    ks.add_argument("--n", required=True, help="comma-separated factor dimensions")
    ks.add_argument("--p", required=True, help="comma-separated Chern indices")
    ks.add_argument("--q", required=True, help="comma-separated Euler class coefficients")
    _add_common(ks)
    ks.set_defaults(func=cmd_bound_ks)

    fam = bsub.add_parser("ks-family", help="the W_(q,-q) family over CP^N x CP^N")
    fam.add_argument("--N", type=int)
    fam.add_argument("--q", type=int)
    fam.add_argument("--table", action="store_true", help="sweep the standard (N, q) grid")
    _add_common(fam)
    fam.set_defaults(func=cmd_bound_ks_family)

    mom = sub.add_parser("moments", help="exact moments of a polytope as JSON")
    _add_polytope_args(mom)
    mom.add_argument("--max-degree", type=int, default=4, choices=(1, 2, 3, 4))
    _add_common(mom, lam=False)
    mom.set_defaults(func=cmd_moments)

    spec = sub.add_parser("spectrum", help="Rayleigh-Ritz spectrum for a symplectic potential")
    _add_polytope_args(spec)
    spec.add_argument("--potential", required=True,
                      help=f"potential JSON file or preset ({', '.join(POTENTIAL_PRESETS)})")
    spec.add_argument("--degree", type=int, default=2)
    spec.add_argument("--tol", type=float, default=1e-6)
    spec.add_argument("--check-convergence", action="store_true")
    _add_common(spec, lam=False)
    spec.set_defaults(func=cmd_spectrum)

    chk = sub.add_parser("check", help="Fano normalisation and Delzant diagnostics")
    _add_polytope_args(chk)
    chk.add_argument("--emit-polytope", action="store_true",
                     help="print the polytope as JSON and exit")
    _add_common(chk, lam=False)
    chk.set_defaults(func=cmd_check)

    t1 = sub.add_parser("table1", help="upper bounds for the standard toric examples")
    _add_common(t1)
    t1.set_defaults(func=cmd_table1)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    args.argv = ["eigenbound", *argv]
    logging.basicConfig(level=logging.WARNING, format="warning: %(message)s")
    try:
        report, text = args.func(args)
    except (BoundError, KSDegenerate, InvalidPotential) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MATH
    except (PolytopeError, KSError, SpectrumError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NotConverged as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    if report is not None:
        _emit(args, report, text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
