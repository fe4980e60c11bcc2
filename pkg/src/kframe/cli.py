"""Command line interface: ``kframe inspect | dual | parseval | generate``.

Reports go to stdout as JSON, diagnostics to stderr. Exit status is 0 when
the command ran (whatever the verdicts), 2 for unreadable or malformed input
and 3 when an operation's precondition fails.
"""

from __future__ import annotations

import argparse
import os
import sys
import time

import numpy as np

from . import __version__
from .duality import check_dual, dual_is_jframe, minimal_norm_check, random_dual, w_range_criterion
from .errors import InfeasibleSpecError, PreconditionError, ShapeError
from .frames import FrameFamily, excess, frame_bounds
from .io import dumps_dilation, dumps_frame, dumps_report, file_digest, read_frame, write_frame
from .jframe import analyze_jframe, canonical_dual, check_canonical_dual, nullspace_splitting
from .krein import KreinSpace
from .parseval import (
    canonical_parseval,
    check_canonical_parseval,
    check_dilation,
    is_parseval,
    naimark_coefficient_check,
    naimark_dilate,
    parseval_check,
)
from .testgen import GenSpec, random_jframe

EXIT_OK, EXIT_PARSE, EXIT_PRECONDITION = 0, 2, 3


def resolve_seed(seed):
    """Explicit seed, else ``KFRAME_SEED``, else fresh entropy (recorded in the report)."""
    if seed is not None:
        return seed
    env = os.environ.get("KFRAME_SEED")
    if env:
        try:
            return int(env)
        except ValueError:
            raise ShapeError(f"KFRAME_SEED must be an integer, got {env!r}") from None
    return int(np.random.SeedSequence().entropy % 2**63)


def parse_signature(text):
    """``"++-"``, ``"+,+,-"`` or ``"1,1,-1"`` to a tuple of +-1."""
    text = text.strip()
    if text and set(text) <= {"+", "-"}:
        return tuple(1 if c == "+" else -1 for c in text)
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if tok in ("+", "+1", "1"):
            out.append(1)
        elif tok in ("-", "-1"):
            out.append(-1)
        else:
            raise ShapeError(f"bad signature entry {tok!r}")
    return tuple(out)


def _new_report(args, inputs):
    return {
        "command": args.command,
        "inputs": [{"path": str(p), "sha256": file_digest(p)} for p in inputs],
        "verdicts": {},
        "residuals": {},
        "tolerances": {"rtol": args.rtol, "tol": args.tol},
        "seed": None,
        "details": {},
        "diagnostics": [],
    }


def cmd_inspect(args, out):
    F = read_frame(args.frame)
    rep = _new_report(args, [args.frame])
    an = analyze_jframe(F, tol=args.rtol, rtol=args.rtol)
    rep["verdicts"] = {
        "is_jframe": an.is_jframe,
        "is_frame": frame_bounds(F, args.rtol) is not None,
        "class_plus": an.class_plus,
        "class_minus": an.class_minus,
    }
    det = {
        "signature": F.space.signature,
        "n": F.n,
        "signs": F.signs.astype(int),
        "self_products": F.self_products,
        "excess": excess(F, args.rtol),
        "frame_bounds": frame_bounds(F, args.rtol),
        "M_plus_basis": an.M_plus.basis,
        "M_minus_basis": an.M_minus.basis,
        "S": an.S,
        "S_plus": an.S_plus,
        "S_minus": an.S_minus,
        "Q": an.Q,
        "jframe_bounds": None if an.bounds is None else an.bounds._asdict(),
        "neutral_cone_angles": an.neutral_angles,
    }
    if an.is_jframe:
        split = nullspace_splitting(F)
        det["nullspace_splitting"] = split.values
        rep["verdicts"]["nullspace_splits"] = split.passed
        rep["residuals"]["commutation_kernel"] = split["commutation_residual_kernel"]
    rep["details"] = det
    rep["diagnostics"] = an.diagnostics
    return rep


def cmd_dual(args, out):
    F = read_frame(args.frame)
    inputs = [args.frame] + ([args.other] if args.other else [])
    rep = _new_report(args, inputs)
    if args.other:
        G = read_frame(args.other)
        d = check_dual(F, G, args.tol, args.rtol)
        if d.is_dual:
            d = dual_is_jframe(F, G, args.tol, args.rtol)
            wr = w_range_criterion(F, G, args.tol, args.rtol)
            rep["verdicts"]["w_range_criterion"] = wr.passed
            rep["residuals"].update({"w_leak_plus": wr["leak_plus"], "w_leak_minus": wr["leak_minus"]})
        rep["verdicts"].update(
            {
                "is_dual": d.is_dual,
                "signs_ok": d.signs_ok,
                "is_jframe_dual": d.is_jframe_dual,
                "trivial_intersection": d.trivial_intersection,
                "kernel_split": d.kernel_split_ok,
                "range_test": d.range_verdict,
            }
        )
        rep["residuals"].update(d.residuals)
        rep["details"] = {"N_plus_dim": d.N_plus.dim, "N_minus_dim": d.N_minus.dim}
        rep["diagnostics"] = d.diagnostics
    elif args.canonical:
        G = canonical_dual(F)
        chk = check_canonical_dual(F, args.tol)
        rep["verdicts"]["canonical_dual"] = chk.passed
        rep["residuals"]["operator"] = chk["operator_residual"]
        rep["details"] = dict(chk.values)
        _emit_family(G, args, rep)
    else:
        seed = resolve_seed(args.seed)
        rep["seed"] = seed
        rng = np.random.default_rng(seed)
        duals = [random_dual(F, rng) for _ in range(args.random)]
        mn = minimal_norm_check(F, duals, args.trials, rng, tol=1e-10)
        rep["verdicts"]["minimal_norm"] = mn.passed
        rep["residuals"]["worst_margin"] = mn["worst_margin"]
        rep["details"] = mn.values
    return rep


def _emit_family(G, args, rep):
    if args.output:
        write_frame(G, args.output)
        rep["details"]["output"] = str(args.output)
    else:
        rep["details"]["vectors"] = G.vectors.T


def cmd_parseval(args, out):
    F = read_frame(args.frame)
    rep = _new_report(args, [args.frame])
    if args.mode == "check":
        pc = parseval_check(F, args.tol)
        nc = naimark_coefficient_check(F, args.tol, args.rtol)
        rep["verdicts"] = {
            "is_parseval": is_parseval(F, args.tol),
            "operator_test": pc.passed,
            "coisometry_test": pc.values.get("coisometry_test", False),
            "projection_test": pc.values.get("projection_test", False),
            "coefficient_test": nc.passed,
            "tests_agree": pc["agree"] and nc["agrees_with_is_parseval"],
        }
        rep["residuals"] = {k: v for k, v in pc.values.items() if k.endswith("residual")}
        rep["residuals"]["coefficient"] = nc["residual"]
        rep["diagnostics"] = pc.diagnostics + nc.diagnostics
    elif args.mode == "canonical":
        chk = check_canonical_parseval(F, args.tol)
        rep["verdicts"]["canonical_parseval"] = chk.passed
        rep["residuals"]["operator"] = chk["operator_residual"]
        rep["details"] = dict(chk.values)
        _emit_family(canonical_parseval(F), args, rep)
    else:
        D = naimark_dilate(F, args.tol)
        chk = check_dilation(D, F, args.tol)
        rep["verdicts"]["dilation"] = chk.passed
        rep["residuals"] = {k: v for k, v in chk.values.items() if k != "projection_rank"}
        rep["details"] = {"projection_rank": chk["projection_rank"], "big_signature": D.big_space.signature}
        if args.output:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(dumps_dilation(D))
            rep["details"]["output"] = str(args.output)
    return rep


def cmd_generate(args, out):
    sig = parse_signature(args.signature)
    if args.dim is not None and args.dim != len(sig):
        raise ShapeError(f"--dim {args.dim} does not match signature length {len(sig)}")
    seed = resolve_seed(args.seed)
    p, q = sig.count(1), sig.count(-1)
    spec = GenSpec(len(sig), p, q, args.n_plus, args.n_minus, cond_cap=args.cond_cap, seed=seed)
    F = random_jframe(spec)
    if sig != F.space.signature:
        # the generator orders the signature as (+..+, -..-); permute coordinates
        order = np.argsort([0 if s > 0 else 1 for s in sig], kind="stable")
        T = np.empty_like(F.vectors)
        T[order] = F.vectors
        F = FrameFamily(KreinSpace(sig), T)
    an = analyze_jframe(F)
    if not an.is_jframe:  # pragma: no cover - generator self-validates
        raise InfeasibleSpecError("generated family failed J-frame validation")
    if not args.output:
        out.write(dumps_frame(F))
        return None
    write_frame(F, args.output)
    rep = _new_report(args, [])
    rep["seed"] = seed
    rep["verdicts"]["is_jframe"] = True
    rep["details"] = {"output": str(args.output), "excess": excess(F), "signature": sig, "n": F.n}
    return rep


def build_parser():
    ap = argparse.ArgumentParser(prog="kframe", description="Frames in finite-dimensional Krein spaces.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--rtol", type=float, default=1e-9, help="rank / definiteness tolerance (default 1e-9)")
    common.add_argument("--tol", type=float, default=1e-8, help="residual tolerance (default 1e-8)")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("inspect", parents=[common], help="classify a family and print its analysis")
    p.add_argument("frame")
    p.set_defaults(func=cmd_inspect)

    p = sub.add_parser("dual", parents=[common], help="check, build or sample dual families")
    p.add_argument("frame")
    p.add_argument("other", nargs="?", help="candidate dual family")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--canonical", action="store_true", help="compute the canonical dual")
    g.add_argument("--random", type=int, metavar="N", help="sample N duals and test norm minimality")
    p.add_argument("--seed", type=int)
    p.add_argument("--trials", type=int, default=20, help="random vectors per dual (default 20)")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_dual)

    p = sub.add_parser("parseval", parents=[common], help="Parseval tests, canonical Parseval frame, dilation")
    m = p.add_mutually_exclusive_group(required=True)
    m.add_argument("--check", dest="mode", action="store_const", const="check")
    m.add_argument("--canonical", dest="mode", action="store_const", const="canonical")
    m.add_argument("--dilate", dest="mode", action="store_const", const="dilate")
    p.add_argument("frame")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_parseval)

    p = sub.add_parser("generate", parents=[common], help="write a random J-frame")
    p.add_argument("--dim", type=int)
    p.add_argument("--signature", required=True, help='e.g. "++-" or "1,1,-1"')
    p.add_argument("--n-plus", type=int, required=True)
    p.add_argument("--n-minus", type=int, required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--cond-cap", type=float, default=1e4)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_generate)
    return ap


def main(argv=None, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    if args.command == "dual" and sum(bool(x) for x in (args.other, args.canonical, args.random)) != 1:
        print("kframe dual: give exactly one of G, --canonical, --random N", file=stderr)
        return EXIT_PARSE
    t0 = time.perf_counter()
    try:
        rep = args.func(args, stdout)
    except (ShapeError, OSError) as exc:
        print(f"kframe {args.command}: {exc}", file=stderr)
        return EXIT_PARSE
    except PreconditionError as exc:
        print(f"kframe {args.command}: {exc}", file=stderr)
        return EXIT_PRECONDITION
    if rep is not None:
        rep["wall_time"] = time.perf_counter() - t0
        for line in rep.get("diagnostics", []):
            print(f"kframe {args.command}: {line}", file=stderr)
        stdout.write(dumps_report(rep))
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
