"""bqd: solve, certify and verify a x1^2 + b x1x2 + c x2^2 + d x1 + e x2 + f = 0."""
import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor

from .certify import (DirectCert, NotEquivalent, gen_equivalence_cert, gen_solvability_cert,
                      parse, serialize, serialize_equiv, verify_equivalence_cert,
                      verify_solvability_cert)
from .errors import CertificateInvalid, DomainError, ParseError, ResourceError
from .forms import QForm, cycle_of, is_reduced, principal_cycle, reduce
from .frontend import (NotFoundWithinBound, Solution, Unsolvable, brute_force_oracle,
                       from_normalized, normalize, solve)
from .pell import fundamental_solution, period_bound, period_mod

OK, NO, USAGE, RESOURCE = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _text(v):
    return json.dumps(v) if isinstance(v, str) and (" " in v or not v) else str(v)


def _emit(args, status, **fields):
    if status is not None:
        fields = dict(status=status, **fields)
    if args.json:
        print(json.dumps(fields))
    else:
        print(" ".join(_text(v) if k == "status" else f"{k}={_text(v)}" for k, v in fields.items()))


def _system(args, coeffs):
    if len(coeffs) != 6:
        raise UsageError("expected six coefficients a b c d e f")
    if args.mod < 1:
        raise UsageError("--mod must be positive")
    alpha = (args.alpha1, args.alpha2)
    if args.normalized:
        return from_normalized(tuple(coeffs), args.mod, alpha)
    return normalize(tuple(coeffs), args.mod, alpha)


def _form(args, coeffs):
    if len(coeffs) != 3:
        raise UsageError("a form takes three coefficients")
    a, b, c = coeffs
    if args.normalized:
        return QForm(a, b, c)
    if b % 2:
        raise UsageError("middle coefficient must be even (use --normalized for a b c)")
    return QForm(a, b // 2, c)


def cmd_solve(args):
    s = _system(args, args.coeffs)
    if args.brute_bound is not None:
        r = brute_force_oracle(s, args.brute_bound)
        if isinstance(r, NotFoundWithinBound):
            _emit(args, "NOT-FOUND", bound=r.bound)
            return NO
    else:
        r = solve(s)
    if isinstance(r, Unsolvable):
        _emit(args, "UNSOLVABLE", reason=r.reason)
        return NO
    if not isinstance(r, Solution):
        _emit(args, "SOLVABLE", certificate="infra")
        return OK
    _emit(args, "SOLVABLE", x1=r.x1, x2=r.x2)
    return OK


def cmd_certify(args):
    s = _system(args, args.coeffs)
    if args.fp_prec is not None and args.fp_prec < 8:
        raise UsageError("--fp-prec must be at least 8")
    c = gen_solvability_cert(s, force_cert=args.force_cert, start_prec=args.fp_prec or 64)
    if isinstance(c, Unsolvable):
        _emit(args, "UNSOLVABLE", reason=c.reason)
        return NO
    text = serialize(c)
    kind = "direct" if isinstance(c, DirectCert) else "infra"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
        _emit(args, "CERTIFIED", kind=kind, file=args.output)
    elif args.json:
        _emit(args, "CERTIFIED", kind=kind, certificate=text)
    else:
        sys.stdout.write(text)
    return OK


def _verify_one(job):
    s, path = job
    try:
        with open(path) as fh:
            cert = parse(fh.read())
    except (ParseError, UnicodeDecodeError) as exc:
        return path, False, "parse", str(exc)
    v = verify_solvability_cert(s, cert)
    return path, v.ok, v.reason, v.detail


def cmd_verify(args):
    s = _system(args, [int(x) for x in args.system.split()])
    jobs = [(s, p) for p in args.cert]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(args.jobs) as ex:
            results = list(ex.map(_verify_one, jobs))
    else:
        results = [_verify_one(j) for j in jobs]
    code = OK
    for path, ok, reason, detail in results:
        fields = {"file": path} if len(results) > 1 else {}
        if ok:
            _emit(args, "VALID", **fields)
        else:
            fields["reason"] = reason
            _emit(args, "INVALID", **fields)
            code = NO
    return code


def cmd_equiv(args):
    if len(args.coeffs) != 6:
        raise UsageError("expected two forms of three coefficients each")
    Q1, Q2 = _form(args, args.coeffs[:3]), _form(args, args.coeffs[3:])
    c = gen_equivalence_cert(Q1, Q2)
    if isinstance(c, NotEquivalent):
        _emit(args, "INEQUIVALENT", reason=c.reason)
        return NO
    v = verify_equivalence_cert(Q1, Q2, c)
    if not v:
        raise CertificateInvalid(v.reason, "generated equivalence certificate failed")
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(serialize_equiv(c))
    _emit(args, "EQUIVALENT", peak_bits=v.peak_bits)
    return OK


def cmd_cycle(args):
    if len(args.coeffs) == 1:
        cyc = principal_cycle(args.coeffs[0])
    else:
        Q = _form(args, args.coeffs)
        R = Q if is_reduced(Q) else reduce(Q)[0]
        cyc = cycle_of(R)
    # forms are printed in the same convention as the input
    forms = [list(Q) if args.normalized else [Q.a, 2 * Q.b, Q.c] for Q in cyc.forms]
    if args.json:
        print(json.dumps({"D": cyc.D, "length": cyc.period, "forms": forms}))
    else:
        print(f"D={cyc.D} length={cyc.period}")
        for i, Q in enumerate(forms):
            print(i, *Q)
    return OK


def cmd_pell(args):
    sol = fundamental_solution(args.D)
    fields = {"t1": sol.t1, "u1": sol.u1}
    if args.mod != 1:
        fields["period_mod"] = period_mod(sol, args.mod)
    _emit(args, None, **fields)
    return OK


def cmd_period(args):
    sol = fundamental_solution(args.D)
    P = period_mod(sol, args.m)
    fields = {"period_mod": P, "bound": period_bound(args.m)}
    _emit(args, None, **fields)
    return OK


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="one JSON object per output line")
    common.add_argument("--normalized", action="store_true",
                        help="coefficients already use the doubled-cross-term convention")

    sysopts = argparse.ArgumentParser(add_help=False)
    sysopts.add_argument("--mod", type=int, default=1, help="modulus gamma of the side condition")
    sysopts.add_argument("--alpha1", type=int, default=0)
    sysopts.add_argument("--alpha2", type=int, default=0)

    p = argparse.ArgumentParser(prog="bqd", description=__doc__)
    sub = p.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("solve", parents=[common, sysopts])
    s.add_argument("coeffs", nargs="+", type=int)
    s.add_argument("--brute-bound", type=int, help="exhaustive search up to this bound instead")
    s.set_defaults(fn=cmd_solve)

    s = sub.add_parser("certify", parents=[common, sysopts])
    s.add_argument("coeffs", nargs="+", type=int)
    s.add_argument("--force-cert", action="store_true", help="skip the direct-solution shortcut")
    s.add_argument("--fp-prec", type=int, help="starting floating-point precision")
    s.add_argument("-o", "--output")
    s.set_defaults(fn=cmd_certify)

    s = sub.add_parser("verify", parents=[common, sysopts])
    s.add_argument("-s", "--system", required=True, help='raw coefficients, e.g. "1 0 -61 0 0 1"')
    s.add_argument("-c", "--cert", required=True, nargs="+")
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(fn=cmd_verify)

    s = sub.add_parser("equiv", parents=[common])
    s.add_argument("coeffs", nargs="+", type=int, help="A1 B1 C1 A2 B2 C2")
    s.add_argument("-o", "--output")
    s.set_defaults(fn=cmd_equiv)

    s = sub.add_parser("cycle", parents=[common])
    s.add_argument("coeffs", nargs="+", type=int, help="D, or a form A B C")
    s.set_defaults(fn=cmd_cycle)

    s = sub.add_parser("pell", parents=[common])
    s.add_argument("D", type=int)
    s.add_argument("--mod", type=int, default=1)
    s.set_defaults(fn=cmd_pell)

    s = sub.add_parser("period", parents=[common])
    s.add_argument("D", type=int)
    s.add_argument("m", type=int)
    s.set_defaults(fn=cmd_period)
    return p


def run(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else USAGE
    try:
        return args.fn(args)
    except (UsageError, DomainError, ValueError) as exc:
        if isinstance(exc, (CertificateInvalid, ParseError)):
            print(f"bqd: invalid: {exc}", file=sys.stderr)
            return NO
        print(f"bqd: {exc}", file=sys.stderr)
        return USAGE
    except ResourceError as exc:
        print(f"bqd: resource limit: {exc}", file=sys.stderr)
        return RESOURCE
    except OSError as exc:
        print(f"bqd: {exc}", file=sys.stderr)
        return USAGE


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
