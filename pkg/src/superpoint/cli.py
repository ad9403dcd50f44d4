"""Command line front end.

    superpoint dims --n 4
    superpoint basis --n 3 --k 0 --which H
    superpoint bracket "dxi1" "xi1 dxi1"
    superpoint extend "xi1xi2 dxi1"
    superpoint defect "xi1 dxi2 - xi2 dxi1"
    superpoint verify lemma11 --n 4
    superpoint quotient "x3^2 xi1" --n 3

Exit codes: 0 success, 1 failed verification, 2 usage error.
"""

import argparse
import sys
from fractions import Fraction

from .derivations import bracket, extend
from .report import Report, dumps, format_table
from .textform import ParseError, format_derivation, format_element, parse_derivation, parse_element
from .vectorial import (
    DegenerateFormError,
    QuadraticForm,
    dh_basis,
    defect_formula,
    h_basis,
    hamiltonian_defect,
    proportionality,
    verify_jacobi,
    verify_lemma_1_1,
    w_basis,
    w_dimension,
)

VERIFICATIONS = ("lemma11", "lemma21", "waction", "dhaction", "jacobi")

DIMS_MAX_N = 12
KERNEL_MAX_N = 8


class UsageError(Exception):
    pass


def read_omega(source, n):
    """``standard`` or a file: n, then n rows of n rationals."""
    if source is None or source == "standard":
        return QuadraticForm.standard(n)
    try:
        with open(source, encoding="utf-8") as fh:
            tokens = fh.read().split()
    except OSError as exc:
        raise UsageError(f"cannot read omega file: {exc}") from exc
    try:
        m = int(tokens[0])
        vals = [Fraction(t) for t in tokens[1:]]
    except (IndexError, ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"malformed omega file {source!r}") from exc
    if len(vals) != m * m:
        raise UsageError(f"omega file declares n={m} but holds {len(vals)} entries")
    if m != n:
        raise UsageError(f"omega file has n={m}, command uses n={n}")
    try:
        return QuadraticForm([vals[i * m : (i + 1) * m] for i in range(m)])
    except (DegenerateFormError, ValueError) as exc:
        raise UsageError(str(exc)) from exc


def derivation_json(delta):
    return {
        "n": delta.n,
        "parity": delta.parity,
        "degree": delta.z_degree,
        "text": format_derivation(delta),
        "images_xi": [h.to_json() for h in delta.images_xi],
        "images_x": [h.to_json() for h in delta.images_x],
    }


def _check_n(n, low, high, what):
    if n is None:
        raise UsageError(f"{what} needs --n")
    if not low <= n <= high:
        raise UsageError(f"{what} supports {low} <= n <= {high}, got n={n}")


def _field(text, n):
    try:
        return parse_derivation(text, n)
    except ParseError as exc:
        raise UsageError(f"cannot parse {text!r}: {exc}") from exc


def _infer_n(args, *texts):
    if args.n is not None:
        return args.n
    from .textform import _max_index, tokenize

    try:
        return max(max(_max_index(tokenize(t)) for t in texts), 1)
    except ParseError as exc:
        raise UsageError(str(exc)) from exc


def cmd_dims(args):
    _check_n(args.n, 1, DIMS_MAX_N, "dims")
    n = args.n
    kernels = n <= KERNEL_MAX_N
    omega = read_omega(args.omega, n) if kernels else None
    report = Report("dims", n=n, omega=omega)
    for k in range(-1, n):
        row = {"k": k, "dimW": len(w_basis(n, k)) if kernels else w_dimension(n, k)}
        if kernels:
            row["dimH"] = h_basis(n, omega, k).dim
            row["dimDH"] = dh_basis(n, omega, k).dim
        report.layers.append(row)
    if args.format == "json":
        return dumps(report.to_json()), 0
    head = f"dims n={n} omega={omega.label() if omega else '-'}"
    if not kernels:
        head += f" (H and DH need n <= {KERNEL_MAX_N})"
    return head + "\n" + format_table(report.layers), 0


def cmd_basis(args):
    _check_n(args.n, 1, KERNEL_MAX_N, "basis")
    if args.k is None:
        raise UsageError("basis needs --k")
    n, k = args.n, args.k
    if args.which == "W":
        space = w_basis(n, k)
    else:
        omega = read_omega(args.omega, n)
        space = h_basis(n, omega, k) if args.which == "H" else dh_basis(n, omega, k)
    if args.format == "json":
        return dumps({"n": n, "k": k, "which": args.which, "dim": space.dim, "basis": [derivation_json(f) for f in space.basis]}), 0
    lines = [f"{args.which}_{k} n={n} dim={space.dim}"]
    lines += [format_derivation(f) for f in space.basis]
    return "\n".join(lines), 0


def cmd_bracket(args):
    n = _infer_n(args, args.lhs, args.rhs)
    a, b = _field(args.lhs, n), _field(args.rhs, n)
    if a.parity is None or b.parity is None:
        raise UsageError("bracket needs operands of definite parity")
    result = bracket(a, b)
    if args.format == "json":
        return dumps(derivation_json(result)), 0
    return format_derivation(result), 0


def cmd_extend(args):
    n = _infer_n(args, args.field)
    f = _field(args.field, n)
    if not hasattr(f, "images"):
        raise UsageError("extend expects a field on the superpoint (only ∂ξ terms)")
    result = extend(f)
    if args.format == "json":
        return dumps(derivation_json(result)), 0
    return format_derivation(result), 0


def cmd_defect(args):
    n = _infer_n(args, args.field)
    _check_n(n, 1, KERNEL_MAX_N, "defect")
    f = _field(args.field, n)
    if not hasattr(f, "images"):
        raise UsageError("defect expects a field on the superpoint (only ∂ξ terms)")
    omega = read_omega(args.omega, n)
    df = hamiltonian_defect(f, omega)
    agree = df == defect_formula(f, omega)
    c = proportionality(f, omega)
    if args.format == "json":
        out = {
            "n": n,
            "field": format_derivation(f),
            "defect": df.to_json(),
            "text": format_element(df),
            "formula_agrees": agree,
            "factor": None if c is None else str(c),
        }
        return dumps(out), 0
    lines = [f"defect {format_element(df)}", f"formula_agrees {'yes' if agree else 'no'}"]
    lines.append("in DH with factor " + str(c) if c is not None else "not in DH")
    return "\n".join(lines), 0


def cmd_quotient(args):
    from .quadric import QuotientError, divide_by_form

    n = _infer_n(args, args.element)
    omega = read_omega(args.omega, n)
    try:
        a = parse_element(args.element, n)
        q, r = divide_by_form(a, omega)
    except ParseError as exc:
        raise UsageError(f"cannot parse {args.element!r}: {exc}") from exc
    except QuotientError as exc:
        raise UsageError(str(exc)) from exc
    if args.format == "json":
        return dumps({"n": n, "normal_form": r.to_json(), "text": format_element(r), "quotient": format_element(q)}), 0
    return f"normal_form {format_element(r)}\nquotient {format_element(q)}", 0


def cmd_verify(args):
    from .quadric import verify_dh_action, verify_lemma_2_1, verify_quotient, verify_w_action

    which = args.which
    n = args.n
    charts = [args.chart] if args.chart is not None else None
    if charts and not 1 <= args.chart <= (n or 0):
        raise UsageError(f"--chart must lie in 1..n")
    if which == "lemma11":
        _check_n(n, 1, KERNEL_MAX_N, which)
        report = verify_lemma_1_1(n, read_omega(args.omega, n))
    elif which == "lemma21":
        _check_n(n, 2, KERNEL_MAX_N, which)
        report = verify_lemma_2_1(n, samples=args.samples, seed=args.seed, charts=charts)
    elif which == "waction":
        _check_n(n, 2, 5, which)
        report = verify_w_action(n, charts=charts)
    elif which == "dhaction":
        _check_n(n, 2, 6, which)
        omega = read_omega(args.omega, n)
        if not omega.is_diagonal():
            raise UsageError("dhaction reduces modulo omega and needs a diagonal form")
        report = verify_quotient(n, omega, trials=args.samples, seed=args.seed)
        report.name = "dhaction"
        report.extend(verify_dh_action(n, omega, seed=args.seed, trials=args.samples))
    else:
        _check_n(n, 1, KERNEL_MAX_N, which)
        report = verify_jacobi(n, samples=args.samples if args.samples_given else 500, seed=args.seed)
    text = dumps(report.to_json()) if args.format == "json" else report.to_text()
    return text, 0 if report.passed else 1


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, help="number of odd generators")
    common.add_argument("--k", type=int, help="Z-degree of a layer")
    common.add_argument("--omega", default="standard", help="'standard' or a file: n then n rows of rationals")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--samples", type=int, default=None)
    common.add_argument("--chart", type=int, default=None)
    common.add_argument("--out", default=None, help="write the output here instead of stdout")

    parser = argparse.ArgumentParser(prog="superpoint", description="Vector fields on the superpoint, exactly.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("dims", parents=[common], help="dimensions of W_n, H, DH per degree").set_defaults(func=cmd_dims)
    p = sub.add_parser("basis", parents=[common], help="basis of a graded layer")
    p.add_argument("--which", choices=("W", "H", "DH"), default="W")
    p.set_defaults(func=cmd_basis)
    p = sub.add_parser("bracket", parents=[common], help="superbracket of two fields")
    p.add_argument("lhs")
    p.add_argument("rhs")
    p.set_defaults(func=cmd_bracket)
    p = sub.add_parser("extend", parents=[common], help="extension commuting with d")
    p.add_argument("field")
    p.set_defaults(func=cmd_extend)
    p = sub.add_parser("defect", parents=[common], help="image of omega under the extension")
    p.add_argument("field")
    p.set_defaults(func=cmd_defect)
    p = sub.add_parser("verify", parents=[common], help="run a verification report")
    p.add_argument("which", choices=VERIFICATIONS)
    p.set_defaults(func=cmd_verify)
    p = sub.add_parser("quotient", parents=[common], help="normal form modulo omega")
    p.add_argument("element")
    p.set_defaults(func=cmd_quotient)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    args.samples_given = args.samples is not None
    if args.samples is None:
        args.samples = 20
    if args.samples < 1:
        parser.error("--samples must be positive")
    try:
        text, code = args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
