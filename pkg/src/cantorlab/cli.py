"""Command-line front end.

Single-lambda reports print ``key: value`` lines by default, or ``key,value``
rows / a JSON object with ``--format``.  ``scan`` streams one CSV row (or JSON
record) per rational ``p/q`` in ``(q, p)`` order.

Exit codes: 0 success, 2 usage or parse error, 3 resource guard, 4 internal
invariant violation.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from typing import Iterable, Iterator, TextIO

from . import __version__
from .affine import ACCEPTED, REJECTED, AffineMap, classify_affine, verify_affine_inclusion
from .errors import DomainError, NumericError, ResourceError
from .numeric import word_str
from .spectrum import spectrum_brute, spectrum_closed_form, spectrum_exact
from .structure import (
    hole_set,
    level_set,
    membership_exact,
    tss_check_depth,
    tss_exact,
    tss_witness,
    witness_overlap,
)
from .symbolic import (
    DEFAULT_TOL,
    build_sft,
    coding_graph,
    coding_multiplicity,
    dimension_residual,
    dimension_solve,
    sft_dimension,
)

EXIT_OK, EXIT_USAGE, EXIT_RESOURCE, EXIT_INVARIANT = 0, 2, 3, 4

SCAN_FIELDS = ("p", "q", "lambda", "spec_num", "spec_den", "is_tss", "witness_n", "state_count")

_RATIONAL = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")


class InvariantViolation(RuntimeError):
    pass


def parse_rational(text: str) -> Fraction:
    """Exact ``p/q`` or integer text.  Decimals are rejected on purpose."""
    m = _RATIONAL.match(text)
    if not m:
        raise argparse.ArgumentTypeError(f"expected an exact rational p/q, got {text!r}")
    num, den = int(m.group(1)), int(m.group(2) or 1)
    if den == 0:
        raise argparse.ArgumentTypeError(f"zero denominator in {text!r}")
    return Fraction(num, den)


def parse_lambda(text: str) -> Fraction:
    m = _RATIONAL.match(text)
    if not m or m.group(2) is None:
        raise argparse.ArgumentTypeError(f"lambda must be given as p/q, got {text!r}")
    p, q = int(m.group(1)), int(m.group(2))
    if not 0 < p < q:
        raise argparse.ArgumentTypeError(f"lambda = {text} needs 0 < p < q")
    return Fraction(p, q)


def parse_decimal(text: str) -> Fraction:
    try:
        value = Fraction(Decimal(text))
    except (InvalidOperation, ValueError):
        raise argparse.ArgumentTypeError(f"not a decimal number: {text!r}") from None
    if not 0 < value < 1:
        raise argparse.ArgumentTypeError(f"lambda = {text} must lie in (0, 1)")
    return value


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _nonneg_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {value}")
    return value


# -- report rendering -------------------------------------------------------------

def _jsonable(value):
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    return value


def _text(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, dict):
        return " ".join(f"{k}={_text(v)}" for k, v in value.items())
    return str(value)


def emit_report(record: dict, fmt: str, out: TextIO) -> None:
    if fmt == "json":
        json.dump(_jsonable(record), out, indent=2, ensure_ascii=False)
        out.write("\n")
    elif fmt == "csv":
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(("key", "value"))
        for key, value in record.items():
            writer.writerow((key, _text(value)))
    else:
        for key, value in record.items():
            out.write(f"{key}: {_text(value)}\n")


# -- commands ---------------------------------------------------------------------

def cmd_spectrum(args) -> dict:
    if args.approx is not None:
        lam = args.approx
        depth = args.brute or 12
        return {
            "lambda": lam,
            "exact": False,
            "brute_depth": depth,
            "upper_bound": spectrum_brute(lam, depth),
            "note": "decimal input: value is an upper bound for the spectrum, not an exact value",
        }
    if args.lam is None:
        raise DomainError("spectrum needs --lambda p/q or --approx DECIMAL")
    lam = args.lam
    res = spectrum_exact(lam)
    record = {
        "lambda": lam,
        "exact": True,
        "spectrum": res.value,
        "witness_i": word_str(res.witness_i),
        "witness_j": word_str(res.witness_j),
        "witness_n": res.witness_n,
        "state_count": res.state_count,
    }
    if args.brute is not None:
        brute = spectrum_brute(lam, args.brute)
        if brute < res.value:
            raise InvariantViolation(f"brute force {brute} below the exact spectrum {res.value}")
        record["brute_depth"] = args.brute
        record["brute"] = brute
    if args.closed_form:
        pred = spectrum_closed_form(lam)
        record["closed_form"] = pred if pred is not None else "n/a"
        if pred is not None and pred != res.value:
            raise InvariantViolation(f"closed form {pred} disagrees with {res.value}")
    return record


def cmd_tss(args) -> dict:
    lam = args.lam
    flag, m = tss_exact(lam)
    record = {"lambda": lam, "tss": flag}
    if flag:
        record["m"] = m
    else:
        k, i, j = tss_witness(lam)
        record["k"] = k
        record["witness_i"] = word_str(i)
        record["witness_j"] = word_str(j)
        record["witness_overlap"] = str(witness_overlap(lam, i, j))
    rep = tss_check_depth(lam, args.depth)
    record["depth"] = args.depth
    record["depth_check"] = "passed" if rep.verdict else "failed"
    if not rep.verdict:
        w = rep.witness
        record["fail_depth"] = rep.fail_depth
        record["depth_witness_i"] = word_str(w.i)
        record["depth_witness_j"] = word_str(w.j)
        record["depth_witness_overlap"] = str(w.overlap)
        if flag:
            raise InvariantViolation(f"lambda = {lam} is 1 - 3^-{m} but fails the depth check")
    return record


def cmd_dims(args) -> dict:
    m, tol = args.m, args.tol
    s = dimension_solve(m, "s", tol)
    t = dimension_solve(m, "t", tol)
    record = {
        "m": m,
        "s": s,
        "t": t,
        "residual_s": dimension_residual(m, s, "s"),
        "residual_t": dimension_residual(m, t, "t"),
    }
    if args.check:
        full = sft_dimension(build_sft(m, "full"))
        unique = sft_dimension(build_sft(m, "unique"))
        record["full_sft_dimension"] = full
        record["s_gap"] = abs(s - full)
        record["unique_sft_dimension"] = unique
        record["t_gap"] = abs(t - unique)
        if abs(s - full) >= 1e-8:
            raise InvariantViolation(f"s = {s} disagrees with the full SFT dimension {full}")
    return record


def cmd_codings(args) -> dict:
    x, lam = args.x, args.lam
    mult = coding_multiplicity(x, lam)
    cg = coding_graph(x, lam)
    g = cg.graph
    cyclic = sum(1 for c in cg.components
                 if len(c) > 1 or g.has_edge(next(iter(c)), next(iter(c))))
    record = {
        "x": x,
        "lambda": lam,
        "multiplicity": str(mult),
        "states": g.number_of_nodes(),
        "edges": g.number_of_edges(),
        "cyclic_components": cyclic,
    }
    if args.prefixes:
        record["prefixes"] = " ".join(word_str(w) for w in cg.prefixes(args.prefixes))
    return record


def cmd_affine(args) -> dict:
    lam = args.lam
    g = AffineMap(args.mu, args.b)
    record = {"mu": g.mu, "b": g.b, "lambda": lam}
    if tss_exact(lam)[0]:
        ok, w = classify_affine(g, lam)
        record["generator"] = ok
        if ok:
            record["word"] = word_str(w)
    else:
        record["generator"] = "n/a (lambda is not 1 - 3^-m)"
    res = verify_affine_inclusion(g, lam, args.depth)
    record["status"] = res.status
    record["depth"] = res.depth
    if res.status == REJECTED:
        record["witness"] = res.witness
        record["witness_word"] = word_str(res.witness_word)
        record["image"] = res.image
        in_set = membership_exact(res.witness, lam)
        outside = res.image not in level_set(lam, res.depth)
        record["witness_in_set"] = in_set
        record["image_outside_level"] = outside
        if not (in_set and outside):
            raise InvariantViolation("rejection witness failed re-verification")
    elif res.status == ACCEPTED:
        record["word"] = word_str(res.word)
    return record


def cmd_holes(args) -> dict:
    lam, n = args.lam, args.depth
    basic = level_set(lam, n)
    holes = hole_set(lam, n)
    return {
        "lambda": lam,
        "n": n,
        "level_set": [str(iv) for iv in basic],
        "hole_set": [str(iv) for iv in holes],
    }


def _emit_holes(record: dict, fmt: str, out: TextIO) -> None:
    if fmt == "json":
        emit_report(record, fmt, out)
        return
    if fmt == "csv":
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(("set", "n", "interval"))
        for name in ("level_set", "hole_set"):
            for iv in record[name]:
                writer.writerow((name, record["n"], iv))
        return
    out.write(f"lambda: {record['lambda']}\n")
    out.write(f"I_{record['n']}: {' ∪ '.join(record['level_set']) or '∅'}\n")
    out.write(f"H_{record['n']}: {' ∪ '.join(record['hole_set']) or '∅'}\n")


# -- scan -------------------------------------------------------------------------

def scan_lambdas(max_den: int) -> Iterator[Fraction]:
    for q in range(2, max_den + 1):
        for p in range(1, q):
            if math.gcd(p, q) == 1:
                yield Fraction(p, q)


def scan_row(lam: Fraction) -> dict:
    res = spectrum_exact(lam)
    return {
        "p": lam.numerator,
        "q": lam.denominator,
        "lambda": f"{lam.numerator}/{lam.denominator}",
        "spec_num": res.value.numerator,
        "spec_den": res.value.denominator,
        "is_tss": tss_exact(lam)[0],
        "witness_n": res.witness_n,
        "state_count": res.state_count,
        "witness": {"i": word_str(res.witness_i), "j": word_str(res.witness_j)},
    }


def _scan_rows(max_den: int, workers: int) -> Iterator[dict]:
    lams = scan_lambdas(max_den)
    if workers <= 1:
        yield from map(scan_row, lams)
        return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        # map yields in submission order whatever the completion order
        yield from pool.map(scan_row, lams, chunksize=16)


def run_scan(max_den: int, workers: int, fmt: str, out: TextIO, err: TextIO) -> int:
    tss_count = sum(1 for m in range(1, 64) if 3 ** m <= max_den)
    hits, lo, hi, count = 0, None, None, 0
    two_thirds = Fraction(2, 3)
    writer = None
    if fmt == "json":
        out.write("[")
    else:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(SCAN_FIELDS)
    out.flush()
    for row in _scan_rows(max_den, workers):
        value = Fraction(row["spec_num"], row["spec_den"])
        if fmt == "json":
            out.write(("\n" if count == 0 else ",\n") + json.dumps(row, ensure_ascii=False))
        else:
            writer.writerow([_csv_cell(row[k]) for k in SCAN_FIELDS])
        out.flush()
        count += 1
        hits += value == two_thirds
        lo = value if lo is None or value < lo else lo
        hi = value if hi is None or value > hi else hi
    if fmt == "json":
        out.write("\n]\n")
        out.flush()
    err.write(f"scan max_den={max_den}: {count} rows, min spectrum {lo}, max spectrum {hi}, "
              f"{hits} rows with spectrum 2/3 ({tss_count} lambda of the form 1 - 3^-m)\n")
    if hits != tss_count:
        raise InvariantViolation(f"{hits} rows with spectrum 2/3 but {tss_count} TSS lambda")
    return EXIT_OK


def _csv_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


# -- entry point ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cantorlab",
        description="Exact invariants of the overlapping set generated by x/3, (x+lambda)/3, (x+2)/3.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text, default_format="text"):
        p = sub.add_parser(name, help=help_text)
        choices = ("csv", "json") if default_format == "csv" else ("text", "csv", "json")
        p.add_argument("--format", choices=choices, default=default_format)
        p.add_argument("--output", metavar="PATH", help="write to PATH instead of standard output")
        return p

    p = add("spectrum", "exact spectrum with a witness pair")
    p.add_argument("--lambda", dest="lam", type=parse_lambda, metavar="P/Q")
    p.add_argument("--brute", type=_positive_int, metavar="D", help="add the brute-force bound at depth D")
    p.add_argument("--closed-form", action="store_true", help="add the m/q prediction when it applies")
    p.add_argument("--approx", type=parse_decimal, metavar="DECIMAL",
                   help="non-exact: brute-force upper bound for a decimal lambda")

    p = add("tss", "totally self-similar verdict and depth check "
                   "(irrational lambda are never totally self-similar)")
    p.add_argument("--lambda", dest="lam", type=parse_lambda, metavar="P/Q", required=True)
    p.add_argument("--depth", type=_nonneg_int, default=6)

    p = add("dims", "dimensions s and t of the coding-multiplicity classes")
    p.add_argument("--m", type=_positive_int, required=True)
    p.add_argument("--check", action="store_true", help="cross-check against subshift growth rates")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)

    p = add("codings", "number of codings of a point")
    p.add_argument("--x", type=parse_rational, metavar="P/Q", required=True)
    p.add_argument("--lambda", dest="lam", type=parse_lambda, metavar="P/Q", required=True)
    p.add_argument("--prefixes", type=_nonneg_int, default=0, metavar="N",
                   help="also list coding prefixes of length N")

    p = add("affine", "test g(x) = mu x + b as a self-embedding")
    p.add_argument("--mu", type=parse_rational, metavar="P/Q", required=True)
    p.add_argument("--b", type=parse_rational, metavar="P/Q", required=True)
    p.add_argument("--lambda", dest="lam", type=parse_lambda, metavar="P/Q", required=True)
    p.add_argument("--depth", type=_nonneg_int, default=8)

    p = add("holes", "level set and hole set at one level")
    p.add_argument("--lambda", dest="lam", type=parse_lambda, metavar="P/Q", required=True)
    p.add_argument("--depth", type=_nonneg_int, default=2, metavar="N")

    p = add("scan", "spectrum of every p/q with q <= max-den", default_format="csv")
    p.add_argument("--max-den", type=_positive_int, required=True)
    p.add_argument("--workers", type=_positive_int, default=1)
    return parser


_COMMANDS = {
    "spectrum": cmd_spectrum,
    "tss": cmd_tss,
    "dims": cmd_dims,
    "codings": cmd_codings,
    "affine": cmd_affine,
    "holes": cmd_holes,
}


def _dispatch(args, out: TextIO, err: TextIO) -> int:
    if args.command == "scan":
        return run_scan(args.max_den, args.workers, args.format, out, err)
    record = _COMMANDS[args.command](args)
    if args.command == "holes":
        _emit_holes(record, args.format, out)
    else:
        emit_report(record, args.format, out)
    return EXIT_OK


def main(argv: Iterable[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    err = sys.stderr
    try:
        if args.output:
            with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
                return _dispatch(args, fh, err)
        return _dispatch(args, sys.stdout, err)
    except ResourceError as exc:
        err.write(f"cantorlab: {exc}\n")
        return EXIT_RESOURCE
    except (InvariantViolation, NumericError, AssertionError) as exc:
        err.write(f"cantorlab: invariant violated: {exc}\n")
        return EXIT_INVARIANT
    except (DomainError, ValueError, ZeroDivisionError) as exc:
        err.write(f"cantorlab: {exc}\n")
        return EXIT_USAGE
    except KeyboardInterrupt:
        return 130


if __name__ == "__main__":
    sys.exit(main())
