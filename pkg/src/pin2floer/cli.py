"""Command-line interface.

Exit codes: 0 success, 1 validation or exactness failure, 2 input error,
3 inconclusive window.  All output is exact and deterministic.
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional

from . import io
from .floer import FLAVORS, DegreeError, assemble, assemble_cobordism, assemble_ijp, validate
from .graded import (
    SquareZeroError,
    check_exactness,
    homology,
    induced_map,
    spectral_sequence,
)
from .models import MODEL_NAMES, ModelSpec, generate
from .pin2 import InconclusiveWindow, InvariantPart, classify_image_i, gysin_for_complex

__all__ = ["main", "run", "format_degree", "parse_window", "homology_rows",
           "format_table", "parse_csv_table"]

OK, FAILED, INPUT_ERROR, INCONCLUSIVE = 0, 1, 2, 3
COMMANDS = ("validate", "homology", "invariants", "les", "gysin", "specseq", "model", "cobmap")


class InputError(Exception):
    pass


def format_degree(d) -> str:
    d = Fraction(d)
    return str(d.numerator) if d.denominator == 1 else f"{d.numerator}/{d.denominator}"


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise InputError(f"not a rational number: {text!r}") from None


def parse_window(text: Optional[str], denominator: int = 1):
    """Parse ``lo..hi``; each end is an integer or ``n/d``."""
    if text is None:
        return None
    lo, sep, hi = text.partition("..")
    if not sep:
        raise InputError(f"window must look like lo..hi, got {text!r}")
    w = (_rational(lo), _rational(hi))
    for x in w:
        if denominator % x.denominator:
            raise InputError(f"window end {format_degree(x)} is not a multiple of 1/{denominator}")
    if w[0] > w[1]:
        raise InputError("window lo exceeds hi")
    return w


def format_table(header, rows, as_csv: bool = False) -> str:
    rows = [[str(c) for c in r] for r in rows]
    if as_csv:
        buf = _io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        return buf.getvalue()
    widths = [max([len(h)] + [len(r[i]) for r in rows]) for i, h in enumerate(header)]
    lines = ["  ".join(h.rjust(n) for h, n in zip(header, widths))]
    lines += ["  ".join(c.rjust(n) for c, n in zip(r, widths)) for r in rows]
    return "\n".join(lines) + "\n"


def homology_rows(h) -> list:
    """``[degree, dimension, edge]`` string rows; edge rows have an empty dimension."""
    return [[format_degree(d), "" if n is None else str(n), "1" if e else "0"]
            for d, n, e in h.table()]


def parse_csv_table(text: str) -> list:
    """Read a homology CSV back into ``(degree, dimension or None, edge)`` tuples."""
    reader = csv.reader(_io.StringIO(text))
    header = next(reader)
    if header != ["degree", "dimension", "edge"]:
        raise ValueError(f"unexpected header {header!r}")
    return [(Fraction(d), None if n == "" else int(n), e == "1") for d, n, e in reader]


# ---- helpers ---------------------------------------------------------------

def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None


def _load(path: str) -> io.FloerDocument:
    return io.parse(_read(path))


def _window(args, doc) -> Optional[tuple]:
    if getattr(args, "window", None) is not None:
        return parse_window(args.window, doc.data.grading_denominator)
    return doc.window


def _need_involution(doc):
    if doc.involution is None:
        raise InputError("the document has no involution")
    return doc.involution


def _complex(doc, flavor, window, invariant):
    c = assemble(doc.data, flavor, window)
    if invariant:
        return InvariantPart(c, _need_involution(doc)).complex
    return c


# ---- commands --------------------------------------------------------------

def _cmd_validate(args, out):
    doc = _load(args.document)
    rep = validate(doc.data, _window(args, doc), doc.involution)
    out.write(str(rep) + "\n")
    return OK if rep.ok else FAILED


def _cmd_homology(args, out):
    doc = _load(args.document)
    c = _complex(doc, args.flavor, _window(args, doc), args.invariant)
    h = homology(c)
    out.write(format_table(["degree", "dimension", "edge"], homology_rows(h), args.csv))
    return OK


def _cmd_invariants(args, out):
    doc = _load(args.document)
    inv = _need_involution(doc)
    if doc.q is None or doc.v is None:
        raise InputError("the document has no module operators")
    b1 = int(doc.data.metadata.get("b1", 0))
    if b1:
        raise InputError(f"invariants need a rational homology sphere; b1 = {b1}")
    p = classify_image_i(doc.data, inv, doc.q, doc.v, _window(args, doc))
    out.write(f"alpha={format_degree(p.alpha)} beta={format_degree(p.beta)} "
              f"gamma={format_degree(p.gamma)}\n")
    return OK


def _report_table(rep, names, out, label=""):
    rows = [[label, names[r["junction"]], format_degree(r["degree"]), r["image"], r["kernel"],
             "yes" if r["exact"] else "no"]
            for r in sorted(rep.details, key=lambda r: (r["junction"], r["degree"]))]
    header = ["sequence", "junction", "degree", "image", "kernel", "exact"]
    if not label:
        header, rows = header[1:], [r[1:] for r in rows]
    out.write(format_table(header, rows))


def _cmd_les(args, out):
    doc = _load(args.document)
    window = _window(args, doc)
    cx = {f: assemble(doc.data, f, window) for f in FLAVORS}
    i, j, p = assemble_ijp(doc.data, window, cx)
    if args.invariant:
        inv = _need_involution(doc)
        parts = {f: InvariantPart(cx[f], inv) for f in FLAVORS}
        i = parts["bar"].restrict_map(i, parts["check"])
        j = parts["check"].restrict_map(j, parts["hat"])
        p = parts["hat"].restrict_map(p, parts["bar"])
        cx = {f: parts[f].complex for f in FLAVORS}
    h = {f: homology(cx[f]) for f in FLAVORS}
    seq = [induced_map(i, h["bar"], h["check"]), induced_map(j, h["check"], h["hat"]),
           induced_map(p, h["hat"], h["bar"])]
    rep = check_exactness(seq, cyclic=True)
    _report_table(rep, {0: "bar", 1: "check", 2: "hat"}, out)
    out.write(("PASS" if rep.ok else "FAIL") + "\n")
    return OK if rep.ok else FAILED


def _cmd_gysin(args, out):
    doc = _load(args.document)
    inv = _need_involution(doc)
    window = _window(args, doc)
    flavors = FLAVORS if args.flavor == "all" else (args.flavor,)
    ok = True
    for f in flavors:
        rep = gysin_for_complex(assemble(doc.data, f, window), inv)
        _report_table(rep, {0: "invariant", 1: "full", 2: "image"}, out, label=f)
        out.write(f"{f}: {'PASS' if rep.ok else 'FAIL'}\n")
        ok = ok and rep.ok
    return OK if ok else FAILED


def _cmd_specseq(args, out):
    doc = _load(args.document)
    if doc.filtration is None:
        raise InputError("the document has no filtration")
    window = _window(args, doc)
    model = doc.to_model()
    invariant = doc.involution is not None and not args.full
    ss = spectral_sequence(model.filtered(args.flavor, window, invariant), args.pages)
    for r in range(1, args.pages + 1):
        out.write(f"page {r}\n")
        rows = [[p, format_degree(d), n, ss.ranks[r].get((p, d), 0)]
                for (p, d), n in sorted(ss.pages[r].items(), key=lambda kv: (kv[0][1], kv[0][0]))]
        out.write(format_table(["level", "degree", "dimension", "rank_d"], rows))
    pages = ", ".join(str(r) for r in ss.nonzero_pages) or "none"
    out.write(f"nonzero differentials on pages: {pages}\n")
    out.write(f"collapse page: {ss.collapse_page}\n")
    return OK


def _cmd_model(args, out):
    window = parse_window(args.window) if args.window else (-24, 24)
    options = {} if args.shift is None else {"shift": _rational(args.shift)}
    try:
        spec = ModelSpec(args.name, window, options=options)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    m = generate(spec)
    if m.cobordism is not None:
        text = io.emit_cobordism(m.cobordism, io.document_from_model(m),
                                 io.document_from_model(m.target))
    else:
        text = io.emit(m)
    if args.emit:
        Path(args.emit).write_text(text)
        out.write(f"wrote {args.emit}\n")
    else:
        out.write(text)
    return OK


def _cmd_cobmap(args, out):
    src = _load(args.src) if args.src else None
    tgt = _load(args.tgt) if args.tgt else None
    cob, esrc, etgt = io.parse_cobordism(_read(args.ops), src and src.data, tgt and tgt.data)
    src, tgt = src or esrc, tgt or etgt
    window = parse_window(args.window, src.data.grading_denominator) if args.window else None
    sw = window if window is not None else src.window
    tw = window if window is not None else tgt.window
    flavors = FLAVORS if args.flavor == "all" else (args.flavor,)
    maps = assemble_cobordism(src.data, tgt.data, cob, src_window=sw, tgt_window=tw,
                              flavors=flavors)
    out.write(str(maps.report) + "\n")
    if not maps.report.ok:
        return FAILED
    rows = []
    for f in flavors:
        cs, ct = assemble(src.data, f, sw), assemble(tgt.data, f, tw)
        fmap = maps[f]
        if args.invariant:
            ps, pt = InvariantPart(cs, _need_involution(src)), InvariantPart(ct, _need_involution(tgt))
            fmap, cs, ct = ps.restrict_map(fmap, pt), ps.complex, pt.complex
        hs, ht = homology(cs), homology(ct)
        hm = induced_map(fmap, hs, ht)
        for d in sorted(hm.matrices):
            m = hm.matrices[d]
            rows.append([f, format_degree(d), format_degree(d + hm.shift), m.cols, m.rows,
                         hm.rank()[d]])
    out.write(format_table(["flavor", "degree", "target_degree", "source_dim", "target_dim",
                            "rank"], rows))
    return OK


# ---- entry points ----------------------------------------------------------

def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pin2floer",
                                 description="Monopole Floer chain complexes over GF(2).")
    sub = ap.add_subparsers(dest="command", required=True)

    def doc_cmd(name, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("document")
        p.add_argument("--window", help="lo..hi; defaults to the document window")
        return p

    doc_cmd("validate", "check square-zero, degrees and equivariance")
    p = doc_cmd("homology", "graded dimension table")
    p.add_argument("--flavor", choices=FLAVORS, required=True)
    p.add_argument("--invariant", action="store_true", help="use invariant chains")
    p.add_argument("--csv", action="store_true")
    doc_cmd("invariants", "alpha, beta and gamma")
    p = doc_cmd("les", "exactness of the pair sequence")
    p.add_argument("--invariant", action="store_true")
    p = doc_cmd("gysin", "exactness of the Gysin sequence")
    p.add_argument("--flavor", choices=FLAVORS + ("all",), default="all")
    p = doc_cmd("specseq", "spectral sequence of the filtration")
    p.add_argument("--flavor", choices=FLAVORS, default="bar")
    p.add_argument("--pages", type=int, default=4)
    p.add_argument("--full", action="store_true", help="use all chains, not invariant ones")
    p = sub.add_parser("model", help="generate a builtin model")
    p.add_argument("name", choices=MODEL_NAMES)
    p.add_argument("--window")
    p.add_argument("--shift", help="grading shift for hantzsche_wendt")
    p.add_argument("--emit", help="output path; stdout when omitted")
    p = sub.add_parser("cobmap", help="cobordism maps and their induced homology maps")
    p.add_argument("--src")
    p.add_argument("--tgt")
    p.add_argument("--ops", required=True)
    p.add_argument("--flavor", choices=FLAVORS + ("all",), default="all")
    p.add_argument("--invariant", action="store_true")
    p.add_argument("--window")
    return ap


def _join_negative_values(argv: list) -> list:
    """Let ``--window -20..20`` through argparse's option detection."""
    out, k = [], 0
    while k < len(argv):
        a = argv[k]
        if a in ("--window", "--shift") and k + 1 < len(argv) and argv[k + 1].startswith("-"):
            out.append(f"{a}={argv[k + 1]}")
            k += 2
            continue
        out.append(a)
        k += 1
    return out


_HANDLERS = {
    "validate": _cmd_validate, "homology": _cmd_homology, "invariants": _cmd_invariants,
    "les": _cmd_les, "gysin": _cmd_gysin, "specseq": _cmd_specseq, "model": _cmd_model,
    "cobmap": _cmd_cobmap,
}


def run(argv, out=None, err=None) -> int:
    """Run one command; returns the exit code."""
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    try:
        args = _parser().parse_args(_join_negative_values(list(argv)))
    except SystemExit as exc:
        return OK if exc.code == 0 else INPUT_ERROR
    try:
        return _HANDLERS[args.command](args, out)
    except (InputError, io.DocumentError, DegreeError) as exc:
        err.write(f"error: {exc}\n")
        return INPUT_ERROR
    except InconclusiveWindow as exc:
        err.write(f"inconclusive window: {exc}\n")
        return INCONCLUSIVE
    except SquareZeroError as exc:
        err.write(f"validation failure: {exc}\n")
        return FAILED
    except ValueError as exc:
        err.write(f"failure: {exc}\n")
        return FAILED


def main(argv=None) -> int:
    return run(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
