"""Command-line entry point: ``cubedistort <command> [options]``.

Exit codes: 0 success, 1 a check reported a violation, 2 usage or
parameter error.
"""

from __future__ import annotations

import argparse
import csv
import json
import random
import re
import sys
from pathlib import Path

from . import complexes as cx
from . import distortion as ds
from .automorphism import phi
from .errors import CapExceeded, CubeDistortError, SizeLimit
from .freegroup import Word, gen_name, intern
from .presentations import (
    build_chain, build_G, build_hnn, build_main_amalgam, build_P, build_Q,
)
from .stallings import build_subgroup, member
from .wise import carve, check_no_repeat, sigma

JSON_SCHEMA_VERSION = 1


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# output


class Out:
    def __init__(self, args):
        self.json = getattr(args, "json", False)
        self.command = args.command
        self.params = {k: v for k, v in vars(args).items()
                       if k not in ("json", "command", "func") and v is not None}
        self.lines: list[str] = []

    def say(self, text: str = "") -> None:
        if self.json:
            self.lines.append(text)
        else:
            print(text)

    def finish(self, ok: bool, details: dict | None = None) -> int:
        if self.json:
            doc = {
                "schema": JSON_SCHEMA_VERSION,
                "command": self.command,
                "params": _jsonable(self.params),
                "verdict": "OK" if ok else "VIOLATION",
                "details": _jsonable(details or {}),
            }
            print(json.dumps(doc, indent=2, sort_keys=True))
        return 0 if ok else 1


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set)):
        return [_jsonable(v) for v in x]
    if isinstance(x, float) and x == float("inf"):
        return "inf"
    if isinstance(x, (int, float, str, bool)) or x is None:
        if isinstance(x, int) and not isinstance(x, bool) and x.bit_length() > 52:
            return str(x)
        return x
    return str(x)


# ---------------------------------------------------------------------------
# builders shared by several commands


FAMILIES = ("P", "Q", "Qp", "G", "chain", "main", "hnn")


def _need(args, *names):
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        raise UsageError(f"--family {args.family} needs " + ", ".join("--" + n.replace("_", "-") for n in missing))


def presentation_for(args):
    f = args.family
    if f == "P":
        _need(args, "n")
        return build_P(args.n)
    if f in ("Q", "Qp"):
        _need(args, "m")
        return build_Q(args.m, primed=(f == "Qp"), fourth_family=args.fourth_family)
    if f == "G":
        _need(args, "m")
        k = args.m if args.k is None else args.k
        s_pres, fbc = build_G(args.m, k)
        return fbc if args.form == "fbc" else s_pres
    if f == "chain":
        _need(args, "k")
        return build_chain(args.k, args.m or 1).presentation()
    if f == "main":
        _need(args, "k", "m")
        return build_main_amalgam(args.k, args.m, primed=args.primed).presentation()
    if f == "hnn":
        _need(args, "nt", "ma")
        return build_hnn(args.nt, args.ma)
    raise UsageError(f"unknown family {f}")


def _add_family_params(p):
    p.add_argument("--n", type=int, help="block size n (P) ")
    p.add_argument("--m", type=int, help="m (Q, G, chain rank factor, main)")
    p.add_argument("--k", type=int, help="k (G: number of B letters; chain/main: levels)")
    p.add_argument("--nt", type=int, help="number of t letters (hnn)")
    p.add_argument("--ma", type=int, help="number of a letters (hnn)")
    p.add_argument("--primed", action="store_true", help="primed variant of the main amalgam")
    p.add_argument("--fourth-family", choices=("parallel", "verbatim"), default="parallel",
                   help="reading of the fourth Q relator family (default: parallel)")
    p.add_argument("--form", choices=("s", "fbc"), default="s",
                   help="G: s-generator or free-by-cyclic presentation")


# ---------------------------------------------------------------------------
# commands


def cmd_sigma(args, out: Out) -> int:
    w = sigma(args.m)
    details = {"m": args.m, "length": len(w), "no_repeat": check_no_repeat(w) is None}
    if args.carve:
        count, length = args.carve
        blocks = carve(w, count, length)
        for b in blocks:
            out.say(str(b))
        details["blocks"] = [str(b) for b in blocks]
    else:
        out.say(str(w))
        details["word"] = str(w)
    return out.finish(True, details)


def cmd_build(args, out: Out) -> int:
    p = presentation_for(args)
    text = p.to_text()
    if args.out:
        Path(args.out).write_text(text)
    else:
        out.say(text.rstrip("\n"))
    return out.finish(True, {"generators": len(p.generators), "relators": len(p.relators),
                             "out": args.out})


def _complex_for(args):
    """(complex, presentation, ultra-convex edge set, extra info)."""
    f = args.family
    if f == "chain":
        _need(args, "k")
        c = cx.glued_chain(args.k, args.m or 1)
        spec = build_chain(args.k, args.m or 1)
        first = spec.vertices[0]
        return c, first, [c.gen_edge[w[0]] for w in first.marked["ultraconvex"]], {}
    if f == "main":
        _need(args, "m")
        if (args.k or 1) != 1:
            raise UsageError("verify/glue for the main complex supports --k 1 only")
        c, _, z = cx.glued_main(args.m, primed=args.primed)
        sep = cx.min_separation(z, cx.s_edges(z))
        return c, None, None, {"S_separation_in_Z": sep}
    p = presentation_for(args)
    c = cx.build_complex(p)
    sub = None
    if "ultraconvex" in p.marked and all(len(w) == 1 for w in p.marked["ultraconvex"]):
        sub = [c.gen_edge[w[0]] for w in p.marked["ultraconvex"]]
    extra = {}
    if f in ("Q", "Qp"):
        extra["S_separation"] = cx.min_separation(c, cx.s_edges(c))
    return c, p, sub, extra


def cmd_verify(args, out: Out) -> int:
    c, p, sub, extra = _complex_for(args)
    wanted = set(args.checks.split(",")) if args.checks else None
    ok = True
    details: dict = {"squares": len(c.squares), "vertices": c.nverts, **extra}

    def run(name):
        return wanted is None or name in wanted

    if run("large_link"):
        v = cx.check_large_link(c)
        girths = cx.link_girths(c, bound=8)
        details["large_link"] = v.line()
        details["girth"] = girths
        out.say(f"large_link: {v.line()}  (link girth per vertex, capped at 8: {girths})")
        ok &= v.ok
    if run("ultraconvex") and sub:
        v = cx.check_ultraconvex(c, sub)
        details["ultraconvex"] = v.line()
        details["ultraconvex_margin"] = v.details["min_separation"]
        out.say(f"ultraconvex: {v.line()}  (min separation {v.details['min_separation']})")
        ok &= v.ok
    if run("flat") and p is not None and args.family in ("P", "hnn", "G"):
        v = cx.check_flat_exclusion(c, p)
        details["flat_exclusion"] = v.line()
        details["flat_details"] = v.details
        finding = args.family == "G"  # flats are expected in K_{m,k}
        tag = " (finding, not a failure)" if finding else ""
        out.say(f"flat_exclusion: {v.line()}{tag}")
        if not finding:
            ok &= v.ok
    for key, val in extra.items():
        out.say(f"{key}: {val}")
    if args.emit_dot:
        Path(args.emit_dot).write_text(cx.link(c, 0).to_dot(c))
    return out.finish(ok, details)


def cmd_glue(args, out: Out) -> int:
    c, _, _, extra = _complex_for(args)
    v = cx.check_large_link(c)
    out.say(f"glued complex: {c.nverts} vertices, {len(c.edges)} edges, {len(c.squares)} squares")
    out.say(f"large_link: {v.line()}")
    for key, val in extra.items():
        out.say(f"{key}: {val}")
    if args.emit_dot:
        Path(args.emit_dot).write_text(c.to_dot())
    return out.finish(v.ok, {"large_link": v.line(), "squares": len(c.squares), **extra})


def _read_words(path: str) -> list[Word]:
    words = []
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            words.append(Word.parse(line))
    return words


def cmd_fold(args, out: Out) -> int:
    alphabet = args.alphabet.split(",") if args.alphabet else None
    words = _read_words(args.words)
    if alphabet:
        allowed = {intern(a) for a in alphabet}
        for w in words:
            bad = w.gens() - allowed
            if bad:
                raise UsageError(f"word {w} uses letters outside the alphabet: "
                                 + ", ".join(sorted(gen_name(g) for g in bad)))
    g = build_subgroup(words)
    details = {"rank": g.rank, "vertices": len(g.vertices()), "edges": len(g.edges())}
    out.say(f"rank {g.rank}, {len(g.vertices())} vertices, {len(g.edges())} edges")
    ok = True
    if args.member is not None:
        verdict = member(g, Word.parse(args.member))
        details["member"] = verdict
        out.say(f"member {args.member!r}: {verdict}")
    if args.expect_rank is not None:
        ok = g.rank == args.expect_rank
        details["expected_rank"] = args.expect_rank
    if args.emit_dot:
        Path(args.emit_dot).write_text(g.to_dot())
    return out.finish(ok, details)


def cmd_aut(args, out: Out) -> int:
    aut = phi(args.m, args.k, cap=args.size_limit)
    w = aut.apply_iter(intern(args.apply), args.n)
    out.say(str(len(w)) if args.length else str(w))
    return out.finish(True, {"length": len(w), "word": str(w) if not args.length else None})


def _samples(args):
    f = args.family
    lo = args.nmin
    hi = args.nmax
    if f == "P":
        p = build_P(args.n or 1)
        return [ds.witness_P(args.n or 1, k, p) for k in range(lo, hi + 1)]
    if f == "chain":
        _need(args, "k")
        return [ds.witness_chain(args.k, args.m or 1, n, exact_bits=args.exact_bits) for n in range(max(lo, 1), hi + 1)]
    if f == "Gmm":
        _need(args, "m")
        return [ds.witness_Gmm(args.m, n, cap=args.size_limit) for n in range(max(lo, 1), hi + 1)]
    if f == "main":
        _need(args, "k", "m")
        return [ds.witness_main(args.k, args.m, n, cap=args.size_limit, exact_bits=args.exact_bits) for n in range(max(lo, 1), hi + 1)]
    if f == "hnn":
        _need(args, "nt", "ma")
        p = build_hnn(args.nt, args.ma)
        return [ds.witness_hnn(args.nt, args.ma, d, p, exact_bits=args.exact_bits) for d in range(lo, hi + 1)]
    raise UsageError(f"unknown family {f}")


def _fmt_log(v) -> str:
    return f"{v:.6g}" if isinstance(v, float) else "huge"


def cmd_distort(args, out: Out) -> int:
    samples = _samples(args)
    rows = []
    checked = 0
    for s in samples:
        # explicit cross-check of compressed lengths that fit under the cap
        if isinstance(s.element, ds.Slp) and isinstance(s.subgroup_len, int) and s.subgroup_len <= args.cap:
            if len(ds.reduce(s.element.expand(args.cap))) != s.subgroup_len:
                out.say(f"length mismatch at n={s.n}")
                return out.finish(False, {"mismatch_at": s.n})
            checked += 1
        logs = s.log_iterates(3)
        rows.append({"n": s.n, "ambient_len": s.ambient_len,
                     "subgroup_len": ds.length_str(s.subgroup_len),
                     "log_iterates": ";".join(_fmt_log(v) for v in logs)})
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            wr = csv.DictWriter(fh, fieldnames=["n", "ambient_len", "subgroup_len", "log_iterates"])
            wr.writeheader()
            wr.writerows(rows)
    for r in rows:
        out.say(f"{r['n']}\t{r['ambient_len']}\t{r['subgroup_len']}")
    return out.finish(True, {"samples": len(rows), "expanded_checks": checked, "csv": args.csv})


_TOWER = re.compile(r"^(\d+)\^\{(?:(\d+)\*)?(.*)\}$")


def parse_length(text: str):
    """Inverse of :func:`distortion.length_str`."""
    text = text.strip()
    if text.isdigit():
        return int(text)
    m = _TOWER.match(text)
    if not m:
        raise UsageError(f"cannot parse length {text!r}")
    base, mult, inner = int(m.group(1)), int(m.group(2) or 1), m.group(3)
    if inner.startswith("(") and inner.endswith(")"):
        inner = inner[1:-1]
    return ds.Tower(base, parse_length(inner), mult)


def cmd_report(args, out: Out) -> int:
    pts = []
    with open(args.csv, newline="") as fh:
        for row in csv.DictReader(fh):
            x = int(row["ambient_len"]) if args.use_ambient else int(row["n"])
            pts.append((x, parse_length(row["subgroup_len"])))
    g = ds.classify_growth(pts)
    out.say(f"tower height {g.height}, degree {g.degree:.3f}")
    return out.finish(True, {"height": g.height, "degree": g.degree})


# ---------------------------------------------------------------------------
# parser


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cubedistort", description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=0, help="seed for any randomised order (default 0)")
    ap.add_argument("--cap", type=int, default=10 ** 6, help="explicit expansion cap (default 1e6)")
    ap.add_argument("--size-limit", type=int, default=10 ** 7,
                    help="automorphism iteration size limit (default 1e7)")
    ap.add_argument("--exact-bits", type=int, default=ds.EXACT_BITS,
                    help="lengths above this many bits are kept as towers")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--json", action="store_true", help="machine-readable verdict")
        p.set_defaults(func=func)
        return p

    p = add("sigma", cmd_sigma, "print the long word, optionally carved")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--carve", type=int, nargs=2, metavar=("COUNT", "LEN"))

    p = add("build", cmd_build, "build a presentation")
    p.add_argument("--family", choices=FAMILIES, required=True)
    _add_family_params(p)
    p.add_argument("--out", help="write the presentation here instead of stdout")

    p = add("verify", cmd_verify, "curvature checks on a family's complex")
    p.add_argument("--family", choices=FAMILIES, required=True)
    _add_family_params(p)
    p.add_argument("--checks", help="comma list from large_link,ultraconvex,flat (default: all)")
    p.add_argument("--emit-dot", help="write the link of vertex 0 as DOT")

    p = add("glue", cmd_glue, "build a glued complex and check its links")
    p.add_argument("--family", choices=("chain", "main"), required=True)
    _add_family_params(p)
    p.add_argument("--emit-dot", help="write the glued complex as DOT")

    p = add("fold", cmd_fold, "Stallings-fold a subgroup")
    p.add_argument("--alphabet", help="comma-separated generator names")
    p.add_argument("--words", required=True, help="file with one word per line")
    p.add_argument("--member", help="word to test for membership")
    p.add_argument("--expect-rank", type=int, help="exit 1 unless the rank matches")
    p.add_argument("--emit-dot", help="write the folded graph as DOT")

    p = add("aut", cmd_aut, "iterate phi_{m,k}")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--apply", required=True, help="basis letter, e.g. B2")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--length", action="store_true", help="print only the length")

    p = add("distort", cmd_distort, "sample a witness family")
    p.add_argument("--family", choices=("P", "chain", "Gmm", "main", "hnn"), required=True)
    p.add_argument("--n", type=int, help="P: block size")
    p.add_argument("--m", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--nt", type=int)
    p.add_argument("--ma", type=int)
    p.add_argument("--nmin", type=int, default=1)
    p.add_argument("--nmax", type=int, required=True)
    p.add_argument("--csv", help="write samples here")

    p = add("report", cmd_report, "classify growth from a distort CSV")
    p.add_argument("--csv", required=True)
    p.add_argument("--use-ambient", action="store_true", help="use ambient_len as the abscissa")
    return ap


def main(argv=None) -> int:
    ap = make_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    random.seed(args.seed)
    out = Out(args)
    try:
        return args.func(args, out)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (CapExceeded, SizeLimit) as exc:
        print(f"limit reached: {exc}", file=sys.stderr)
        return 2
    except CubeDistortError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main_exit() -> None:
    sys.exit(main())


if __name__ == "__main__":  # pragma: no cover
    main_exit()
