"""Command-line front end.

    cycloek <subcommand> [args] [--pmax N] [--x N] [--format csv|json|text]
            [--cache DIR] [--threads N] [--precision high|fast]

Exit status: 0 success, 1 usage or invalid input, 2 computation error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from decimal import Decimal
from pathlib import Path

from . import __version__
from .ddreal import DD
from .errors import CycloekError, DomainError

TABLE_PLACES = 6
SCALAR_PLACES = 15
TABLE_COLUMNS = ("q", "S_q", "qS_q", "gamma_q", "gamma_q_over_log_q", "ratio")
CACHE_VERSION = f"cycloek-{__version__}-1"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


@dataclass(frozen=True)
class RunConfig:
    precision_mode: str = "high"
    pmax: int | None = None
    x: int | None = None
    output_format: str = "text"
    cache_dir: str | None = None
    thread_count: int = 1
    places: int | None = None

    def digest(self) -> str:
        """Hash of the settings that change a table row."""
        key = json.dumps({"precision": self.precision_mode, "pmax": self.pmax}, sort_keys=True)
        return hashlib.sha256(key.encode()).hexdigest()[:16]


@dataclass(frozen=True)
class TableRow:
    q: int
    S_q: DD
    qS_q: DD
    gamma_q: DD
    gamma_q_over_log_q: DD
    ratio: DD


def fixed(x, places: int) -> str:
    """Decimal string of a DD or float rounded to ``places`` after the point."""
    if isinstance(x, DD):
        d = Decimal(x.hi) + Decimal(x.lo)
    else:
        d = Decimal(float(x))
    if not d.is_finite():
        return str(float(x))
    s = f"{d:.{places}f}"
    if s.startswith("-") and Decimal(s) == 0:
        s = s[1:]
    return s


def _number(x, places: int):
    if isinstance(x, (int, bool)) or x is None or isinstance(x, str):
        return x
    return float(fixed(x, places))


# --- per-q computation and cache ----------------------------------------------

def compute_row(q: int, cfg: RunConfig) -> tuple[TableRow, dict]:
    from .constants import ratio_from_parts, s_of_q
    from .lfun import euler_kronecker

    ek = euler_kronecker(q, precision=cfg.precision_mode)
    sq = s_of_q(q, cfg.pmax)
    g = ek.value
    row = TableRow(
        q=q,
        S_q=sq.value,
        qS_q=sq.value * q,
        gamma_q=g,
        gamma_q_over_log_q=g / DD(q).log(),
        ratio=ratio_from_parts(q, sq.value, g),
    )
    diag = {
        "pmax": sq.pmax,
        "S_tail_bound": sq.tail_bound,
        "im_residual": ek.lvalues.im_residual,
        "gamma_q_error_estimate": ek.error_estimate,
        "g": ek.diagnostics["g"],
    }
    return row, diag


def _cache_path(cache_dir: str, q: int) -> Path:
    return Path(cache_dir) / f"q{q}.txt"


def read_cache(cfg: RunConfig, q: int):
    if not cfg.cache_dir:
        return None
    path = _cache_path(cfg.cache_dir, q)
    try:
        text = path.read_text()
    except OSError:
        return None
    kv = dict(line.split("=", 1) for line in text.splitlines() if "=" in line)
    if kv.get("version") != CACHE_VERSION or kv.get("config") != cfg.digest() or kv.get("q") != str(q):
        return None
    try:
        row = TableRow(q, *(DD.from_string(kv[c]) for c in TABLE_COLUMNS[1:]))
        diag = json.loads(kv["diagnostics"])
    except (KeyError, ValueError):
        return None
    return row, diag


def write_cache(cfg: RunConfig, row: TableRow, diag: dict) -> None:
    if not cfg.cache_dir:
        return
    lines = [f"version={CACHE_VERSION}", f"config={cfg.digest()}", f"q={row.q}"]
    lines += [f"{c}={getattr(row, c).to_string(32)}" for c in TABLE_COLUMNS[1:]]
    lines.append("diagnostics=" + json.dumps(diag, sort_keys=True))
    try:
        os.makedirs(cfg.cache_dir, exist_ok=True)
        path = _cache_path(cfg.cache_dir, row.q)
        tmp = path.with_suffix(".tmp")
        tmp.write_text("\n".join(lines) + "\n")
        os.replace(tmp, path)
    except OSError as exc:
        print(f"warning: cache write failed for q={row.q}: {exc}", file=sys.stderr)


def cached_row(q: int, cfg: RunConfig):
    hit = read_cache(cfg, q)
    if hit is not None:
        return hit
    row, diag = compute_row(q, cfg)
    write_cache(cfg, row, diag)
    return row, diag


def _cached_row_job(args):
    return cached_row(*args)


# --- output -------------------------------------------------------------------

class Emitter:
    """Writes records in one of the three formats; CSV gets a single header."""

    def __init__(self, fmt: str, out, places: int):
        self.fmt = fmt
        self.out = out
        self.places = places
        self.header_done = False

    def record(self, fields: dict, diagnostics: dict | None = None, text: str | None = None):
        p = self.places
        if self.fmt == "json":
            obj = {k: _number(v, p) for k, v in fields.items()}
            obj["diagnostics"] = {k: _json_safe(v) for k, v in (diagnostics or {}).items()}
            self.out.write(json.dumps(obj) + "\n")
        elif self.fmt == "csv":
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            if not self.header_done:
                w.writerow(list(fields))
                self.header_done = True
            w.writerow([_cell(v, p) for v in fields.values()])
            self.out.write(buf.getvalue())
        else:
            if text is not None:
                self.out.write(text + "\n")
            else:
                self.out.write(" ".join(f"{k}={_cell(v, p)}" for k, v in fields.items()) + "\n")
            for k, v in (diagnostics or {}).items():
                self.out.write(f"# {k}={_cell(v, p) if isinstance(v, DD) else v}\n")
        self.out.flush()


def _cell(v, places):
    if isinstance(v, (DD, float)):
        return fixed(v, places)
    return str(v)


def _json_safe(v):
    if isinstance(v, DD):
        return float(v)
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    return v


# --- commands -----------------------------------------------------------------

def _places(cfg: RunConfig, default: int) -> int:
    return default if cfg.places is None else cfg.places


def cmd_ek(args, cfg, em):
    from .lfun import euler_kronecker

    r = euler_kronecker(args.q, precision=cfg.precision_mode)
    em.record({"q": args.q, "gamma_q": r.value}, r.diagnostics | {"error_estimate": r.error_estimate},
              text=fixed(r.value, em.places))


def cmd_sq(args, cfg, em):
    from .constants import s_of_q

    r = s_of_q(args.q, cfg.pmax)
    em.record({"q": args.q, "S_q": r.value}, {"pmax": r.pmax, "tail_bound": r.tail_bound},
              text=fixed(r.value, em.places))


def cmd_cq(args, cfg, em):
    from .constants import c_of_q

    r = c_of_q(args.q, cfg.pmax)
    em.record({"q": args.q, "C_q": r.value}, {"pmax": r.pmax, "log_tail_bound": r.log_tail_bound},
              text=fixed(r.value, em.places))


def cmd_e0(args, cfg, em):
    from .constants import coefficients

    r = coefficients(args.q, cfg.pmax, cfg.precision_mode)
    em.record({"q": args.q, "e0": r.e0}, dict(r.diagnostics), text=fixed(r.e0, em.places))


def cmd_ratio(args, cfg, em):
    from .constants import coefficients

    r = coefficients(args.q, cfg.pmax, cfg.precision_mode)
    em.record({"q": args.q, "ratio": r.ratio}, dict(r.diagnostics), text=fixed(r.ratio, em.places))


def cmd_table(args, cfg, em):
    from .ntheory import sieve_primes

    if args.q_max < 3:
        raise DomainError("q_max must be >= 3")
    qs = [int(q) for q in sieve_primes(args.q_max) if q > 2]
    jobs = [(q, cfg) for q in qs]
    if cfg.thread_count > 1:
        with ProcessPoolExecutor(cfg.thread_count) as pool:
            results = pool.map(_cached_row_job, jobs)
            for row, diag in results:
                _emit_row(em, row, diag)
    else:
        for job in jobs:
            _emit_row(em, *_cached_row_job(job))


def _emit_row(em, row: TableRow, diag: dict):
    fields = asdict(row)
    if em.fmt == "text":
        em.out.write(" ".join(_cell(v, em.places) for v in fields.values()) + "\n")
        em.out.flush()
    else:
        em.record(fields, diag if em.fmt == "json" else None)


def _x(args, cfg, default):
    x = getattr(args, "xpos", None)
    if x is None:
        x = cfg.x
    return default if x is None else x


def cmd_census(args, cfg, em):
    from .census import count_eq

    x = _x(args, cfg, 10**6)
    n = count_eq(args.q, x)
    em.record({"q": args.q, "x": x, "count": n}, text=str(n))


def cmd_compare(args, cfg, em):
    from .census import compare

    x = _x(args, cfg, 10**6)
    r = compare(args.q, x)
    em.record(
        {"q": r.q, "x": r.x, "count": r.count, "landau": r.landau, "ramanujan": r.ramanujan,
         "verdict": r.verdict.value},
        text=f"count={r.count} landau={fixed(r.landau, 3)} ramanujan={fixed(r.ramanujan, 3)} "
             f"verdict={r.verdict.value}",
    )


def cmd_mertens(args, cfg, em):
    from .constants import mertens_check

    x = _x(args, cfg, 10**6)
    r = mertens_check(args.q, x, cfg.pmax)
    em.record({"q": r.q, "x": r.x, "lhs": r.lhs, "rhs": r.rhs, "ratio": r.ratio},
              text=fixed(r.ratio, em.places))


def cmd_ekest(args, cfg, em):
    from .ekscan import ek_partial_sum

    x = _x(args, cfg, 10**6 * args.q)
    r = ek_partial_sum(args.q, x)
    em.record({"q": r.q, "x": r.x, "estimate": r.estimate, "terms_used": r.terms_used}, r.diagnostics,
              text=fixed(r.estimate, em.places))


def cmd_scan(args, cfg, em):
    from .ekscan import scan_candidates

    hits = scan_candidates(args.q_lo, args.q_hi, args.A, args.min_score)
    for h in hits:
        em.record({"q": h.q, "score": h.score, "witnesses": " ".join(map(str, h.witnesses))},
                  text=f"{h.q} score={fixed(h.score, em.places)} witnesses={','.join(map(str, h.witnesses))}")


def cmd_greedy(args, cfg, em):
    from .ekscan import greedy_offsets

    if args.target_sum is not None:
        s = greedy_offsets(target_sum=args.target_sum)
        if s.i0 is None:
            raise CycloekError("target sum not reached within the entry limit")
        em.record({"i0": s.i0, "a": s.a_i0}, text=f"i0={s.i0} a={s.a_i0}")
    else:
        s = greedy_offsets(count=args.count)
        em.record({"count": len(s.entries), "entries": " ".join(map(str, s.entries))},
                  text=" ".join(map(str, s.entries)))


def _positive_int(s: str) -> int:
    v = int(float(s)) if "e" in s.lower() else int(s)
    return v


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--pmax", type=_positive_int, default=None, help="prime bound for S(q) and C(q)")
    common.add_argument("--x", type=_positive_int, default=None, help="cutoff for census-type commands")
    common.add_argument("--format", choices=("csv", "json", "text"), default="text")
    common.add_argument("--cache", default=None, metavar="DIR", help="per-q result cache directory")
    common.add_argument("--threads", type=int, default=1, help="worker processes for table sweeps")
    common.add_argument("--precision", choices=("high", "fast"), default="high")
    common.add_argument("--places", type=int, default=None, help="decimal places in output")

    p = _Parser(prog="cycloek", description="Euler-Kronecker constants of prime cyclotomic fields")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(fn=fn)
        return sp

    for name, fn, help_ in (
        ("ek", cmd_ek, "Euler-Kronecker constant gamma_q"),
        ("sq", cmd_sq, "S(q) with tail bound"),
        ("cq", cmd_cq, "Euler product C(q, 1)"),
        ("e0", cmd_e0, "leading census constant e_0(q)"),
        ("ratio", cmd_ratio, "(q-1) e_1(q)/e_0(q)"),
    ):
        add(name, fn, help_).add_argument("q", type=int)
    add("table", cmd_table, "one row per odd prime q <= q_max").add_argument("q_max", type=int)
    for name, fn, help_ in (
        ("census", cmd_census, "E_q(x) = #{n <= x : q does not divide phi(n)}"),
        ("compare", cmd_compare, "census against the Landau and Ramanujan approximations"),
        ("mertens", cmd_mertens, "Mertens product over p = 1 mod q against its asymptotic"),
        ("ekest", cmd_ekest, "partial-sum estimate of gamma_q"),
    ):
        sp = add(name, fn, help_)
        sp.add_argument("q", type=int)
        sp.add_argument("xpos", nargs="?", type=_positive_int, metavar="x")
    sp = add("scan", cmd_scan, "score primes q by primes among a q + 1")
    sp.add_argument("q_lo", type=int)
    sp.add_argument("q_hi", type=int)
    sp.add_argument("A", type=int)
    sp.add_argument("min_score", type=float)
    sp = add("greedy", cmd_greedy, "greedy admissible offset sequence")
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--count", type=int)
    g.add_argument("--target-sum", type=float)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"cycloek: error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    if args.pmax is not None and args.pmax < 2:
        print("cycloek: error: --pmax must be >= 2", file=sys.stderr)
        return 1
    if args.threads < 1:
        print("cycloek: error: --threads must be >= 1", file=sys.stderr)
        return 1
    cfg = RunConfig(args.precision, args.pmax, args.x, args.format, args.cache, args.threads, args.places)
    default_places = TABLE_PLACES if args.command == "table" else SCALAR_PLACES
    em = Emitter(cfg.output_format, out, _places(cfg, default_places))
    try:
        args.fn(args, cfg, em)
    except DomainError as exc:
        print(f"cycloek: error: {exc}", file=sys.stderr)
        return 1
    except CycloekError as exc:
        print(f"cycloek: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
