"""``cogmac`` command-line entry point.

Exit codes: 0 clean, 1 usage or schema error, 2 degraded (some solver did
not converge), 3 replay mismatch.
"""
from __future__ import annotations

import argparse
import datetime as _dt
import json
import os
import sys
import time

from .. import __version__
from ..ensemble_sim import default_workers
from . import commands
from .commands import COMMANDS, Outcome, UsageError
from .manifest import RunManifest
from .problem import ProblemError, ProblemFile

EXIT_OK, EXIT_USAGE, EXIT_DEGRADED, EXIT_MISMATCH = 0, 1, 2, 3
MANIFEST_PREFIX = "# manifest: "


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _dist(values):
    if values == ["file"]:
        return "file", 0
    if len(values) == 2 and values[0] == "sweep":
        try:
            n = int(values[1])
        except ValueError:
            raise UsageError("--dist sweep needs an integer count") from None
        if n < 1:
            raise UsageError("--dist sweep needs a positive count")
        return "sweep", n
    raise UsageError("--dist expects 'file' or 'sweep N'")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cogmac", description="Cognitive MAC rate regions, exponents and ensembles "
                                           "under mismatched decoding.")
    p.add_argument("--version", action="version", version=f"cogmac {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, seed=True):
        sp.add_argument("--problem", required=True, help="problem JSON file")
        sp.add_argument("--output", "-o", help="output file (default: stdout)")
        if seed:
            sp.add_argument("--seed", type=int, default=0)

    r = sub.add_parser("region", help="boundary of a rate region")
    common(r)
    r.add_argument("--kind", required=True, choices=commands.REGION_KINDS)
    r.add_argument("--dist", nargs="+", default=["file"], metavar="file|sweep N")
    r.add_argument("--grid", type=int, default=21, help="number of R1 grid points")
    r.add_argument("--out", choices=("json", "csv"), default="json", help="output format")
    r.add_argument("--starts", type=int, default=2)

    e = sub.add_parser("exponent", help="error exponents at a rate pair")
    common(e)
    e.add_argument("--R1", type=float, required=True)
    e.add_argument("--R2", type=float, required=True)
    e.add_argument("--scheme", choices=("sup", "bin"), default="sup")
    e.add_argument("--starts", type=int, default=16)

    s = sub.add_parser("simulate", help="Monte Carlo over the random-code ensemble")
    common(s)
    s.add_argument("--scheme", choices=tuple(commands.SCHEME_ALIASES), default="superposition")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--R1", type=float, default=0.0)
    s.add_argument("--R2", type=float, default=0.0)
    s.add_argument("--trials", type=int, default=1000)
    s.add_argument("--gamma", type=float, default=None, help="binning excess rate")
    s.add_argument("--exact", action="store_true", help="also run the exact small-n oracles")
    s.add_argument("--probe-outside", type=float, default=None, metavar="FACTOR",
                   help="set R1 to FACTOR times the region edge at R2")
    s.add_argument("--budget", type=float, default=5e9)
    s.add_argument("--starts", type=int, default=2)

    u = sub.add_parser("su-bound", help="single-user mismatch capacity lower bounds")
    common(u)
    u.add_argument("--dist", nargs="+", default=["file"], metavar="file|sweep N")
    u.add_argument("--starts", type=int, default=2)

    rp = sub.add_parser("replay", help="re-run the manifest embedded in an output file")
    rp.add_argument("file")
    rp.add_argument("--output", "-o", help="where to write the re-run output (default: stdout)")
    rp.add_argument("--check", action="store_true",
                    help="compare the re-run output with FILE byte for byte")
    return p


def _params(args) -> dict:
    d = {k: v for k, v in vars(args).items() if k not in ("command", "problem", "output")}
    if "dist" in d:
        d["dist"], d["n_dist"] = _dist(d["dist"])
    if args.command == "simulate":
        d["scheme"] = commands.SCHEME_ALIASES[d["scheme"]]
    return d


def render(manifest: RunManifest, outcome: Outcome, fmt: str = "json") -> str:
    if fmt == "csv":
        head = MANIFEST_PREFIX + json.dumps(manifest.to_dict(), separators=(",", ":")) + "\n"
        return head + "".join(",".join(row) + "\n" for row in outcome.csv_rows)
    doc = {"manifest": manifest.to_dict(), "degraded": outcome.degraded,
           "result": commands._jsonable(outcome.payload)}
    return json.dumps(doc, indent=1) + "\n"


def execute(manifest: RunManifest) -> tuple[str, Outcome]:
    pb = ProblemFile.from_dict(manifest.problem)
    outcome = COMMANDS[manifest.command](pb, manifest.params)
    return render(manifest, outcome, manifest.params.get("out", "json")), outcome


def read_manifest(path) -> tuple[RunManifest, str]:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if text.startswith(MANIFEST_PREFIX):
        d = json.loads(text[len(MANIFEST_PREFIX):text.index("\n")])
    else:
        d = json.loads(text)["manifest"]
    return RunManifest.from_dict(d), text


def _write(path, text, started, wall, code, argv):
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    side = {"started_utc": started, "wall_clock_s": round(wall, 3), "threads": default_workers(),
            "exit_code": code, "argv": argv}
    with open(f"{path}.run.json", "w", encoding="utf-8") as fh:
        json.dump(side, fh, indent=1)
        fh.write("\n")


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    started = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    t0 = time.perf_counter()
    try:
        args = build_parser().parse_args(argv)
        if args.command == "replay":
            manifest, original = read_manifest(args.file)
        else:
            pb = ProblemFile.load(args.problem)
            params = _params(args)
            manifest = RunManifest(args.command, params, pb.to_dict(), params.get("seed", 0),
                                   commands.solver_settings(args.command, params))
        text, outcome = execute(manifest)
    except (UsageError, ProblemError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    code = EXIT_DEGRADED if outcome.degraded else EXIT_OK
    log = sys.stderr if args.output is None else sys.stdout
    for line in outcome.summary:
        print(line, file=log)
    if args.command == "replay" and args.check:
        same = text == original
        print("replay: identical" if same else "replay: output differs", file=log)
        code = code if same else EXIT_MISMATCH
    _write(args.output, text, started, time.perf_counter() - t0, code, argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
