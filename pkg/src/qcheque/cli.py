"""Command line entry point.

    qcheque table1 [--shots N] [--seed S] [--noise none|default|file=PATH] [--format table|json|csv]
    qcheque table2 ...
    qcheque tomography {cheque,ancilla} ...
    qcheque e2e [--m 3] [--amount 100] [--tamper none|amount|serial|signature|double_spend] [--mode paper|hashed]

Exit codes: 0 success, 1 usage error, 2 self-check failure.
JSON reports always carry ``command``, ``config``, ``timestamp`` and one of
``rows`` / ``matrices`` / ``outcome``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

from .experiments import (
    TABLE_SHOTS,
    cheque_generation_circuit,
    cheque_verification_circuit,
    ideal_p0,
    table_rows,
    tomography_report,
    tomography_target,
    within_band,
)
from .noise import NoiseParams, default_params, load_params
from .protocol import run_transaction
from .swap_test import DEFAULT_LAMBDA, DEFAULT_REPS

EXIT_OK, EXIT_USAGE, EXIT_SELFCHECK = 0, 1, 2

DEFAULTS = {"seed": 2017, "format": "table", "out": None}
# table/tomography reports always contain both ideal and noisy data; e2e runs ideal unless asked
COMMAND_DEFAULTS = {
    "table1": {"shots": None, "noise": "default"},
    "table2": {"shots": None, "noise": "default"},
    "tomography": {"shots": 8192, "noise": "default"},
    "e2e": {"shots": 512, "noise": "none"},
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--shots", type=int, default=None)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--noise", default=None, help="none, default, or file=PATH")
    common.add_argument("--format", choices=("table", "json", "csv"), default=None)
    common.add_argument("--out", default=None, help="write the report here instead of stdout")
    common.add_argument("--config", default=None, help="flat key=value file mirroring the flags")
    common.add_argument("--dump-circuit", action="store_true")

    parser = _Parser(prog="qcheque", description="Quantum cheque simulator experiments.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("table1", parents=[common], help="cheque generation probabilities")
    sub.add_parser("table2", parents=[common], help="cheque verification (swap test) probabilities")
    tomo = sub.add_parser("tomography", parents=[common], help="single-qubit tomography")
    tomo.add_argument("target", choices=("cheque", "ancilla"))
    e2e = sub.add_parser("e2e", parents=[common], help="gen -> sign -> verify transaction")
    e2e.add_argument("--m", type=int, default=3)
    e2e.add_argument("--amount", type=int, default=100)
    e2e.add_argument("--tamper", choices=("none", "amount", "serial", "signature", "double_spend"), default="none")
    e2e.add_argument("--mode", choices=("paper", "hashed"), default="paper")
    e2e.add_argument("--lambda1", type=float, default=DEFAULT_LAMBDA)
    e2e.add_argument("--lambda2", type=float, default=DEFAULT_LAMBDA)
    e2e.add_argument("--reps", type=int, default=DEFAULT_REPS)
    e2e.add_argument("--log", default="qcheque_messages.jsonl", help="message log (JSONL)")
    return parser


def read_config(path: str) -> dict:
    cfg = {}
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise UsageError(f"config line {line!r} is not key=value")
        cfg[key.strip().replace("-", "_")] = value.strip()
    return cfg


def resolve_config(args) -> dict:
    """Flags override the config file, which overrides built-in defaults."""
    file_cfg = read_config(args.config) if args.config else {}
    cfg = dict(DEFAULTS, **COMMAND_DEFAULTS[args.command])
    custom = {k: file_cfg[k] for k in ("p1", "p2", "p_read") if k in file_cfg}
    if custom and "noise" not in file_cfg:
        cfg["noise"] = "custom"
    for key in ("shots", "seed", "noise", "format", "out"):
        if key in file_cfg:
            cfg[key] = file_cfg[key]
        if getattr(args, key) is not None:
            cfg[key] = getattr(args, key)
    try:
        cfg["seed"] = int(cfg["seed"])
        cfg["shots"] = None if cfg["shots"] in (None, "") else int(cfg["shots"])
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if cfg["format"] not in ("table", "json", "csv"):
        raise UsageError(f"unknown format {cfg['format']!r}")
    if cfg["shots"] is not None and cfg["shots"] <= 0:
        raise UsageError("--shots must be positive")
    if args.command in ("table1", "table2") and cfg["shots"] is not None and cfg["shots"] not in TABLE_SHOTS:
        raise UsageError(f"table commands run at {TABLE_SHOTS} shots")
    cfg["noise_params"] = resolve_noise(cfg["noise"], custom)
    return cfg


def resolve_noise(spec: str, custom: dict | None = None) -> NoiseParams:
    try:
        if spec == "custom":
            return NoiseParams(**{k: float(v) for k, v in (custom or {}).items()})
        if spec == "none":
            return NoiseParams()
        if spec == "default":
            return default_params()
        if spec.startswith("file="):
            return load_params(spec[5:])
    except (OSError, ValueError, TypeError) as exc:
        raise UsageError(f"bad noise parameters: {exc}") from None
    raise UsageError(f"--noise must be none, default or file=PATH, got {spec!r}")


def _public_config(cfg: dict) -> dict:
    out = {k: v for k, v in cfg.items() if k != "noise_params"}
    out["noise_params"] = cfg["noise_params"].to_dict()
    return out


# --- commands -----------------------------------------------------------------


def cmd_table(which: int, cfg: dict) -> tuple[dict, bool]:
    shots_list = TABLE_SHOTS if cfg["shots"] is None else (cfg["shots"],)
    rows = table_rows(which, cfg["seed"], cfg["noise_params"], shots_list)
    target = ideal_p0(which)
    ok = all(within_band(r.p0, target, r.shots) for r in rows if r.kind == "simulation")
    title = "For Quantum Cheque Generation" if which == 1 else "For Quantum Cheque Verification"
    return {"title": title, "rows": [r.to_dict() for r in rows], "ideal_p0": target, "self_check": ok}, ok


def cmd_table1(cfg: dict) -> tuple[dict, bool]:
    return cmd_table(1, cfg)


def cmd_table2(cfg: dict) -> tuple[dict, bool]:
    return cmd_table(2, cfg)


def cmd_tomography(target: str, cfg: dict) -> tuple[dict, bool]:
    rep = tomography_report(target, cfg["shots"], cfg["seed"], cfg["noise_params"])
    return {
        "target": target,
        "shots": rep["shots"],
        "matrices": {k: v.to_json() for k, v in rep["matrices"].items()},
        "comparisons": {k: v.to_dict() for k, v in rep["comparisons"].items()},
        "physical": {k: v.is_physical for k, v in rep["matrices"].items()},
    }, True


def cmd_e2e(args, cfg: dict) -> tuple[dict, bool]:
    if args.m < 1 or args.reps < 1 or args.amount < 0:
        raise UsageError("--m and --reps must be positive, --amount nonnegative")
    noise = None if cfg["noise_params"].is_ideal else cfg["noise_params"]
    outcomes, session = run_transaction(
        args.m, args.amount, cfg["seed"], mode=args.mode, tamper=args.tamper,
        lambda1=args.lambda1, lambda2=args.lambda2, reps=args.reps, shots=cfg["shots"], noise=noise,
    )
    log_path = session.channel.write(args.log)
    return {
        "outcome": outcomes[-1].to_dict(),
        "outcomes": [o.to_dict() for o in outcomes],
        "m": args.m, "amount": args.amount, "tamper": args.tamper, "mode": args.mode,
        "lambda1": args.lambda1, "lambda2": args.lambda2, "reps": args.reps,
        "noise_applied": (noise or NoiseParams()).to_dict(),
        "message_log": str(log_path),
        "messages": len(session.channel.messages),
    }, True


# --- rendering -----------------------------------------------------------------


def _fmt_matrix(m: dict) -> list[str]:
    lines = []
    for i in range(2):
        re = "  ".join(f"{m['re'][i][j]:+.3f}" for j in range(2))
        im = "  ".join(f"{m['im'][i][j]:+.3f}" for j in range(2))
        lines.append(f"    [{re}]  + i[{im}]")
    return lines


def render_table(command: str, body: dict) -> str:
    out = []
    if command in ("table1", "table2"):
        out.append(body["title"])
        out.append(f"{'Number of Shots':<22}{'P(|0>)':>10}{'P(|1>)':>10}")
        for r in body["rows"]:
            out.append(f"{r['label']:<22}{r['p0']:>10.3f}{r['p1']:>10.3f}")
        out.append(f"self-check (ideal rows within 5 sigma of {body['ideal_p0']:.5f}): {'PASS' if body['self_check'] else 'FAIL'}")
    elif command == "tomography":
        out.append(f"tomography of the {body['target']} state, {body['shots']} shots per basis")
        for name, m in body["matrices"].items():
            out.append(f"  rho_{name}:")
            out.extend(_fmt_matrix(m))
        for name, c in body["comparisons"].items():
            out.append(f"  {name}: fidelity={c['fidelity']:.4f} trace_distance={c['trace_distance']:.4f} max_dev={c['max_entry_dev']:.4f}")
    else:
        for o in body["outcomes"]:
            out.append(f"accepted={o['accepted']} reason={o['reason']}")
        out.append(f"message log: {body['message_log']} ({body['messages']} messages)")
    if "circuit" in body:
        out.append("circuit:")
        out.extend("  " + line for line in body["circuit"].splitlines())
    return "\n".join(out) + "\n"


def render_csv(command: str, body: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if command in ("table1", "table2"):
        w.writerow(["label", "kind", "shots", "p0", "p1"])
        for r in body["rows"]:
            w.writerow([r["label"], r["kind"], r["shots"], r["p0"], r["p1"]])
    elif command == "tomography":
        w.writerow(["matrix", "row", "col", "re", "im"])
        for name, m in body["matrices"].items():
            for i in range(2):
                for j in range(2):
                    w.writerow([name, i, j, m["re"][i][j], m["im"][i][j]])
    else:
        w.writerow(["verify", "accepted", "reason"])
        for k, o in enumerate(body["outcomes"]):
            w.writerow([k, o["accepted"], o["reason"]])
    return buf.getvalue()


def _circuit_for(args) -> str:
    if args.command == "table1":
        return cheque_generation_circuit().to_text()
    if args.command == "table2":
        return cheque_verification_circuit().to_text()
    if args.command == "tomography":
        return tomography_target(args.target)[0].to_text()
    return cheque_verification_circuit().to_text()


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        if args.command == "table1":
            body, ok = cmd_table1(cfg)
        elif args.command == "table2":
            body, ok = cmd_table2(cfg)
        elif args.command == "tomography":
            body, ok = cmd_tomography(args.target, cfg)
        else:
            body, ok = cmd_e2e(args, cfg)
    except UsageError as exc:
        print(f"qcheque: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.dump_circuit:
        body["circuit"] = _circuit_for(args)

    if cfg["format"] == "json":
        report = {
            "command": args.command,
            "config": _public_config(cfg),
            **body,
            "timestamp": datetime.now(timezone.utc).isoformat(),
        }
        text = json.dumps(report, indent=2) + "\n"
    elif cfg["format"] == "csv":
        text = render_csv(args.command, body)
    else:
        text = render_table(args.command, body)
    if cfg["out"]:
        Path(cfg["out"]).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if ok else EXIT_SELFCHECK


if __name__ == "__main__":
    sys.exit(main())
