"""Command-line interface.

Subcommands: play one logged game, run a tournament (config file or
bundled preset), verify a log by replay, aggregate metrics from a log
directory, emit a per-turn winning-rate trace, and benchmark the rollout
backends.
"""

from __future__ import annotations

import argparse
import glob
import os
import sys
import time

from . import metrics as metrics_mod
from . import speed
from .arena import (
    ArenaConfig,
    GameLog,
    PRESET_NAMES,
    generate_deck,
    load_config,
    preset,
    replay,
    run_game,
    run_tournament,
)
from .cards import new_deck
from .engine import setup_game, shuffle_deck
from .oracle import winrate_trace
from .players import BackendConfig, PlayerBinding


def _player_binding(name: str, seat: int, n_sims: int, script: str | None) -> PlayerBinding:
    kind = name.strip()
    label = f"{kind}-{seat}"
    if kind == "random":
        return PlayerBinding("random", label)
    if kind == "greedy":
        return PlayerBinding("greedy", label, n_sims=n_sims)
    if kind in ("llm", "reflect"):
        if script:
            backend = BackendConfig(kind="scripted", script_path=script)
        else:
            backend = BackendConfig(
                kind="scripted", script_default='{"action": 0, "reasoning": "default"}'
            )
        return PlayerBinding(kind, label, backend=backend)
    raise SystemExit(f"unknown player kind {name!r} (random|greedy|llm|reflect)")


def _parse_instrument(text: str, n_seats: int) -> tuple[int, ...]:
    if text == "all":
        return tuple(range(n_seats))
    if text == "none":
        return ()
    return tuple(int(tok) for tok in text.split(",") if tok != "")


def cmd_play(args) -> int:
    players = args.players.split(",")
    if args.seats is not None:
        if args.seats < len(players):
            raise SystemExit(f"--seats {args.seats} but {len(players)} players given")
        players += ["random"] * (args.seats - len(players))
    seats = tuple(
        _player_binding(name, seat, args.sims, args.script)
        for seat, name in enumerate(players)
    )
    config = ArenaConfig(
        seats=seats, decks=1, master_seed=args.deck_seed, n_sims=args.sims,
        p=args.p, instrument=_parse_instrument(args.instrument, len(seats)),
    ).validate()
    deck = generate_deck(config.master_seed, 0)
    log = run_game(config, deck, 0)
    end = log.game_end()
    print(f"winners: {end['winners']}  hand sizes: {end['hand_sizes']}  "
          f"turns: {end['turns']}")
    if args.out:
        log.write(args.out)
        print(f"log written to {args.out}")
    return 0


def cmd_tournament(args) -> int:
    if args.config:
        config = load_config(args.config)
    elif args.preset:
        config = preset(args.preset)
    else:
        raise SystemExit("tournament needs --config FILE or --preset NAME")

    overrides = {}
    if args.decks is not None:
        overrides["decks"] = args.decks
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if args.sims is not None:
        overrides["n_sims"] = args.sims
    if args.p is not None:
        overrides["p"] = args.p
    if args.crn:
        overrides["crn"] = True
    if args.jobs is not None:
        overrides["jobs"] = args.jobs
    if args.out is not None:
        overrides["out"] = args.out
    if args.instrument is not None:
        overrides["instrument"] = _parse_instrument(args.instrument, len(config.seats))
    if overrides:
        from dataclasses import replace

        config = replace(config, **overrides).validate()

    t0 = time.perf_counter()
    logs, report = run_tournament(config)
    dt = time.perf_counter() - t0
    print(report.to_csv(), end="")
    print(f"# {len(logs)} games in {dt:.1f}s (backend: {speed.backend_name()})",
          file=sys.stderr)
    if config.out:
        print(f"# logs and reports in {config.out}", file=sys.stderr)
    return 0


def cmd_replay(args) -> int:
    log = GameLog.read(args.log)
    verdict = replay(log)
    if verdict.ok:
        print(f"ok: {args.log}")
        return 0
    print(f"DIVERGED: {args.log} at event {verdict.divergence}: {verdict.detail}")
    return 1


def _load_logs(path: str) -> list[GameLog]:
    if os.path.isdir(path):
        files = sorted(glob.glob(os.path.join(path, "*.jsonl")))
    else:
        files = [path]
    if not files:
        raise SystemExit(f"no .jsonl logs under {path}")
    return [GameLog.read(f) for f in files]


def cmd_metrics(args) -> int:
    logs = _load_logs(args.logs)
    ks = tuple(int(k) for k in args.k.split(","))
    report = metrics_mod.aggregate(logs, p=args.p, k_values=ks,
                                   allow_mixed=args.allow_mixed)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(report.to_csv())
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            fh.write(report.to_json())
    if not args.csv and not args.json:
        print(report.to_csv(), end="")
    if args.correlations:
        columns = report.metric_columns()
        if len(columns["WR"]) < 2:
            print("# not enough complete player rows for correlations", file=sys.stderr)
        else:
            names, matrix = metrics_mod.correlation_matrix(columns)
            with open(args.correlations, "w", encoding="utf-8") as fh:
                fh.write("," + ",".join(names) + "\n")
                for name, row in zip(names, matrix):
                    cells = ["" if v is None else f"{v:.4f}" for v in row]
                    fh.write(name + "," + ",".join(cells) + "\n")
    return 0


def cmd_trace(args) -> int:
    log = GameLog.read(args.log)
    rows = winrate_trace(log, n_sims=args.sims, seed=args.seed)
    lines = ["turn_index,seat,estimate"]
    lines += [f"{turn},{seat},{value:.6f}" for turn, seat, value in rows]
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        print(text, end="")
    return 0


def cmd_bench(args) -> int:
    backends = speed.available_backends() if args.backend == "both" else [args.backend]
    state = setup_game(shuffle_deck(new_deck(), args.seed), args.seats)
    results = {}
    for backend in backends:
        if backend not in speed.available_backends():
            print(f"{backend}: not available", file=sys.stderr)
            continue
        speed.simulate_wins(state, 10, args.seed, backend=backend)  # warmup
        n = args.sims if backend == "cython" else max(1, args.sims // args.python_divisor)
        t0 = time.perf_counter()
        counts = speed.simulate_wins(state, n, args.seed, backend=backend)
        dt = time.perf_counter() - t0
        rate = n / dt
        results[backend] = rate
        print(f"{backend:8s} {n:8d} rollouts  {dt:8.3f}s  {rate:12.0f} rollouts/s  "
              f"wins={counts}")
    if len(results) == 2:
        print(f"speedup: {results['cython'] / results['python']:.1f}x")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="unomc",
        description="Seeded UNO arena with Monte Carlo decision scoring.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    play = sub.add_parser("play", help="run one logged game")
    play.add_argument("--players", default="random,random",
                      help="comma list: random|greedy|llm|reflect")
    play.add_argument("--seats", type=int,
                      help="seat count; extra seats beyond --players are random")
    play.add_argument("--deck-seed", type=int, default=0)
    play.add_argument("--sims", type=int, default=200, help="oracle rollouts per candidate")
    play.add_argument("--p", type=float, default=0.15, help="criticality threshold")
    play.add_argument("--instrument", default="none", help="'all', 'none', or seat list")
    play.add_argument("--script", help="scripted backend JSON for llm/reflect seats")
    play.add_argument("--out", help="write the game log here (.jsonl)")
    play.set_defaults(func=cmd_play)

    tour = sub.add_parser("tournament", help="run a full tournament")
    tour.add_argument("--config", help="JSON config file")
    tour.add_argument("--preset", choices=PRESET_NAMES)
    tour.add_argument("--decks", type=int)
    tour.add_argument("--seed", type=int)
    tour.add_argument("--sims", type=int)
    tour.add_argument("--p", type=float)
    tour.add_argument("--crn", action="store_true",
                      help="share rollout seeds across candidates")
    tour.add_argument("--instrument", help="'all', 'none', or seat list")
    tour.add_argument("--jobs", type=int)
    tour.add_argument("--out", help="output directory for logs and reports")
    tour.set_defaults(func=cmd_tournament)

    rep = sub.add_parser("replay", help="verify a game log by re-simulation")
    rep.add_argument("--log", required=True)
    rep.set_defaults(func=cmd_replay)

    met = sub.add_parser("metrics", help="aggregate metrics from logs")
    met.add_argument("--logs", required=True, help="log file or directory")
    met.add_argument("--p", type=float, help="re-filter criticality at this threshold")
    met.add_argument("--k", default="2,3,4")
    met.add_argument("--csv", help="write report CSV here")
    met.add_argument("--json", help="write report JSON here")
    met.add_argument("--correlations", help="write metric correlation matrix CSV here")
    met.add_argument("--allow-mixed", action="store_true")
    met.set_defaults(func=cmd_metrics)

    trace = sub.add_parser("trace", help="per-turn winning-rate CSV for one log")
    trace.add_argument("--log", required=True)
    trace.add_argument("--sims", type=int, default=1000)
    trace.add_argument("--seed", type=int, default=0)
    trace.add_argument("--out")
    trace.set_defaults(func=cmd_trace)

    bench = sub.add_parser("bench", help="compare rollout backends")
    bench.add_argument("--sims", type=int, default=50000)
    bench.add_argument("--seats", type=int, default=2)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--backend", default="both",
                       choices=["both", "python", "cython"])
    bench.add_argument("--python-divisor", type=int, default=20,
                       help="run sims/this many rollouts on the python backend")
    bench.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
