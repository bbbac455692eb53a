"""Command-line interface.

Four subcommands: `shares` computes share values (with certificates for the
AnyPrice share), `allocate` produces and certifies an allocation, `verify`
re-checks an allocation or price equilibrium, and `game` runs bidding games,
worst-case adversary sweeps, and transcript replays.

stdout carries exactly one JSON document per run; diagnostics go to stderr.
Exit codes: 0 success, 1 a verified bound failed, 2 malformed input,
3 a size guard tripped, 4 method/instance mismatch.
"""

from __future__ import annotations

import argparse
import json
import sys

from .bidding import (
    GameTranscript,
    best_good_z,
    enumerate_win_patterns,
    meta_strategy,
    replay_transcript,
    run_game,
    strategy_aps35,
    strategy_bid_max_value,
    strategy_lemma34,
    strategy_rank_item,
    strategy_tps,
    strategy_zero,
    worst_case_adversary,
)
from .core import (
    Allocation,
    GuardError,
    InputError,
    Instance,
    Rat,
    parse_instance,
    rat_from_str,
    rat_to_str,
)
from .greedy_efx import greedy_efx_full
from .shares import (
    aps_exact,
    mms_exact,
    pessimistic_share_exact,
    proportional_share,
    tps,
    two_agent_aps_allocation,
    unit_demand_aps,
    wmms_exact,
)
from .verify import BOUND_SETS, check_allocation, check_ce

NOTIONS = ("proportional", "tps", "aps", "pessimistic", "mms", "wmms", "unit-demand")
STRATEGY_NAMES = ("meta", "tps", "rank", "zero", "maxval", "maxval-tps", "aps35", "aps35-alt", "lemma34")


def _emit(doc: dict) -> None:
    print(json.dumps(doc, indent=2))


def _load_instance(path: str) -> Instance:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return parse_instance(fh.read())
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from None


def _load_json(path: str, what: str) -> object:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{what}: malformed JSON: {exc}") from None


def _load_allocation(path: str, n: int) -> Allocation:
    doc = _load_json(path, "allocation")
    if isinstance(doc, dict):
        doc = doc.get("allocation")
    if not isinstance(doc, list):
        raise InputError("allocation: expected an array of bundles")
    if len(doc) != n:
        raise InputError(f"allocation: expected {n} bundles, got {len(doc)}")
    bundles = []
    for i, bundle in enumerate(doc):
        if not isinstance(bundle, list) or not all(
            isinstance(j, int) and not isinstance(j, bool) for j in bundle
        ):
            raise InputError(f"allocation[{i}]: expected an array of item indices")
        bundles.append(tuple(bundle))
    return Allocation(tuple(bundles))


def _load_prices(path: str, m: int) -> tuple[Rat, ...]:
    doc = _load_json(path, "prices")
    if isinstance(doc, dict):
        doc = doc.get("prices")
    if not isinstance(doc, list) or len(doc) != m:
        raise InputError(f"prices: expected an array of {m} rationals")
    out = []
    for j, p in enumerate(doc):
        if isinstance(p, int) and not isinstance(p, bool):
            out.append(Rat(p))
        elif isinstance(p, str):
            out.append(rat_from_str(p, f"prices[{j}]"))
        else:
            raise InputError(f"prices[{j}]: expected a 'p/q' or integer string")
    return tuple(out)


def _parse_tie_break(text: str):
    if text == "lowest":
        return "lowest"
    if text.startswith("avoid:"):
        try:
            return ("avoid", int(text.split(":", 1)[1]))
        except ValueError:
            raise InputError(f"tie-break: bad agent index in {text!r}") from None
    raise InputError(f"tie-break: expected 'lowest' or 'avoid:I', got {text!r}")


def _make_strategy(name: str, z: int | None, valuation, b: Rat):
    if name == "meta":
        return meta_strategy(valuation, b)
    if name == "tps":
        return strategy_tps(valuation, b)
    if name == "rank":
        return strategy_rank_item(valuation, b)
    if name == "zero":
        return strategy_zero(valuation, b)
    if name == "maxval":
        return strategy_bid_max_value(valuation, b)
    if name == "maxval-tps":
        return strategy_bid_max_value(valuation, b, cap=tps(valuation, b))
    if name == "aps35":
        return strategy_aps35(valuation, b, best_good_z(valuation, b) if z is None else z)
    if name == "aps35-alt":
        return strategy_aps35(
            valuation, b, best_good_z(valuation, b) if z is None else z, eight_fifteenths=True
        )
    if name == "lemma34":
        if z is None:
            raise InputError("strategies: lemma34 needs an explicit target, e.g. 0=lemma34:5")
        return strategy_lemma34(valuation, b, z)
    raise InputError(f"strategies: unknown strategy {name!r}, expected one of {', '.join(STRATEGY_NAMES)}")


def _parse_strategy_specs(text: str | None, n: int) -> dict[int, tuple[str, int | None]]:
    specs: dict[int, tuple[str, int | None]] = {}
    if not text:
        return specs
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise InputError(f"strategies: expected I=name entries, got {part!r}")
        left, right = part.split("=", 1)
        try:
            agent = int(left)
        except ValueError:
            raise InputError(f"strategies: bad agent index {left!r}") from None
        if not (0 <= agent < n):
            raise InputError(f"strategies: agent {agent} out of range")
        z: int | None = None
        name = right
        if ":" in right:
            name, ztext = right.split(":", 1)
            try:
                z = int(ztext)
            except ValueError:
                raise InputError(f"strategies: bad target {ztext!r} for agent {agent}") from None
        if name not in STRATEGY_NAMES:
            raise InputError(
                f"strategies: unknown strategy {name!r}, expected one of {', '.join(STRATEGY_NAMES)}"
            )
        specs[agent] = (name, z)
    return specs


# ---------------------------------------------------------------------------
# Subcommands.


def _agent_shares(inst: Instance, i: int, notions: list[str]) -> dict:
    v = inst.valuations[i]
    b = inst.entitlements[i]
    out: dict = {
        "agent": i,
        "name": inst.agent_names[i],
        "entitlement": rat_to_str(b),
        "shares": {},
    }
    for notion in notions:
        if notion == "proportional":
            out["shares"][notion] = rat_to_str(proportional_share(v, b))
        elif notion == "tps":
            out["shares"][notion] = rat_to_str(tps(v, b))
        elif notion == "aps":
            res = aps_exact(v, b)
            out["shares"][notion] = {
                "value": res.value,
                "certificate": res.certificate.to_json_dict(),
                "witness": res.witness.to_json_dict(),
            }
        elif notion == "pessimistic":
            out["shares"][notion] = pessimistic_share_exact(v, b)
        elif notion == "mms":
            out["shares"][notion] = mms_exact(v, inst.n)
        elif notion == "wmms":
            out["shares"][notion] = rat_to_str(wmms_exact(inst.entitlements, i, v))
        elif notion == "unit-demand":
            out["shares"][notion] = unit_demand_aps(v.item_values, b)
        else:
            raise InputError(f"notions: unknown notion {notion!r}, expected one of {', '.join(NOTIONS)}")
    return out


def cmd_shares(args) -> int:
    inst = _load_instance(args.instance)
    notions = [s.strip() for s in args.notions.split(",") if s.strip()]
    if not notions:
        raise InputError("notions: empty list")
    if args.agent is not None:
        if not (0 <= args.agent < inst.n):
            raise InputError(f"agent: index {args.agent} out of range")
        indices = [args.agent]
    else:
        indices = list(range(inst.n))
    _emit({"agents": [_agent_shares(inst, i, notions) for i in indices]})
    return 0


def cmd_allocate(args) -> int:
    inst = _load_instance(args.instance)
    doc: dict = {"method": args.method, "seed": args.seed}
    if args.method == "bidding":
        strategies = [meta_strategy(inst.valuations[i], inst.entitlements[i]) for i in range(inst.n)]
        transcript = run_game(inst, strategies, _parse_tie_break(args.tie_break))
        alloc = transcript.allocation
        report = check_allocation(inst, alloc, "arbitrary-entitlements")
        doc["transcript"] = transcript.to_json_dict()
    elif args.method == "greedy-efx":
        if not inst.equal_entitlements():
            print("error: greedy-efx requires equal entitlements", file=sys.stderr)
            return 4
        alloc = greedy_efx_full(inst)
        report = check_allocation(inst, alloc, "equal-entitlements-gefx")
    else:
        if inst.n != 2:
            print("error: two-agent allocation requires exactly 2 agents", file=sys.stderr)
            return 4
        alloc = two_agent_aps_allocation(
            inst.valuations[0], inst.valuations[1], inst.entitlements[0], inst.entitlements[1]
        )
        report = check_allocation(inst, alloc, "two-agent-aps")
    doc["allocation"] = [list(b) for b in alloc.bundles]
    doc["report"] = report.to_json_dict()
    _emit(doc)
    if not report.all_passed:
        print("error: allocation failed its guarantee bounds", file=sys.stderr)
        return 1
    return 0


def cmd_verify(args) -> int:
    inst = _load_instance(args.instance)
    alloc = _load_allocation(args.allocation, inst.n)
    doc: dict = {"allocation": [list(b) for b in alloc.bundles]}
    failed = False
    if args.ce is not None:
        prices = _load_prices(args.ce, inst.m)
        ok = check_ce(inst, alloc, prices)
        doc["ce"] = ok
        failed = failed or not ok
    if args.bounds is not None or args.ce is None:
        bounds = args.bounds or "arbitrary-entitlements"
        report = check_allocation(inst, alloc, bounds)
        doc["bounds"] = report.to_json_dict()
        failed = failed or not report.all_passed
    _emit(doc)
    if failed:
        print("error: verification failed", file=sys.stderr)
        return 1
    return 0


def cmd_game(args) -> int:
    inst = _load_instance(args.instance)
    if args.replay is not None:
        raw = _load_json(args.replay, "transcript")
        if not isinstance(raw, dict):
            raise InputError("transcript: expected a JSON object")
        transcript = GameTranscript.from_json_dict(raw)
        alloc = replay_transcript(inst, transcript)
        _emit({"replay": "ok", "allocation": [list(b) for b in alloc.bundles]})
        return 0
    specs = _parse_strategy_specs(args.strategies, inst.n)
    if args.adversary is not None:
        focal = args.focal
        if not (0 <= focal < inst.n):
            raise InputError(f"focal: agent {focal} out of range")
        v = inst.valuations[focal]
        b = inst.entitlements[focal]
        name, z = specs.get(focal, ("meta", None))

        def fresh():
            return _make_strategy(name, z, v, b)

        if args.adversary == "worst":
            worst_value = None
            worst_pattern = None
            worst_transcript = None
            feasible = 0
            patterns = enumerate_win_patterns(inst.m)
            for wins in patterns:
                t = worst_case_adversary(v, b, fresh(), wins)
                if not t.infeasible:
                    feasible += 1
                got = v.value(t.allocation.bundles[0])
                if worst_value is None or got < worst_value:
                    worst_value, worst_pattern, worst_transcript = got, wins, t
            doc = {
                "focal": focal,
                "strategy": name,
                "patterns_checked": len(patterns),
                "patterns_feasible": feasible,
                "min_value": worst_value,
                "pattern": list(worst_pattern) if worst_pattern is not None else None,
                "transcript": worst_transcript.to_json_dict() if worst_transcript else None,
            }
            _emit(doc)
            _maybe_write_transcript(args, worst_transcript)
            return 0
        wins = _parse_pattern(args.adversary)
        t = worst_case_adversary(v, b, fresh(), wins)
        doc = {
            "focal": focal,
            "strategy": name,
            "pattern": list(wins),
            "infeasible": t.infeasible,
            "value": v.value(t.allocation.bundles[0]),
            "transcript": t.to_json_dict(),
        }
        _emit(doc)
        _maybe_write_transcript(args, t)
        return 0
    strategies = []
    for i in range(inst.n):
        name, z = specs.get(i, ("meta", None))
        strategies.append(_make_strategy(name, z, inst.valuations[i], inst.entitlements[i]))
    transcript = run_game(inst, strategies, _parse_tie_break(args.tie_break))
    _emit(
        {
            "allocation": [list(b) for b in transcript.allocation.bundles],
            "transcript": transcript.to_json_dict(),
        }
    )
    _maybe_write_transcript(args, transcript)
    return 0


def _parse_pattern(text: str) -> tuple[int, ...]:
    if not text.startswith("pattern:"):
        raise InputError(f"adversary: expected 'worst' or 'pattern:K[,L]', got {text!r}")
    body = text.split(":", 1)[1]
    if not body:
        return ()
    try:
        wins = tuple(int(x) for x in body.split(","))
    except ValueError:
        raise InputError(f"adversary: bad pattern {body!r}") from None
    return wins


def _maybe_write_transcript(args, transcript) -> None:
    if getattr(args, "transcript", None) and transcript is not None:
        with open(args.transcript, "w", encoding="utf-8") as fh:
            json.dump(transcript.to_json_dict(), fh, indent=2)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fairshare",
        description="Exact fair division of indivisible goods under arbitrary entitlements.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("shares", help="compute share values for the agents of an instance")
    p.add_argument("instance")
    p.add_argument("--agent", type=int, default=None, help="only this agent (default: all)")
    p.add_argument(
        "--notions",
        default="proportional,tps,aps,pessimistic",
        help=f"comma-separated subset of: {', '.join(NOTIONS)}",
    )
    p.set_defaults(func=cmd_shares)

    p = sub.add_parser("allocate", help="compute and certify an allocation")
    p.add_argument("instance")
    p.add_argument("--method", choices=("bidding", "greedy-efx", "two-agent"), required=True)
    p.add_argument("--tie-break", default="lowest", help="'lowest' or 'avoid:I'")
    p.add_argument("--seed", type=int, default=None, help="echoed into the output; runs are deterministic")
    p.set_defaults(func=cmd_allocate)

    p = sub.add_parser("verify", help="re-check an allocation against bounds or a price equilibrium")
    p.add_argument("instance")
    p.add_argument("allocation")
    p.add_argument("--ce", default=None, metavar="PRICES", help="price file for an equilibrium check")
    p.add_argument("--bounds", default=None, choices=BOUND_SETS)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("game", help="run bidding games, adversary sweeps, or replays")
    p.add_argument("instance")
    p.add_argument("--strategies", default=None, help="e.g. '0=aps35,1=tps,2=aps35:7'")
    p.add_argument("--focal", type=int, default=0, help="agent under test in adversary mode")
    p.add_argument("--adversary", default=None, help="'worst' or 'pattern:K[,L]'")
    p.add_argument("--tie-break", default="lowest", help="'lowest' or 'avoid:I'")
    p.add_argument("--transcript", default=None, metavar="OUT", help="write the transcript JSON here")
    p.add_argument("--replay", default=None, metavar="FILE", help="validate a transcript against the instance")
    p.set_defaults(func=cmd_game)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except GuardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
