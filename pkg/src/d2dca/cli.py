"""Command-line entry point: ``d2dca simulate|attack-suite|vectors|enroll``."""

from __future__ import annotations

import argparse
import json
import random
import secrets
import sys
from pathlib import Path

from .adversary import RUNNERS, run_attack
from .crypto import Seed
from .harness import Scenario, ScenarioInvalid, run_scenario, summarize
from .protocol import DeviceId, SessionConfig, enroll
from .protocol.errors import DuplicateEnrollment, ProtocolError
from .protocol.gateway import Gateway
from .protocol.registry import Registry
from .suite import ConfigParse, default_expectation, run_attack_suite
from .vectors import emit
from .world import DEFAULT_GW_RAW

EXIT_OK = 0
EXIT_ATTACK_SUCCEEDED = 1
EXIT_CONFIG = 2


def _print(obj) -> None:
    print(json.dumps(obj, indent=2, sort_keys=True))


def _load_scenario(path: str) -> Scenario:
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigParse(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigParse(f"{path}: {exc}") from exc
    return Scenario.from_dict(data)


def cmd_simulate(args) -> int:
    sc = _load_scenario(args.scenario)
    if sc.attacker is None:
        tr = run_scenario(sc)
        summary = summarize(tr).to_dict()
        code = EXIT_OK
        if sc.ca_rounds_expected is not None and summary["ca_rounds"] != sc.ca_rounds_expected:
            summary["ca_rounds_expected"] = sc.ca_rounds_expected
            code = EXIT_ATTACK_SUCCEEDED
        report = {"scenario_seed": sc.scenario_seed, "summary": summary}
    else:
        atk = sc.attacker
        if atk.variant not in RUNNERS[atk.kind][1]:
            raise ScenarioInvalid(f"attacker {atk.kind} needs a variant from "
                                  f"{sorted(RUNNERS[atk.kind][1])}")
        options = {}
        if atk.kind == "Cloner" and atk.clone_delay:
            options["clone_delay"] = atk.clone_delay
        if atk.kind == "MitmMutator" and atk.full_sweep:
            options["full_sweep"] = True
        v = run_attack(atk.kind, atk.variant, sc.scenario_seed, sc.session, sc.channel, **options)
        tr = v.transcript
        expect = default_expectation(atk.kind, atk.variant)
        unexpected = v.attack_succeeded and not v.residual_risk and expect != "succeed"
        report = {"verdict": v.summary(), "expected": expect}
        code = EXIT_ATTACK_SUCCEEDED if unexpected else EXIT_OK
    if args.transcript:
        Path(args.transcript).write_text(tr.to_jsonl())
    _print(report)
    return code


def cmd_attack_suite(args) -> int:
    report = run_attack_suite(args.config, workers=args.workers)
    _print(report.to_dict())
    return report.exit_code


def cmd_vectors(args) -> int:
    path = emit(args.emit)
    print(path)
    return EXIT_OK


def cmd_enroll(args) -> int:
    try:
        raw = bytes.fromhex(args.edge_id)
        gw_raw = bytes.fromhex(args.gateway_id)
    except ValueError as exc:
        raise ConfigParse(f"ids must be hex: {exc}") from exc
    if not raw:
        raise ConfigParse("edge id must not be empty")
    try:
        registry = Registry.load(args.registry)
    except (ProtocolError, json.JSONDecodeError) as exc:
        raise ConfigParse(f"{args.registry}: {exc}") from exc
    config = SessionConfig()
    gw_id = DeviceId.from_raw(gw_raw)
    if args.seed is not None:
        rng = random.Random(args.seed)
        seed = Seed(rng.randbytes(32))
    else:
        rng = random.Random(secrets.randbits(64))
        seed = Seed(secrets.token_bytes(32))
    gateway = Gateway(gw_id, config, rng, registry)
    edge, _ = enroll(DeviceId.from_raw(raw), gw_id, seed, config, rng, gateway=gateway)
    registry.save(args.registry)
    # provisioning material for the edge side
    _print({
        "edge_id_hash": edge.device.id_hash.hex(),
        "gw_id_hash": gw_id.id_hash.hex(),
        "e_init": edge.e_init.hex(),
        "seed": edge.seed.value.hex(),
        "draw_index": edge.seed.draw_index,
    })
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="d2dca", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="run one scenario and print its summary")
    s.add_argument("--scenario", required=True, help="scenario JSON file")
    s.add_argument("--transcript", help="write the JSON-lines transcript here")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("attack-suite", help="run every attack listed in a suite config")
    s.add_argument("--config", required=True, help="suite JSON file")
    s.add_argument("--workers", type=int, default=None, help="worker threads")
    s.set_defaults(func=cmd_attack_suite)

    s = sub.add_parser("vectors", help="write golden wire-format vectors")
    s.add_argument("--emit", required=True, metavar="DIR")
    s.set_defaults(func=cmd_vectors)

    s = sub.add_parser("enroll", help="enroll an edge into a registry file")
    s.add_argument("--registry", required=True)
    s.add_argument("--edge-id", required=True, help="raw edge id, hex")
    s.add_argument("--gateway-id", default=DEFAULT_GW_RAW.hex(), help="raw gateway id, hex")
    s.add_argument("--seed", type=int, default=None,
                   help="deterministic enrollment (testing only)")
    s.set_defaults(func=cmd_enroll)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigParse, ScenarioInvalid) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DuplicateEnrollment as exc:
        print(f"already enrolled: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
