"""Attack-suite runner: a JSON config lists attacks, each with seeds and an expected outcome."""

from __future__ import annotations

import json
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

from .adversary import RUNNERS, AttackVerdict, run_attack
from .channel import ChannelConfig
from .protocol import SessionConfig

EXPECTATIONS = ("reject", "residual_risk", "succeed")

# Replay and impersonation must be rejected; a clone within T while the original is
# silent is a known residual risk; eavesdropping on a correlated channel breaks the
# physical-layer assumption and is expected to recover the key.
DEFAULT_SUITE: dict[str, Any] = {
    "seeds": [1, 2, 3],
    "scenarios": (
        [{"kind": "Replayer", "variant": m, "expect": "reject"}
         for m in ("M1", "M3", "M5", "M6", "M7", "M8")]
        + [{"kind": "Impersonator", "variant": v, "expect": "reject"}
           for v in ("fake_edge", "fake_gateway", "fake_edge_ca", "fake_gateway_ca")]
        + [{"kind": "MitmMutator", "variant": f"M{i}", "expect": "reject"} for i in range(1, 9)]
        + [
            {"kind": "Cloner", "variant": "after_expiry", "expect": "reject"},
            {"kind": "Cloner", "variant": "within_T_silent", "expect": "residual_risk"},
            {"kind": "Cloner", "variant": "within_T_interleaved", "expect": "reject"},
        ]
        + [{"kind": "SybilForger", "variant": v, "expect": "reject"}
           for v in ("stolen_id", "gateway_id_disclosure", "duplicate_enrollment",
                     "concurrent_session")]
        + [
            {"kind": "PassiveEavesdropper", "variant": "decorrelated", "expect": "reject"},
            {"kind": "PassiveEavesdropper", "variant": "correlated", "expect": "succeed"},
        ]
    ),
}


# attacks that are supposed to work: they model a broken physical-layer assumption
EXPECTED_SUCCESSES = {("PassiveEavesdropper", "correlated")}


def default_expectation(kind: str, variant: str) -> str:
    if (kind, variant) in EXPECTED_SUCCESSES:
        return "succeed"
    if kind == "Cloner" and variant == "within_T_silent":
        return "residual_risk"
    return "reject"


class ConfigParse(ValueError):
    """Suite or scenario config is unreadable or structurally wrong."""


@dataclass(frozen=True)
class SuiteEntry:
    kind: str
    variant: str
    expect: str
    seeds: tuple[int, ...]
    options: dict = field(default_factory=dict, hash=False)
    session: Optional[SessionConfig] = None
    channel: Optional[ChannelConfig] = None

    @property
    def name(self) -> str:
        return f"{self.kind}/{self.variant}"


@dataclass
class SuiteReport:
    scenarios: int = 0
    runs: int = 0
    outcomes: Counter = field(default_factory=Counter)
    unexpected_successes: list[dict] = field(default_factory=list)
    residual_risks: list[dict] = field(default_factory=list)
    expected_not_observed: list[dict] = field(default_factory=list)
    prediction_mismatches: list[dict] = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        return 1 if self.unexpected_successes else 0

    def to_dict(self) -> dict:
        return {
            "scenarios": self.scenarios,
            "runs": self.runs,
            "outcomes": dict(sorted(self.outcomes.items())),
            "unexpected_successes": self.unexpected_successes,
            "residual_risks": self.residual_risks,
            "expected_not_observed": self.expected_not_observed,
            "prediction_mismatches": self.prediction_mismatches,
            "exit_code": self.exit_code,
        }


def _int_list(value, where: str) -> tuple[int, ...]:
    if isinstance(value, int) and not isinstance(value, bool):
        value = [value]
    if (not isinstance(value, list) or not value
            or not all(isinstance(s, int) and not isinstance(s, bool) and s >= 0 for s in value)):
        raise ConfigParse(f"{where}: seeds must be a non-empty list of non-negative integers")
    return tuple(value)


def _channel(data, where: str) -> Optional[ChannelConfig]:
    if data is None:
        return None
    if not isinstance(data, dict):
        raise ConfigParse(f"{where}: channel must be an object")
    ch = dict(data)
    if "link_seed" in ch:
        ch["link_seed"] = bytes.fromhex(ch["link_seed"])
    return ChannelConfig(**ch)


def parse_suite(data: Any) -> list[SuiteEntry]:
    if not isinstance(data, dict) or not data:
        raise ConfigParse("suite config must be a non-empty JSON object")
    scenarios = data.get("scenarios")
    if not isinstance(scenarios, list) or not scenarios:
        raise ConfigParse("suite config lists no scenarios")
    default_seeds = data.get("seeds", [0])
    entries = []
    for i, raw in enumerate(scenarios):
        where = f"scenarios[{i}]"
        if not isinstance(raw, dict):
            raise ConfigParse(f"{where}: must be an object")
        kind, variant = raw.get("kind"), raw.get("variant", "")
        if kind not in RUNNERS:
            raise ConfigParse(f"{where}: unknown attacker kind {kind!r}")
        if variant not in RUNNERS[kind][1]:
            raise ConfigParse(f"{where}: unknown variant {variant!r} for {kind}")
        expect = raw.get("expect", default_expectation(kind, variant))
        if expect not in EXPECTATIONS:
            raise ConfigParse(f"{where}: expect must be one of {EXPECTATIONS}")
        options = raw.get("options", {})
        if not isinstance(options, dict):
            raise ConfigParse(f"{where}: options must be an object")
        try:
            session = SessionConfig(**raw.get("session", data.get("session", {})))
            channel = _channel(raw.get("channel", data.get("channel")), where)
        except (TypeError, ValueError) as exc:
            raise ConfigParse(f"{where}: {exc}") from exc
        seeds = _int_list(raw.get("seeds", default_seeds), where)
        entries.append(SuiteEntry(kind, variant, expect, seeds, options, session, channel))
    return entries


def load_suite(path) -> list[SuiteEntry]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigParse(f"cannot read {path}: {exc}") from exc
    if not text.strip():
        raise ConfigParse(f"{path} is empty")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigParse(f"{path}: {exc}") from exc
    return parse_suite(data)


def _run_one(job: tuple[SuiteEntry, int]) -> AttackVerdict:
    entry, seed = job
    return run_attack(entry.kind, entry.variant, seed, entry.session, entry.channel,
                      **entry.options)


def classify(entry: SuiteEntry, v: AttackVerdict) -> str:
    if not v.attack_succeeded:
        return "rejected"
    if v.residual_risk:
        return "residual_risk"
    return "succeeded"


def run_entries(entries: list[SuiteEntry], workers: Optional[int] = None) -> SuiteReport:
    jobs = [(e, s) for e in entries for s in e.seeds]
    # each job builds its own world, so threads share nothing mutable
    with ThreadPoolExecutor(max_workers=workers) as pool:
        verdicts = list(pool.map(_run_one, jobs))
    report = SuiteReport(scenarios=len(entries), runs=len(jobs))
    for (entry, seed), v in zip(jobs, verdicts):
        outcome = classify(entry, v)
        report.outcomes[outcome] += 1
        row = {"attack": entry.name, "seed": seed, "failure_point": v.failure_point}
        if outcome == "residual_risk":
            report.residual_risks.append({**row, "metrics": v.metrics, "notes": v.notes})
        if outcome == "succeeded" and entry.expect != "succeed":
            report.unexpected_successes.append({**row, "notes": v.notes})
        if outcome == "residual_risk" and entry.expect == "reject":
            report.unexpected_successes.append({**row, "notes": v.notes})
        if outcome == "rejected" and entry.expect != "reject":
            report.expected_not_observed.append(row)
        if outcome == "rejected" and not v.prediction_met:
            report.prediction_mismatches.append({**row, "expected": v.expected_failure_point})
    return report


def run_attack_suite(config_path, workers: Optional[int] = None) -> SuiteReport:
    """Load a suite config, run every (attack, seed) pair and aggregate verdicts."""
    return run_entries(load_suite(config_path), workers)
