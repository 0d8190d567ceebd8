"""Experiment sweeps over schemes and redundancy budgets, with CSV reporting.

A sweep runs one experiment per (scheme, u, seed).  Topology and workload
derive from the seed alone, never from the scheme or budget, so every cell
of the result grid sees the same networks and the same transfers.  Rows
aggregate the per-seed scalars with sample mean and unbiased std.
"""

from __future__ import annotations

import json
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from statistics import mean, stdev

from .errors import ConfigError, UsageError
from .simnet.config import SCHEME_NAMES, SimConfig
from .simnet.engine import run_experiment_result
from .simnet.metrics import CSV_HEADER, MetricsRow
from .simnet.traces import gen_transfers, read_transfers_csv


@dataclass
class SweepSpec:
    base: SimConfig = field(default_factory=SimConfig)
    u_values: list = field(default_factory=lambda: [0])
    schemes: list = field(default_factory=lambda: list(SCHEME_NAMES))
    seeds: list = field(default_factory=lambda: [0])
    trace_csv: str | None = None

    def validate(self) -> "SweepSpec":
        self.base.validate()
        if not isinstance(self.u_values, list) or not self.u_values:
            raise ConfigError("u_values: must be a nonempty list of integers")
        if any(not isinstance(u, int) or u < 0 for u in self.u_values):
            raise ConfigError("u_values: entries must be nonnegative integers")
        if not isinstance(self.schemes, list) or not self.schemes:
            raise ConfigError("schemes: must be a nonempty list")
        for scheme in self.schemes:
            if scheme not in SCHEME_NAMES:
                raise ConfigError(f"schemes: unknown scheme {scheme!r}")
        if not isinstance(self.seeds, list) or not self.seeds:
            raise ConfigError("seeds: must be a nonempty list of integers")
        if any(not isinstance(s, int) for s in self.seeds):
            raise ConfigError("seeds: entries must be integers")
        return self

    def to_dict(self) -> dict:
        out = self.base.to_dict()
        out["u_values"] = list(self.u_values)
        out["schemes"] = list(self.schemes)
        out["seeds"] = list(self.seeds)
        if self.trace_csv is not None:
            out["trace_csv"] = self.trace_csv
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "SweepSpec":
        # An absent key falls back to the default; a present key with a bad
        # value (including null) is an error, so typos fail loudly.
        missing = object()
        data = dict(data)
        u_values = data.pop("u_values", missing)
        schemes = data.pop("schemes", missing)
        seeds = data.pop("seeds", missing)
        trace_csv = data.pop("trace_csv", None)
        base = SimConfig.from_dict(data)
        spec = cls(base=base)
        if u_values is not missing:
            spec.u_values = u_values
        if schemes is not missing:
            spec.schemes = schemes
        if seeds is not missing:
            spec.seeds = seeds
        if trace_csv is not None:
            spec.trace_csv = str(trace_csv)
        return spec.validate()


def load_config(path: str) -> SweepSpec:
    """Read a sweep spec from JSON; missing fields fall back to defaults."""
    try:
        with open(path) as handle:
            text = handle.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not text.strip():
        data = {}
    else:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config root must be a JSON object")
    return SweepSpec.from_dict(data)


@dataclass(frozen=True)
class RawSample:
    """One experiment's scalars, retained so aggregation stays auditable."""

    scheme: str
    u: int
    seed: int
    throughput: float
    ttc: float
    volume: float


@dataclass
class ResultTable:
    rows: list
    samples: list = field(default_factory=list)

    def to_csv(self) -> str:
        lines = [CSV_HEADER]
        lines.extend(row.csv_line() for row in self.rows)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv(cls, text: str) -> "ResultTable":
        lines = [line for line in text.splitlines() if line.strip()]
        if not lines or lines[0] != CSV_HEADER:
            raise UsageError("result CSV header does not match")
        return cls(rows=[MetricsRow.from_csv_line(line) for line in lines[1:]])

    def samples_to_json(self, spec: SweepSpec | None = None) -> str:
        payload = {
            "spec": spec.to_dict() if spec is not None else None,
            "samples": [dict(vars(s)) for s in self.samples],
        }
        return json.dumps(payload, indent=2)

    @classmethod
    def from_samples_json(cls, text: str) -> "ResultTable":
        data = json.loads(text)
        samples = [RawSample(**s) for s in data["samples"]]
        order_schemes, order_u = [], []
        for s in samples:
            if s.scheme not in order_schemes:
                order_schemes.append(s.scheme)
            if s.u not in order_u:
                order_u.append(s.u)
        return aggregate(samples, order_schemes, sorted(order_u))


def _std(values) -> float:
    return stdev(values) if len(values) > 1 else 0.0


def aggregate(samples, schemes, u_values) -> ResultTable:
    by_cell = {}
    for s in samples:
        by_cell.setdefault((s.scheme, s.u), []).append(s)
    rows = []
    for scheme in schemes:
        for u in u_values:
            cell = by_cell.get((scheme, u))
            if not cell:
                continue
            rows.append(
                MetricsRow(
                    scheme=scheme,
                    u=u,
                    throughput_mean=mean(s.throughput for s in cell),
                    throughput_std=_std([s.throughput for s in cell]),
                    ttc_mean=mean(s.ttc for s in cell),
                    ttc_std=_std([s.ttc for s in cell]),
                    volume_mean=mean(s.volume for s in cell),
                    volume_std=_std([s.volume for s in cell]),
                )
            )
    return ResultTable(rows=rows, samples=list(samples))


def transfers_for_seed(spec: SweepSpec, seed: int):
    """The workload shared by every (scheme, u) cell at this seed."""
    if spec.trace_csv is not None:
        return read_transfers_csv(spec.trace_csv)
    cfg = replace(spec.base, seed=seed)
    return gen_transfers(cfg, random.Random(f"trace-{seed}"))


def _run_cell(args) -> RawSample:
    spec_dict, scheme, u, seed = args
    spec = SweepSpec.from_dict(spec_dict)
    cfg = replace(spec.base, scheme=scheme, num_redundant_tx=u, seed=seed)
    transfers = transfers_for_seed(spec, seed)
    result = run_experiment_result(cfg, transfers, random.Random(seed))
    return RawSample(
        scheme=scheme,
        u=u,
        seed=seed,
        throughput=result.throughput(),
        ttc=result.ttc(),
        volume=result.volume(),
    )


def run_sweep(spec: SweepSpec, parallelism: int = 1, progress=None) -> ResultTable:
    """Run every (scheme, u, seed) cell; output is independent of parallelism."""
    spec.validate()
    jobs = [
        (spec.to_dict(), scheme, u, seed)
        for scheme in spec.schemes
        for u in spec.u_values
        for seed in spec.seeds
    ]
    samples = []
    if parallelism > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            for i, sample in enumerate(pool.map(_run_cell, jobs)):
                samples.append(sample)
                if progress:
                    progress(i + 1, len(jobs), sample)
    else:
        for i, job in enumerate(jobs):
            sample = _run_cell(job)
            samples.append(sample)
            if progress:
                progress(i + 1, len(jobs), sample)
    return aggregate(samples, spec.schemes, spec.u_values)


def report(table: ResultTable, path: str) -> str:
    """Write the delimited result table; same table, same bytes."""
    with open(path, "w", newline="") as handle:
        handle.write(table.to_csv())
    return path


def read_result_table(path: str) -> ResultTable:
    with open(path) as handle:
        return ResultTable.from_csv(handle.read())
