from .config import SCHEME_NAMES, SimConfig
from .engine import (
    RunResult,
    SchemePlan,
    SimEngine,
    TfOutcome,
    route_redundancy,
    route_redundant_retry,
    route_retry,
    run_experiment,
    run_experiment_result,
    scheme_plan,
)
from .metrics import CSV_HEADER, MetricsRow
from .topology import Topology, from_units, gen_topology, precompute_paths, to_units
from .traces import Transfer, gen_transfers, read_transfers_csv, write_transfers_csv

__all__ = [
    "CSV_HEADER",
    "MetricsRow",
    "RunResult",
    "SCHEME_NAMES",
    "SchemePlan",
    "SimConfig",
    "SimEngine",
    "TfOutcome",
    "Topology",
    "Transfer",
    "from_units",
    "gen_topology",
    "gen_transfers",
    "precompute_paths",
    "read_transfers_csv",
    "route_redundancy",
    "route_redundant_retry",
    "route_retry",
    "run_experiment",
    "run_experiment_result",
    "scheme_plan",
    "to_units",
    "write_transfers_csv",
]
