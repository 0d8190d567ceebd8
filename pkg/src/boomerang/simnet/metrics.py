"""Result rows and the delimited output format for experiment sweeps."""

from __future__ import annotations

from dataclasses import dataclass

CSV_HEADER = (
    "algo,u,"
    "throughput_success-mean,throughput_success-std,"
    "ttc_for_successful_tx-mean,ttc_for_successful_tx-std,"
    "volume_for_successful_tx-mean,volume_for_successful_tx-std"
)


@dataclass(frozen=True)
class MetricsRow:
    """Aggregated metrics for one (scheme, redundancy budget) cell.

    throughput: successfully transferred funds per simulated second per node.
    ttc: seconds from a transfer's start until all its channel operations
    settle, averaged over successful transfers.  volume: mean amount of
    successful transfers.  Stds are across replication seeds.
    """

    scheme: str
    u: int
    throughput_mean: float
    throughput_std: float
    ttc_mean: float
    ttc_std: float
    volume_mean: float
    volume_std: float

    def csv_line(self) -> str:
        return ",".join(
            [
                self.scheme,
                str(self.u),
                repr(self.throughput_mean),
                repr(self.throughput_std),
                repr(self.ttc_mean),
                repr(self.ttc_std),
                repr(self.volume_mean),
                repr(self.volume_std),
            ]
        )

    @classmethod
    def from_csv_line(cls, line: str) -> "MetricsRow":
        parts = line.split(",")
        return cls(
            scheme=parts[0],
            u=int(parts[1]),
            throughput_mean=float(parts[2]),
            throughput_std=float(parts[3]),
            ttc_mean=float(parts[4]),
            ttc_std=float(parts[5]),
            volume_mean=float(parts[6]),
            volume_std=float(parts[7]),
        )
