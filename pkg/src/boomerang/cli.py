"""Command line interface.

Subcommands cover topology generation, single experiment runs, full sweeps,
report rendering, a crypto walkthrough, and locking-script emission.  Every
simulation flag has a config-file equivalent; flags override the file.

Exit codes: 0 success, 1 bad usage or configuration, 2 runtime failure.
"""

from __future__ import annotations

import json
import random
from dataclasses import replace

import click

from . import adaptor, challenge, contract, scripts
from .errors import BoomerangError, ConfigError, UsageError
from .group import available_groups, get_group
from .simnet.config import SCHEME_NAMES, SimConfig
from .simnet.engine import run_experiment_result
from .simnet.metrics import CSV_HEADER
from .simnet.topology import gen_topology
from .simnet.traces import gen_transfers, read_transfers_csv
from .sweep import SweepSpec, load_config, report, run_sweep, transfers_for_seed


def _config_options(fn):
    decorators = [
        click.option("--config", "config_path", type=click.Path(), default=None,
                     help="JSON config file; flags override its values."),
        click.option("--num-nodes", type=int, default=None),
        click.option("--ring-neighbors", type=int, default=None),
        click.option("--rewire-prob", type=float, default=None),
        click.option("--balance-range", type=float, nargs=2, default=None),
        click.option("--num-transfers", type=int, default=None),
        click.option("--base-tx", "num_base_tx", type=int, default=None,
                     help="v: partial payments that must all succeed."),
        click.option("--redundant-tx", "num_redundant_tx", type=int, default=None,
                     help="u: extra attempts the scheme may spend."),
        click.option("--scheme", type=click.Choice(SCHEME_NAMES), default=None),
        click.option("--hop-delay-range", type=float, nargs=2, default=None),
        click.option("--num-paths", type=int, default=None),
        click.option("--seed", type=int, default=None),
        click.option("--amount-median", type=float, default=None),
        click.option("--amount-sigma", type=float, default=None),
        click.option("--amount-range", type=float, nargs=2, default=None),
        click.option("--retry-cap", type=int, default=None),
    ]
    for dec in reversed(decorators):
        fn = dec(fn)
    return fn


def _build_spec(config_path, overrides) -> SweepSpec:
    spec = load_config(config_path) if config_path else SweepSpec()
    fields = {}
    for name, value in overrides.items():
        if value is None or value == ():
            continue
        if name in ("balance_range", "hop_delay_range", "amount_range"):
            value = (float(value[0]), float(value[1]))
        fields[name] = value
    if fields:
        spec.base = replace(spec.base, **fields)
    spec.base.validate()
    return spec


def _parse_int_list(text, name):
    try:
        return [int(part) for part in text.split(",") if part.strip() != ""]
    except ValueError:
        raise ConfigError(f"{name}: expected comma-separated integers, got {text!r}")


@click.group()
def cli():
    """Redundant multi-path payment experiments and crypto tools."""


@cli.command("gen-topology")
@_config_options
@click.option("--out", type=click.Path(), required=True, help="Topology JSON path.")
def gen_topology_cmd(config_path, out, **overrides):
    """Generate a small-world channel graph and write it as JSON."""
    spec = _build_spec(config_path, overrides)
    cfg = spec.base
    topo = gen_topology(cfg, random.Random(cfg.seed))
    with open(out, "w") as handle:
        handle.write(topo.to_json())
    click.echo(f"wrote {topo.num_nodes} nodes, {topo.num_edges()} channels to {out}")


@cli.command("run")
@_config_options
@click.option("--trace", "trace_path", type=click.Path(), default=None,
              help="Transfer trace CSV (source,destination,amount).")
@click.option("--trace-out", type=click.Path(), default=None,
              help="Write engine events as JSON lines.")
@click.option("--csv-out", type=click.Path(), default=None,
              help="Write the single result row as CSV.")
def run_cmd(config_path, trace_path, trace_out, csv_out, **overrides):
    """Run one experiment and print its metrics."""
    spec = _build_spec(config_path, overrides)
    cfg = spec.base
    if trace_path:
        transfers = read_transfers_csv(trace_path)
    else:
        transfers = gen_transfers(cfg, random.Random(f"trace-{cfg.seed}"))

    sink = None
    handle = None
    if trace_out:
        handle = open(trace_out, "w")

        def sink(event):
            handle.write(json.dumps(event, default=repr) + "\n")

    try:
        result = run_experiment_result(cfg, transfers, random.Random(cfg.seed), trace_sink=sink)
    finally:
        if handle is not None:
            handle.close()
    row = result.metrics_row(cfg.scheme, cfg.num_redundant_tx)
    successes = len(result.success_outcomes())
    click.echo(
        f"scheme={row.scheme} u={row.u} transfers={len(result.outcomes)} "
        f"successes={successes} runtime={result.runtime:.3f}s"
    )
    click.echo(
        f"throughput={row.throughput_mean:.6f} ttc={row.ttc_mean:.6f} "
        f"volume={row.volume_mean:.6f}"
    )
    if csv_out:
        with open(csv_out, "w") as out_handle:
            out_handle.write(CSV_HEADER + "\n" + row.csv_line() + "\n")
        click.echo(f"wrote {csv_out}")


@cli.command("sweep")
@_config_options
@click.option("--u-values", default=None, help="Comma-separated budgets, e.g. 0,5,10.")
@click.option("--schemes", default=None, help="Comma-separated scheme names.")
@click.option("--seeds", default=None, help="Comma-separated replication seeds.")
@click.option("--parallelism", type=int, default=1, help="Worker processes.")
@click.option("--out", type=click.Path(), required=True, help="Result CSV path.")
@click.option("--raw-out", type=click.Path(), default=None,
              help="Also dump per-seed raw samples as JSON.")
@click.option("--figures/--no-figures", default=True,
              help="Render metric figures next to the CSV.")
@click.option("--figures-dir", type=click.Path(), default=None,
              help="Figure directory; defaults to the CSV's directory.")
@click.option("--quiet", is_flag=True, default=False)
def sweep_cmd(config_path, u_values, schemes, seeds, parallelism, out, raw_out,
              figures, figures_dir, quiet, **overrides):
    """Run the full (scheme, u, seed) grid and write the result table."""
    spec = _build_spec(config_path, overrides)
    if u_values is not None:
        spec.u_values = _parse_int_list(u_values, "u_values")
    if schemes is not None:
        spec.schemes = [s.strip() for s in schemes.split(",") if s.strip()]
    if seeds is not None:
        spec.seeds = _parse_int_list(seeds, "seeds")
    spec.validate()

    def progress(done, total, sample):
        if not quiet:
            click.echo(
                f"[{done}/{total}] {sample.scheme} u={sample.u} seed={sample.seed} "
                f"throughput={sample.throughput:.4f}",
                err=True,
            )

    table = run_sweep(spec, parallelism=parallelism, progress=progress)
    report(table, out)
    click.echo(f"wrote {out} ({len(table.rows)} rows)")
    if raw_out:
        with open(raw_out, "w") as handle:
            handle.write(table.samples_to_json(spec))
        click.echo(f"wrote {raw_out}")
    if figures:
        from .plotting import render_figures
        import os

        target = figures_dir or (os.path.dirname(os.path.abspath(out)) or ".")
        for path in render_figures(table, target):
            click.echo(f"wrote {path}")


@cli.command("report")
@click.option("--raw", "raw_path", type=click.Path(), required=True,
              help="Raw samples JSON produced by sweep --raw-out.")
@click.option("--out", type=click.Path(), required=True, help="Result CSV path.")
@click.option("--figures/--no-figures", default=True)
@click.option("--figures-dir", type=click.Path(), default=None)
def report_cmd(raw_path, out, figures, figures_dir):
    """Re-aggregate raw samples into the delimited table and figures."""
    from .sweep import ResultTable

    with open(raw_path) as handle:
        table = ResultTable.from_samples_json(handle.read())
    report(table, out)
    click.echo(f"wrote {out} ({len(table.rows)} rows)")
    if figures:
        from .plotting import render_figures
        import os

        target = figures_dir or (os.path.dirname(os.path.abspath(out)) or ".")
        for path in render_figures(table, target):
            click.echo(f"wrote {path}")


@cli.command("demo-crypto")
@click.option("--group", "group_id", default="toy-23-11",
              type=click.Choice(sorted(available_groups())))
@click.option("--base-tx", "num_base", type=int, default=2, help="v: claim budget.")
@click.option("--redundant-tx", "num_redundant", type=int, default=1,
              help="u: extra challenge indices issued.")
@click.option("--deliver", type=int, default=2,
              help="How many preimages the receiver reveals.")
@click.option("--hops", type=int, default=3, help="Hops per payment path.")
@click.option("--timeout-step", type=float, default=10.0,
              help="Timeout stagger step per hop.")
@click.option("--seed", type=int, default=0)
def demo_crypto_cmd(group_id, num_base, num_redundant, deliver, hops, timeout_step, seed):
    """Walk the challenge scheme and contract stages end to end."""
    if num_base < 1 or num_redundant < 0 or hops < 1:
        raise UsageError("need base-tx >= 1, redundant-tx >= 0, hops >= 1")
    total = num_base + num_redundant
    if deliver < 0 or deliver > total:
        raise UsageError(f"deliver must lie in [0, {total}]")
    group = get_group(group_id)
    rng = random.Random(seed)

    poly, commitments = challenge.setup(group, num_base, rng)
    plan = challenge.ChallengePlan(commitment_set=commitments)
    click.echo(f"group {group_id}, claim budget v={num_base}, issued w={total}")
    for j, c in enumerate(commitments.commitments):
        click.echo(f"  commitment[{j}] = {group.element_to_hex(c)}")

    timeouts = contract.stagger_timeouts(hops, t0=0.0, step=timeout_step)
    chains = []
    for index in range(1, total + 1):
        fwd_challenge = plan.derive_challenge(index)
        revert = commitments.commitments[0]
        hops_list = [
            contract.deploy(
                group, fwd_challenge, revert, amount=1, fee=0,
                t0=0.0,
                delta_fwd=timeouts.windows[k][0],
                delta_rev=timeouts.windows[k][1],
            )
            for k in range(hops)
        ]
        chains.append(contract.ContractChain(index=index, contracts=hops_list))
        click.echo(f"  challenge[{index}] = {group.element_to_hex(fwd_challenge)}")

    deliveries = [challenge.eval_preimage(poly, i) for i in range(1, deliver + 1)]
    events = contract.run_transfer_stages(chains, num_base, deliveries)
    for event in events:
        where = f"chain {event.chain_index} hop {event.hop}" if event.hop >= 0 else "sender"
        detail = f" ({event.detail})" if event.detail else ""
        click.echo(f"  [{event.stage}] {where}: {event.transition}{detail}")

    if deliver > num_base:
        secret = challenge.recover_secret(deliveries, num_base, group.order)
        ok = challenge.verify_cheat_proof(commitments, secret)
        click.echo(f"overdraw: recovered constant term {secret:#x}, cheat proof valid: {ok}")
    final = {c.index: [h.state.value for h in c.contracts] for c in chains}
    for index in sorted(final):
        click.echo(f"chain {index}: {' '.join(final[index])}")


@cli.command("emit-script")
@click.option("--kind", required=True, type=click.Choice(list(scripts.SCRIPT_KINDS)))
@click.option("--placeholder", "-p", "pairs", multiple=True,
              help="name=hexvalue, repeatable; see --list-placeholders.")
@click.option("--list-placeholders", is_flag=True, default=False)
@click.option("--out", type=click.Path(), default=None)
def emit_script_cmd(kind, pairs, list_placeholders, out):
    """Emit a locking-script template with placeholders substituted."""
    if list_placeholders:
        for name in scripts.required_placeholders(kind):
            click.echo(name)
        return
    values = {}
    for pair in pairs:
        if "=" not in pair:
            raise UsageError(f"placeholder {pair!r} must look like name=hexvalue")
        name, _, value = pair.partition("=")
        values[name.strip()] = value.strip()
    text = scripts.emit_script(kind, values)
    if out:
        with open(out, "w") as handle:
            handle.write(text)
        click.echo(f"wrote {out}")
    else:
        click.echo(text, nl=False)


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Abort:
        return 1
    except click.exceptions.ClickException as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        return 1
    except (UsageError, ConfigError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    except BoomerangError as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    except SystemExit as exc:
        return int(exc.code or 0)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
