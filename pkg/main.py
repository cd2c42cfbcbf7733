import argparse
import json
import sys
import time
from typing import Optional

import numpy as np
from rich import box
from rich.panel import Panel
from rich.status import Status
from rich.table import Table

from compress import certify, make_compressor
from runner import RunSummary, apply_overrides, compare, load_config, run
from utils.errors import AllSeedsDivergedError, ConfigError, CzsdError, InvalidParamsError
from utils.utils import configure_logging, get_console

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="CZSD distributed zeroth-order optimization simulator")
    parser.add_argument("--verbose", action="store_true", help="Force INFO log level")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (("run", "Run seeded experiments"), ("compare", "Compare CZSD against ZSD-PD")):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", type=str, default="config.toml", help="Path to run config (.toml or .json)")
        cmd.add_argument("--seed", type=int, action="append", default=None, help="Run seed (repeatable)")
        cmd.add_argument("--out", type=str, default=None, help="Output directory")
        cmd.add_argument("--algo", type=str, default=None, choices=["czsd", "zsdpd", "czsd_identity"])
        cmd.add_argument("--iters", type=int, default=None, help="Number of rounds T")

    cert = sub.add_parser("certify", help="Empirically check a compressor's contraction")
    cert.add_argument("--compressor", type=str, required=True, help='JSON, e.g. \'{"kind": "dithered", "bits": 2}\'')
    cert.add_argument("--dim", type=int, required=True, help="Vector dimension p")
    cert.add_argument("--samples", type=int, default=10000)
    cert.add_argument("--seed", type=int, default=0)
    return parser


def error_panel(title: str, message: str) -> Panel:
    return Panel(message, title=f"[bold red]❌ {title}[/bold red]", border_style="red", box=box.ROUNDED)


def summary_table(summary: RunSummary) -> Table:
    """每个种子一行：末值 P(T)、总比特、是否发散"""
    table = Table(title=f"{summary.algorithm} → {summary.out_dir}", box=box.SIMPLE)
    table.add_column("Seed", style="cyan")
    table.add_column("P(T)", style="green")
    table.add_column("Bits", style="green")
    table.add_column("Status")
    for s in summary.seeds:
        status = f"[red]diverged @ {s.diverged_at}[/red]" if s.diverged else "[green]ok[/green]"
        final = f"{s.final_p:.4e}" if s.final_p is not None else "-"
        table.add_row(str(s.seed), final, str(s.bits_total), status)
    agg = summary.aggregate()
    if agg["final_p_mean"] is not None:
        table.add_row("mean", f"{agg['final_p_mean']:.4e}", "", f"{agg['diverged']} diverged")
    return table


def cmd_run(args: argparse.Namespace) -> int:
    console = get_console()
    config = apply_overrides(load_config(args.config), args.seed, args.out, args.algo, args.iters)
    with Status(f"[bold cyan]Running {config.algorithm} over {len(config.seeds)} seed(s)...",
                console=console, spinner="dots"):
        try:
            summary = run(config)
        except AllSeedsDivergedError as e:
            console.print(error_panel("All seeds diverged", str(e)))
            return EXIT_FAILED
    console.print(summary_table(summary))
    console.print(f"[dim]summary: {summary.summary_path}[/dim]")
    return EXIT_OK


def cmd_compare(args: argparse.Namespace) -> int:
    console = get_console()
    config = apply_overrides(load_config(args.config), args.seed, args.out, args.algo, args.iters)
    with Status("[bold cyan]Running CZSD and ZSD-PD...", console=console, spinner="dots"):
        try:
            result = compare(config)
        except AllSeedsDivergedError as e:
            console.print(error_panel("All seeds diverged", str(e)))
            return EXIT_FAILED

    table = Table(title="Bits to threshold (baseline / compressed)", box=box.SIMPLE)
    table.add_column("Threshold", style="cyan")
    table.add_column(result["compressed"], style="green")
    table.add_column(result["baseline"], style="green")
    table.add_column("Ratio", style="magenta")
    table.add_column("Seeds", style="dim")
    for threshold, row in result["bits_to_threshold"].items():
        table.add_row(
            threshold,
            _fmt(row["compressed_bits"]),
            _fmt(row["baseline_bits"]),
            _fmt(row["ratio"]),
            f"{row['paired_seeds']} ({row['compressed_reached']}/{row['baseline_reached']})",
        )
    console.print(table)
    console.print(f"final P(T) ratio (compressed / baseline): {_fmt(result['final_p']['ratio'])}")
    return EXIT_OK


def cmd_certify(args: argparse.Namespace) -> int:
    console = get_console()
    if args.seed < 0:
        raise ConfigError(f"--seed must be non-negative, got {args.seed}")
    try:
        spec_config = json.loads(args.compressor)
    except json.JSONDecodeError as e:
        raise ConfigError(f"--compressor is not valid JSON: {e}") from e
    spec = make_compressor(spec_config, args.dim)
    report = certify(spec, args.samples, np.random.default_rng(args.seed))

    style = "green" if report.passed else "red"
    table = Table(show_header=False, box=box.SIMPLE)
    table.add_column("Key", style="cyan")
    table.add_column("Value", style="green")
    table.add_row("Compressor", json.dumps(report.compressor))
    table.add_row("p", str(report.p))
    table.add_row("Samples", str(report.samples))
    table.add_row("r / δ", f"{report.r:.6g} / {report.delta:.6g}")
    table.add_row("Mean ratio", f"{report.mean_ratio:.6g}")
    table.add_row("Max ratio", f"{report.max_ratio:.6g}")
    table.add_row("Bound (1-δ)", f"{report.bound:.6g}")
    console.print(Panel(table, title=f"[bold {style}]{report.verdict.value}[/bold {style}]",
                        border_style=style, box=box.SIMPLE))
    return EXIT_OK if report.passed else EXIT_FAILED


def _fmt(value: Optional[float]) -> str:
    return "-" if value is None else f"{value:.4g}"


COMMANDS = {"run": cmd_run, "compare": cmd_compare, "certify": cmd_certify}


def main(argv: Optional[list[str]] = None) -> int:
    """主程序入口，返回退出码"""
    args = build_parser().parse_args(argv)
    configure_logging("INFO" if args.verbose else None)
    console = get_console()
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, InvalidParamsError) as e:
        console.print(error_panel("Configuration error", str(e)))
        return EXIT_CONFIG
    except CzsdError as e:
        console.print(error_panel(type(e).__name__, str(e)))
        return EXIT_FAILED
    except KeyboardInterrupt:
        console.print("\n[bold yellow]⚠️  Interrupted by user[/bold yellow]")
        return EXIT_FAILED


if __name__ == "__main__":
    try:
        sys.exit(main())
    finally:
        time.sleep(0.1)
