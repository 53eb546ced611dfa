"""
pseudoflat - exact point–pseudoflat incidence laboratory.

Commands:
  pseudoflat run --config grid3.json : generate, count, diagnose and certify
  pseudoflat selftest                : embedded oracle suite
"""
import logging
import os
from pathlib import Path
from typing import List, Optional

import typer
from rich.console import Console
from rich.table import Table

from .config import Settings
from .errors import ConfigError, PseudoflatError
from .manifest import RunManifest
from .pointgen import dump_points, homogeneity_check
from .prooflab import surface_diagnostic, theorem13_diagnostic
from .selftest import FAULTS, run_selftest, summary
from .xplab import certify_bound, emit_outputs, incidence_bound_check, run_once, write_json
from .xplab.sweep import ExperimentReport

app = typer.Typer(help="Exact point–pseudoflat incidence laboratory")
console = Console()
logger = logging.getLogger(__name__)

EXIT_OK, EXIT_ERROR, EXIT_VERDICT = 0, 1, 2


def setup_logging(level: str, verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else level,
        format="%(asctime)s - %(levelname)s - %(message)s",
    )


def show_runs(report: ExperimentReport) -> None:
    table = Table(title=f"📊 Rich profiles - {report.config.scenario}")
    table.add_column("size", style="cyan")
    table.add_column("N", style="magenta")
    table.add_column("members", style="yellow")
    table.add_column("incidences", style="green")
    table.add_column("max rich", style="green")
    for run in report.runs:
        table.add_row(str(run.size), str(run.N), str(run.M), str(run.total_incidences), str(run.max_rich))
    console.print(table)


def execute(settings: Settings) -> int:
    """Run the configured phases; returns the exit code."""
    cfg = settings.experiment()
    threads = settings.threads or os.cpu_count() or 1
    out = Path(settings.out)
    manifest = RunManifest(config=settings.resolved(), root=out)
    if cfg.points_file is not None:
        manifest.add_input(cfg.points_file)
    phases = set(settings.pipeline)
    verdicts: List[bool] = []
    written: List[Path] = []

    sizes = cfg.sizes[:1] if cfg.scenario == "custom" else cfg.sizes
    runs = []
    with manifest.phase("incidence"):
        for size in sizes:
            runs.append(run_once(cfg, size, threads))
    report = ExperimentReport(cfg, [record for *_, record in runs])

    if "generate" in phases:
        with manifest.phase("generate"):
            for P, _, _, record in runs:
                written.append(dump_points(P, out / f"points_{cfg.scenario}_{record.size}.txt"))
                homogeneity = homogeneity_check(P)
                verdicts.append(homogeneity.passed)
                written.append(write_json(homogeneity.to_dict(), out / f"homogeneity_{record.size}.json"))

    if "incidence" in phases:
        show_runs(report)
        written += emit_outputs(report, [], out, svg=False)

    if "diagnose" in phases:
        with manifest.phase("diagnose"):
            for P, family, IS, record in runs:
                if P.N > settings.diagnose_max_points:
                    logger.info(f"skipping diagnostics for N={P.N} > {settings.diagnose_max_points}")
                    continue
                for k in settings.diagnose_k or [max(3, record.max_rich // 2)]:
                    if cfg.kind == "planes":
                        diag = surface_diagnostic(
                            P, IS, k, c0=settings.c0, subset_cap=settings.subset_cap, threads=threads
                        )
                    else:
                        diag = theorem13_diagnostic(P, family, k, incidences=IS, subset_cap=settings.subset_cap)
                    verdicts.append(diag.passed)
                    written.append(write_json(diag.to_dict(), out / f"diagnose_{record.size}_k{k}.json"))

    if "certify" in phases:
        with manifest.phase("certify"):
            theorem = settings.theorem or ("1.5" if cfg.kind == "planes" else "1.3")
            cert = certify_bound(
                report,
                theorem,
                settings.r,
                cfg.n,
                k_min=settings.bound_k_min,
                k_max=settings.bound_k_max,
                fit_k_min=settings.fit_k_min,
                fit_k_max=settings.fit_k_max,
                c_thresh=settings.c_thresh,
                c_bound=settings.c_bound,
            )
            check = incidence_bound_check(
                report, settings.r, cfg.n, surfaces=cfg.kind == "planes", c_incidence=settings.c_incidence
            )
            verdicts += [cert.passed, check.passed]
            written += emit_outputs(report, [cert], out, svg=settings.svg)
            written.append(
                write_json(
                    {
                        "provenance": manifest.provenance(),
                        "certificate": cert.to_dict(),
                        "incidences": check.to_dict(),
                    },
                    out / "certificate.json",
                )
            )
            table = Table(title=f"🧾 Certificate {theorem}")
            table.add_column("quantity", style="cyan")
            table.add_column("value", style="magenta")
            table.add_row("exponent", str(cert.exponent_theory))
            table.add_row("fitted slope", f"{cert.fit.slope:.3f} ± {cert.fit.stderr:.3f}" if cert.fit else "-")
            if cert.fit_in_N:
                fit_n = cert.fit_in_N
                table.add_row(f"N-slope at k={cert.fit_k_min}", f"{fit_n.slope:.3f} ± {fit_n.stderr:.3f}")
            table.add_row("C", f"{cert.C:.4g}")
            table.add_row("smallest C_thresh", f"{cert.c_thresh_min:.4g}")
            table.add_row("C_I", f"{check.C_I:.4g}")
            table.add_row("verdict", cert.verdict if check.passed else "fail")
            console.print(table)
            for line in cert.footer:
                console.print(f"[dim]{line}[/dim]")

    for path in written:
        manifest.add_output(path)
    manifest.save(out)
    if not all(verdicts):
        console.print("[red]❌ at least one verdict failed[/red]")
        return EXIT_VERDICT
    console.print(f"[green]✅ outputs in {out}[/green]")
    return EXIT_OK


@app.command()
def run(
    config: Optional[Path] = typer.Option(None, "--config", "-c", help="YAML or JSON config"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Output directory"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Generator seed"),
    threads: Optional[int] = typer.Option(None, "--threads", "-t", help="Worker threads"),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Debug logging"),
) -> None:
    """Run the pipeline described by a config file."""
    try:
        settings = Settings.load(config, out=out, seed=seed, threads=threads)
    except ConfigError as exc:
        console.print(f"[red]❌ config error: {exc}[/red]")
        raise typer.Exit(EXIT_ERROR)
    setup_logging(settings.log_level, verbose)
    try:
        code = execute(settings)
    except (PseudoflatError, OSError) as exc:
        logger.error(f"run failed: {exc}")
        console.print(f"[red]❌ {exc}[/red]")
        raise typer.Exit(EXIT_ERROR)
    raise typer.Exit(code)


@app.command()
def selftest(
    only: Optional[str] = typer.Option(None, "--filter", help="Run only one module's checks"),
    inject: List[str] = typer.Option([], "--inject", hidden=True, help=f"Fault to inject: {', '.join(FAULTS)}"),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Debug logging"),
) -> None:
    """Run the embedded oracle checks."""
    setup_logging("WARNING", verbose)
    results = run_selftest(only, inject)
    table = Table(title="🔎 Self-test")
    table.add_column("module", style="cyan")
    table.add_column("check", style="magenta")
    table.add_column("result")
    for res in results:
        mark = "[green]pass[/green]" if res.passed else f"[red]FAIL[/red] {res.detail}"
        table.add_row(res.module, res.name, mark)
    console.print(table)
    for module, (ok, total) in summary(results).items():
        console.print(f"{module}: {ok}/{total}")
    if not results or not all(res.passed for res in results):
        raise typer.Exit(EXIT_ERROR)


if __name__ == "__main__":
    app()
