"""
Main CLI application for gapstress.

Asymptotic stress concentration between nearly touching rigid inclusions,
checked against a 2D finite-element oracle.
"""

from pathlib import Path
from typing import List, Optional

import typer
from rich import box
from rich.console import Console
from rich.markdown import Markdown
from rich.panel import Panel
from rich.table import Table

from ..config import parse_eps_list, settings
from ..errors import ConfigError, GapStressError, ReportInputError

app = typer.Typer(
    name="gapstress",
    help="Stress concentration between nearly touching rigid inclusions",
    add_completion=False,
)
console = Console()

EXIT_FAIL = 1
EXIT_USAGE = 2


def _usage_error(message: str) -> typer.Exit:
    console.print(f"[red]Error: {message}[/red]")
    return typer.Exit(EXIT_USAGE)


def _floats(text: str, name: str) -> List[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise _usage_error(f"{name} must be a comma-separated list of numbers, got '{text}'")


def _fmt(v: Optional[float]) -> str:
    return "-" if v is None else f"{v:.10g}"


@app.command()
def qtab(
    dim: Optional[int] = typer.Option(None, "-d", "--dim", help="Dimension (2 or 3); both when omitted"),
    orders: str = typer.Option("2,3,4,5,6,8", "-m", "--orders", help="Convexity orders"),
):
    """
    Print the profile integrals Q and Q~ with their closed forms.

    Examples:

        gapstress qtab

        gapstress qtab -d 3 -m 4,6,8
    """
    from ..asymptotics import q_table

    dims = [dim] if dim is not None else [2, 3]
    if any(d not in (2, 3) for d in dims):
        raise _usage_error(f"dimension must be 2 or 3, got {dim}")
    ms = [int(m) for m in _floats(orders, "--orders")]

    table = Table(title="Profile integrals", box=box.ROUNDED)
    for col in ("d", "m", "Q", "Q closed", "Q~", "Q~ closed"):
        table.add_column(col, style="cyan" if col in ("d", "m") else "green", justify="right")
    for d in dims:
        for m in ms:
            if m < 2:
                raise _usage_error(f"convexity order must be >= 2, got {m}")
            q = q_table(d, m)
            table.add_row(str(d), str(m), _fmt(q.q), _fmt(q.q_closed), _fmt(q.q_tilde), _fmt(q.q_tilde_closed))
    console.print(table)


@app.command()
def capacity(
    eps: float = typer.Option(..., "-e", "--eps", help="Distance between the inclusions"),
    dim: int = typer.Option(2, "-d", "--dim", help="Dimension"),
    m: int = typer.Option(2, "-m", "--order", help="Convexity order"),
    kappa: float = typer.Option(1.0, "-k", "--kappa", help="Relative convexity"),
    kappa_prime: Optional[float] = typer.Option(None, "--kappa-prime", help="Second principal coefficient (d=3)"),
    lam: float = typer.Option(1.0, "--lambda", help="Lamé lambda"),
    mu: float = typer.Option(1.0, "--mu", help="Lamé mu"),
):
    """
    Leading capacity terms a_11^{alpha alpha} and the rate functions.

    Examples:

        gapstress capacity -e 0.01

        gapstress capacity -e 0.001 -d 3 -m 4 --kappa-prime 2
    """
    from ..asymptotics import a11_leading, leading_alphas, rate
    from ..models import InclusionPairGeometry, LameParams

    try:
        p = LameParams(lam=lam, mu=mu, d=dim)
        g = InclusionPairGeometry(d=dim, m=m, kappa=kappa, kappa_prime=kappa_prime, eps=eps, R=max(0.5, 2 * eps))
        laws = [a11_leading(p, g, alpha) for alpha in leading_alphas(dim, m)]
        rates = rate(dim, m, eps, kappa)
    except (GapStressError, ValueError) as e:
        raise _usage_error(str(e))

    table = Table(title=f"Capacities, d={dim}, m={m}, eps={eps:g}", box=box.ROUNDED)
    table.add_column("alpha", style="cyan", justify="right")
    table.add_column("law", style="blue")
    table.add_column("value", style="green", justify="right")
    table.add_column("O(1) remainder", style="dim")
    for law in laws:
        table.add_row(str(law.alpha), law.law, f"{law.value:.10g}", "unknown" if law.has_unknown_constant else "-")
    console.print(table)

    info = [f"rho_d = {rates.rho_d:.10g}"]
    if rates.rho_md is not None:
        info.append(f"rho_md = {rates.rho_md:.10g}")
    if rates.e_rate is not None:
        info.append(f"E = {rates.e_rate:.10g}")
    if rates.f_rate is not None:
        info.append(f"F = {rates.f_rate:.10g}")
    console.print(Panel("\n".join(info), title="Rate functions", border_style="blue", box=box.ROUNDED))


@app.command()
def field(
    eps: float = typer.Option(..., "-e", "--eps", help="Distance between the inclusions"),
    point: List[str] = typer.Option(..., "-x", "--point", help="Point 'x1,x2' (repeatable)"),
    bstar: str = typer.Option("1,0,0", "-b", "--bstar", help="Blow-up factors b1*, comma separated"),
    m: int = typer.Option(2, "-m", "--order", help="Convexity order"),
    kappa: float = typer.Option(1.0, "-k", "--kappa", help="Relative convexity"),
    lam: float = typer.Option(1.0, "--lambda", help="Lamé lambda"),
    mu: float = typer.Option(1.0, "--mu", help="Lamé mu"),
    radius: float = typer.Option(0.5, "-R", "--chart-radius", help="Radius of the narrow region"),
):
    """
    Predicted gradient of u at points of the narrow region.

    Examples:

        gapstress field -e 0.01 -x 0,0 -x 0.1,0
    """
    import numpy as np

    from ..asymptotics import grad_u_asymptotic, near_origin_gradient
    from ..models import InclusionPairGeometry, LameParams

    pts = []
    for text in point:
        xy = _floats(text, "--point")
        if len(xy) != 2:
            raise _usage_error(f"points need two coordinates, got '{text}'")
        pts.append(xy)
    b = _floats(bstar, "--bstar")

    try:
        p = LameParams(lam=lam, mu=mu)
        g = InclusionPairGeometry(d=2, m=m, kappa=kappa, eps=eps, R=radius)
        x = np.asarray(pts, dtype=float)
        grads = grad_u_asymptotic(p, g, b, x)
        simple = near_origin_gradient(p, g, b, x)
    except (GapStressError, ValueError) as e:
        raise _usage_error(str(e))

    table = Table(title=f"grad u, eps={eps:g}", box=box.ROUNDED)
    table.add_column("x", style="cyan")
    for col in ("d1u1", "d2u1", "d1u2", "d2u2"):
        table.add_column(col, style="green", justify="right")
    table.add_column("|near-origin form|", style="dim", justify="right")
    for xi, gr, sm in zip(x, grads, simple):
        table.add_row(
            f"({xi[0]:g}, {xi[1]:g})",
            *(f"{v:.6g}" for v in (gr[0, 0], gr[0, 1], gr[1, 0], gr[1, 1])),
            f"{float(np.linalg.norm(sm)):.6g}",
        )
    console.print(table)


@app.command()
def sweep(
    config: Path = typer.Option(..., "-c", "--config", help="Sweep configuration (TOML)"),
    out: Optional[Path] = typer.Option(None, "-o", "--out", help="Output directory"),
    jobs: Optional[int] = typer.Option(None, "-j", "--jobs", help="Worker processes"),
    eps_list: Optional[str] = typer.Option(None, "--eps-list", help="eps ladder, comma separated"),
    report: bool = typer.Option(True, "--report/--no-report", help="Write report.md after the sweep"),
):
    """
    Run an oracle sweep over an eps ladder.

    Examples:

        gapstress sweep -c configs/disks.toml

        gapstress sweep -c configs/disks.toml --eps-list 0.08,0.04,0.02 -j 4
    """
    from ..config import load_sweep_config
    from ..harness import run_sweep, write_report

    try:
        eps = parse_eps_list(eps_list) if eps_list else None
        cfg = load_sweep_config(config, out=out, jobs=jobs, eps_list=eps)
    except ConfigError as e:
        raise _usage_error(str(e))

    console.print(f"\n[bold blue]Sweep[/bold blue] {cfg.geometry.shape.value}, eps = {cfg.eps_list}\n")
    result = run_sweep(cfg, progress=True)

    table = Table(title="Sweep Complete", box=box.ROUNDED)
    table.add_column("Metric", style="cyan")
    table.add_column("Value", style="green")
    table.add_row("Rows", str(len(result.rows)))
    table.add_row("Failed points", str(result.failed))
    table.add_row("Results", str(result.csv_path))
    table.add_row("Metadata", str(result.metadata_path))
    if result.functionals_path is not None:
        table.add_row("Functionals", str(result.functionals_path))
    console.print(table)

    if result.failed:
        console.print(f"[yellow]{result.failed} sweep point(s) failed; see error rows in the CSV[/yellow]")
    if report:
        try:
            path, _ = write_report(result.output_dir)
            console.print(f"Report: {path}")
        except ReportInputError as e:
            console.print(f"[yellow]No report: {e}[/yellow]")


@app.command()
def moduli(
    eps_list: str = typer.Option("0.08,0.04,0.02,0.01", "--eps-list", help="eps values"),
    m: int = typer.Option(2, "-m", "--order", help="Convexity order"),
    l1: float = typer.Option(1.5, "--l1", help="Cell half-width"),
    l2: float = typer.Option(1.0, "--l2", help="Cell half-height"),
    kappa: Optional[float] = typer.Option(None, "-k", "--kappa", help="Relative convexity (default: from the cell)"),
    lam: float = typer.Option(1.0, "--lambda", help="Lamé lambda"),
    mu: float = typer.Option(1.0, "--mu", help="Lamé mu"),
    oracle: bool = typer.Option(False, "--oracle", help="Also solve the cell problem (m=2)"),
    h_target: float = typer.Option(settings.h_target, "--h", help="Oracle mesh size"),
):
    """
    Effective shear and extensional moduli of a periodic fibre array.

    Examples:

        gapstress moduli

        gapstress moduli --oracle --eps-list 0.04,0.02,0.01
    """
    from ..asymptotics import cell_kappa, effective_moduli
    from ..models import LameParams

    eps_values = _floats(eps_list, "--eps-list")
    if oracle and m != 2:
        raise _usage_error("the cell oracle supports m = 2 only")

    table = Table(title=f"Effective moduli, m={m}", box=box.ROUNDED)
    table.add_column("eps", style="cyan", justify="right")
    table.add_column("mu*", style="green", justify="right")
    table.add_column("E*", style="green", justify="right")
    if oracle:
        table.add_column("mu* oracle", style="blue", justify="right")
        table.add_column("E* oracle", style="blue", justify="right")

    try:
        p = LameParams(lam=lam, mu=mu)
        for eps in eps_values:
            k = kappa if kappa is not None else cell_kappa(l2, eps)
            asym = effective_moduli(p, m, l1, l2, k, eps)
            cells = [f"{eps:g}", f"{asym.mu_star:.6g}", f"{asym.e_star:.6g}"]
            if oracle:
                from ..oracle import cell_moduli

                num = cell_moduli(p, l1, l2, eps, h_target=h_target)
                cells += [f"{num.mu_star:.6g}", f"{num.e_star:.6g}"]
            table.add_row(*cells)
    except (GapStressError, ValueError) as e:
        raise _usage_error(str(e))
    console.print(table)
    console.print("[dim]Asymptotic values omit an O(1) remainder.[/dim]")


@app.command()
def verify(
    full: bool = typer.Option(False, "--full", help="Also run the oracle sweeps (minutes)"),
    out: Path = typer.Option(Path("./acceptance"), "-o", "--out", help="Directory for sweep outputs"),
    jobs: int = typer.Option(settings.max_workers, "-j", "--jobs", help="Worker processes"),
    levels: Optional[str] = typer.Option(None, "--levels", help="Mesh sizes of the refinement ladder"),
):
    """
    Run the acceptance checks.

    Examples:

        gapstress verify

        gapstress verify --full -j 4
    """
    from ..harness import run_acceptance

    ladder = _floats(levels, "--levels") if levels else None
    results = run_acceptance(full=full, out_dir=out, jobs=jobs, levels=ladder)

    table = Table(title="Acceptance", box=box.ROUNDED)
    table.add_column("#", style="cyan", justify="right")
    table.add_column("Check", style="blue")
    table.add_column("Result")
    table.add_column("Detail", style="dim")
    for r in results:
        verdict = "[green]pass[/green]" if r.passed else "[red]FAIL[/red]"
        table.add_row(str(r.number), r.name, verdict, r.detail)
    console.print(table)

    if not full:
        console.print("[dim]Oracle checks skipped; run with --full.[/dim]")
    if not all(r.passed for r in results):
        raise typer.Exit(EXIT_FAIL)


@app.command()
def report(
    results_dir: Path = typer.Argument(..., help="Sweep output directory"),
):
    """
    Write report.md for a completed sweep and print it.
    """
    from ..harness import write_report

    try:
        path, lines = write_report(results_dir)
    except ReportInputError as e:
        raise _usage_error(str(e))

    console.print(Markdown(path.read_text(encoding="utf-8")))
    if not all(ln.passed for ln in lines):
        raise typer.Exit(EXIT_FAIL)


@app.command()
def version():
    """Show version information."""
    from .. import __version__

    console.print(f"\n[bold blue]gapstress[/bold blue] v{__version__}")
    console.print("Stress concentration between nearly touching inclusions\n")


def main():
    """Entry point for the CLI."""
    app()


if __name__ == "__main__":
    main()
