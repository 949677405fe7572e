"""
Command-line entry point of the lab.

    python cli.py convergence --alpha 3 --dim 3 --K 16 --tau-max 0.125 --tau-min 0.0078125
    python cli.py evolve --K 16 --tau 0.0625 --T 0.25 --snapshots 0.125,0.25
    python cli.py selftest
    python cli.py data --dim 3 --K 16
    python cli.py serve

Exit codes: 0 success, 1 configuration error, 2 blow-up outside a study,
3 selftest failure.
"""

import functools
import logging
import sys
from pathlib import Path
from typing import List, Optional, Tuple

import click
from pydantic import ValidationError

from app.core.config import settings, setup_logging
from app.core.exceptions import ConfigurationError, LabError, SelfTestFailure
from app.crud import report_store, write_report, write_snapshot
from app.models import GridSpec
from app.schemas import DiagnosticsRequest, InitialDataSpec, ProblemConfig, SchemeConfig, StudyConfig
from app.services.convergence import TAU_PRESETS, plan_tau_grid, run_study
from app.services.initial_data import diagnostics, make_initial_state
from app.services.integrators import EnergyObserver, StateCollector, evolve
from app.services.selftest import available_checks, run_selftest
from app.services.strichartz import StrichartzAccumulator

logger = logging.getLogger(__name__)


def parse_list(text: Optional[str], cast=float) -> List:
    """Comma-separated values, e.g. '16,32' or '0.125,0.0625'"""
    if not text:
        return []
    try:
        return [cast(item) for item in text.split(",") if item.strip()]
    except ValueError as e:
        raise ConfigurationError(f"Cannot parse list '{text}': {e}")


def parse_pairs(values: Tuple[str, ...]) -> List[Tuple[float, float]]:
    """Strichartz pairs given as 'p,q' (p may be 'inf')"""
    pairs = []
    for value in values:
        items = parse_list(value)
        if len(items) != 2:
            raise ConfigurationError(f"Strichartz pair must be 'p,q', got '{value}'")
        pairs.append((items[0], items[1]))
    return pairs


def handle_errors(func):
    """Translate lab errors and validation errors into exit codes"""
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except ValidationError as e:
            click.echo(f"Configuration error: {e}", err=True)
            sys.exit(ConfigurationError.exit_code)
        except LabError as e:
            click.echo(f"{type(e).__name__}: {e.message}", err=True)
            sys.exit(e.exit_code)
    return wrapper


def data_options(func):
    """Options shared by every command that builds initial data"""
    options = [
        click.option("--data", "mode", type=click.Choice(["det", "deterministic", "random"]), default="det",
                     show_default=True, help="Deterministic or random rough data"),
        click.option("--eps", type=float, default=settings.DEFAULT_EPS, show_default=True,
                     help="Regularity slack above H^1 x L^2"),
        click.option("--seed", type=int, default=settings.DEFAULT_SEED, show_default=True,
                     help="Seed of the random data"),
        click.option("--target-u", type=float, default=settings.DEFAULT_TARGET, show_default=True,
                     help="H^1 norm of u0"),
        click.option("--target-v", type=float, default=settings.DEFAULT_TARGET, show_default=True,
                     help="L^2 norm of v0"),
    ]
    for option in reversed(options):
        func = option(func)
    return func


@click.group()
@click.option("--log-level", default=None, help="Override LOG_LEVEL")
def cli(log_level: Optional[str]):
    """Filtered Strang splitting lab for u_tt - Laplace u + mu u^alpha = 0 on the torus"""
    setup_logging(log_level)


@cli.command()
@click.option("--alpha", type=click.IntRange(2, 5), default=3, show_default=True)
@click.option("--mu", type=click.Choice(["-1", "1"]), default="1", show_default=True)
@click.option("--dim", type=click.IntRange(1, 3), default=3, show_default=True)
@click.option("--box", type=click.Choice(["torus", "unit"]), default="torus", show_default=True,
              help="2*pi-torus or the unit box [0, 1]^d")
@click.option("--K", "K_text", default="16", show_default=True, help="Spectral degrees, comma separated")
@click.option("--tau-max", type=float, default=0.125, show_default=True)
@click.option("--tau-min", type=float, default=2.0 ** -9, show_default=True)
@click.option("--tau-ratio", type=float, default=settings.DEFAULT_TAU_RATIO, show_default=True)
@click.option("--tau-ref", type=float, default=settings.DEFAULT_TAU_REF, show_default=True)
@click.option("--tau-list", default=None, help="Explicit step sizes, comma separated")
@click.option("--tau-preset", type=click.Choice(sorted(TAU_PRESETS)), default=None,
              help="Named list of step sizes")
@click.option("--T", "T", type=float, default=settings.DEFAULT_T, show_default=True)
@click.option("--scheme", type=click.Choice(["strang", "lie"]), default="strang", show_default=True)
@data_options
@click.option("--dealias", is_flag=True, help="Dealias the nonlinearity by zero padding")
@click.option("--filter-cutoff", type=float, default=None, help="Fixed filter cutoff (default 1/tau)")
@click.option("--fit-window", type=int, default=settings.DEFAULT_FIT_WINDOW, show_default=True)
@click.option("--strichartz", multiple=True, help="Strichartz pair 'p,q' (repeatable)")
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="CSV report path")
@click.option("--json", "json_path", type=click.Path(dir_okay=False), default=None, help="JSON report path")
@handle_errors
def convergence(alpha, mu, dim, box, K_text, tau_max, tau_min, tau_ratio, tau_ref, tau_list, tau_preset, T,
                scheme, mode, eps, seed, target_u, target_v, dealias, filter_cutoff, fit_window, strichartz, out,
                json_path):
    """Temporal convergence study against a fine-step reference run"""
    if tau_list:
        taus = parse_list(tau_list)
    elif tau_preset:
        taus = list(TAU_PRESETS[tau_preset])
    else:
        taus = plan_tau_grid(tau_max, tau_min, tau_ratio, tau_ref)

    config = StudyConfig(
        problem=ProblemConfig(alpha=alpha, mu=int(mu), d=dim, box=box),
        K_list=parse_list(K_text, int),
        tau_list=taus,
        tau_ref=tau_ref,
        T=T,
        data=InitialDataSpec(mode=mode, eps=eps, seed=seed, target_u=target_u, target_v=target_v),
        fit_window=fit_window,
        scheme=scheme,
        dealias=dealias,
        filter_cutoff=filter_cutoff,
        strichartz_pairs=parse_pairs(strichartz) if strichartz else None,
    )
    report = run_study(config)
    write_report(report, out, json_path)

    if out is None:
        click.echo(report_store.to_csv(report), nl=False)
    for fitted in report.orders:
        order = f"{fitted.order:.3f}" if fitted.order is not None else "n/a"
        click.echo(f"K={fitted.K} {fitted.norm}: order {order}")
    for record in report.strichartz:
        click.echo(f"K={record.K} Strichartz ({record.p:g},{record.q:g}): {record.value:.6e}")


@cli.command(name="evolve")
@click.option("--alpha", type=click.IntRange(2, 5), default=3, show_default=True)
@click.option("--mu", type=click.Choice(["-1", "1"]), default="1", show_default=True)
@click.option("--dim", type=click.IntRange(1, 3), default=3, show_default=True)
@click.option("--K", "K", type=int, default=16, show_default=True)
@click.option("--tau", type=float, default=1.0 / 16, show_default=True)
@click.option("--T", "T", type=float, default=settings.DEFAULT_T, show_default=True)
@click.option("--scheme", type=click.Choice(["strang", "lie"]), default="strang", show_default=True)
@data_options
@click.option("--dealias", is_flag=True)
@click.option("--shortcut", is_flag=True, help="Step only the band reached by the nonlinearity")
@click.option("--filter-cutoff", type=float, default=None)
@click.option("--snapshots", default=None, help="Times at which to write snapshots, comma separated")
@click.option("--out-dir", type=click.Path(file_okay=False), default=settings.REPORTS_DIR, show_default=True)
@click.option("--strichartz", multiple=True, help="Strichartz pair 'p,q' (repeatable)")
@handle_errors
def evolve_command(alpha, mu, dim, K, tau, T, scheme, mode, eps, seed, target_u, target_v, dealias, shortcut,
                   filter_cutoff, snapshots, out_dir, strichartz):
    """Single run with energy diagnostics and optional field snapshots"""
    problem = ProblemConfig(alpha=alpha, mu=int(mu), d=dim)
    cfg = SchemeConfig(tau=tau, T=T, K=K, filter_cutoff=filter_cutoff, scheme=scheme, dealias=dealias,
                       shortcut=shortcut)
    snapshot_steps = {cfg.steps_for(t) for t in parse_list(snapshots)}
    n_steps = cfg.steps_for()

    spec = InitialDataSpec(mode=mode, eps=eps, seed=seed, target_u=target_u, target_v=target_v)
    U0 = make_initial_state(spec, GridSpec(d=dim, K=K))
    energy_observer = EnergyObserver(problem)
    collector = StateCollector()
    accumulators = [StrichartzAccumulator(tau, p, q, cfg.cutoff, d=dim) for p, q in parse_pairs(strichartz)]

    # with the shortcut every observed step rebuilds the full state, so observe only what is written
    observed = snapshot_steps | {0, n_steps} if shortcut and not accumulators else None

    def snapshot_filter(n, t, U):
        if n in snapshot_steps:
            collector(n, t, U)

    result = evolve(U0, problem, cfg, [energy_observer, snapshot_filter, *accumulators], at=observed)

    for n, t, U in collector.states:
        for component in ("u", "v"):
            path = Path(out_dir) / f"step{n:06d}_{component}.bin"
            write_snapshot(getattr(U, component), path, component)
            click.echo(f"Snapshot t={t:g} ({component}) written to {path}")

    click.echo(f"Steps: {result.steps} (shortcut {'on' if result.shortcut_used else 'off'})")
    click.echo(f"Relative energy drift: {energy_observer.max_relative_drift():.3e}")
    for acc in accumulators:
        click.echo(f"Strichartz ({acc.p:g},{acc.q:g}): {acc.value:.6e}")


@cli.command()
@click.option("--check", "checks", multiple=True, type=click.Choice(available_checks()),
              help="Run only the named checks (repeatable)")
@handle_errors
def selftest(checks):
    """Run the property suite; exit code 0 iff every check passes"""
    report = run_selftest(checks or None)
    for result in report.results:
        status = "PASS" if result.passed else "FAIL"
        click.echo(f"[{status}] {result.name} ({result.seconds:.2f}s) {result.detail}".rstrip())
    if not report.passed:
        raise SelfTestFailure(f"{len(report.failures)} of {len(report.results)} checks failed")
    click.echo(f"All {len(report.results)} checks passed")


@cli.command()
@click.option("--dim", type=click.IntRange(1, 3), default=3, show_default=True)
@click.option("--K", "K", type=int, default=16, show_default=True)
@data_options
@click.option("--q", type=float, default=8.0, show_default=True, help="Lebesgue exponent of the growth sweep")
@handle_errors
def data(dim, K, mode, eps, seed, target_u, target_v, q):
    """Spectra and norm diagnostics of the initial data as JSON"""
    # the HTTP degree limit does not apply on the command line
    request = DiagnosticsRequest.model_construct(
        spec=InitialDataSpec(mode=mode, eps=eps, seed=seed, target_u=target_u, target_v=target_v), d=dim, K=K, q=q
    )
    click.echo(diagnostics(request).model_dump_json(indent=2))


@cli.command()
@click.option("--host", default=settings.HOST, show_default=True)
@click.option("--port", type=int, default=settings.PORT, show_default=True)
def serve(host, port):
    """Serve the HTTP API with uvicorn"""
    import uvicorn
    uvicorn.run("main:app", host=host, port=port, reload=settings.DEBUG_MODE, log_config=None)


if __name__ == "__main__":
    cli()
