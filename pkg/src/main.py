import asyncio
import json
import logging
import sys
from typing import Any, Dict, Optional

import click
import coloredlogs

import config
from controllers.verification import VerificationSuite
from errors import DspecError
from orchestrator import SpectrumOrchestrator
from services.run_config import ConfigManager, RunConfig
from services.spectrum import QuantumNumbers
from utils import format_from_path, write_table

logger = logging.getLogger("dspec")

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def setup_logging(verbose: bool) -> None:
    coloredlogs.install(level=logging.DEBUG if verbose else logging.INFO, fmt=LOG_FORMAT, stream=sys.stderr)
    # numba's compiler logs are noise at DEBUG
    logging.getLogger("numba").setLevel(logging.WARNING)


class DspecGroup(click.Group):
    """Maps every failure onto the documented exit codes.

    0 success, 1 verification failure, 2 no admissible region, 3 I/O or config error.
    """

    def main(self, *args, **kwargs):
        kwargs["standalone_mode"] = False
        try:
            code = super().main(*args, **kwargs)
        except click.ClickException as e:
            e.show()
            sys.exit(3)
        except click.exceptions.Abort:
            click.echo("Aborted!", err=True)
            sys.exit(1)
        except DspecError as e:
            logger.error("%s", e)
            sys.exit(e.exit_code)
        except (OSError, json.JSONDecodeError) as e:
            logger.error("%s: %s", type(e).__name__, e)
            sys.exit(3)
        sys.exit(code or 0)


def parameter_options(func):
    options = [
        click.option("--config", "config_file", type=click.Path(dir_okay=False), help="Flat JSON run configuration."),
        click.option("--mass", type=float, help="Particle mass m."),
        click.option("--omega", type=float, help="Angular velocity of the rotating frame."),
        click.option("--zeta", type=float, help="Torsion parameter zeta = b / 2pi."),
        click.option("--k-axial", "k_axial", type=float, help="Axial wavenumber k."),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def table_options(func):
    options = [
        click.option("--l-min", "l_min", type=int),
        click.option("--l-max", "l_max", type=int),
        click.option("--n-max", "n_max", type=int),
        click.option("--spin", "spins", multiple=True, type=click.Choice(["+1", "1", "-1"]),
                     help="Spin eigenvalue; repeat for both."),
        click.option("--out", type=click.Path(dir_okay=False), help="Output file (stdout when omitted)."),
        click.option("--format", "fmt", type=click.Choice(config.OUTPUT_FORMATS)),
        click.option("--solver", type=click.Choice(["bessel", "oracle"]),
                     help="Bessel zeros, or finite-difference eigenvalues for cross-validation."),
        click.option("--save-config", "save_config", type=click.Path(dir_okay=False),
                     help="Also write the effective configuration here."),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def load_run_config(config_file: Optional[str], overrides: Dict[str, Any]) -> RunConfig:
    spins = overrides.pop("spins", None)
    if spins:
        overrides["spins"] = [int(s) for s in spins]
    if "fmt" in overrides:
        overrides["format"] = overrides.pop("fmt")
    if overrides.get("format") is None and overrides.get("out"):
        overrides["format"] = format_from_path(overrides["out"], default=None)
    return ConfigManager(config_file).load_config(overrides)


def _maybe_save(run_config: RunConfig, path: Optional[str]) -> None:
    if path:
        ConfigManager.save_config(run_config, path)


async def _with_orchestrator(run_config: RunConfig, job):
    orchestrator = SpectrumOrchestrator.from_config(run_config)
    try:
        await orchestrator.initialize()
        return await job(orchestrator)
    finally:
        orchestrator.cleanup()


@click.group(cls=DspecGroup)
@click.option("--verbose", is_flag=True, help="DEBUG logging.")
def cli(verbose: bool):
    """Spectrum of a spin-1/2 particle in the rotating frame of a cosmic dislocation."""
    setup_logging(verbose)


@cli.command()
@parameter_options
@table_options
def spectrum(config_file, save_config, **overrides):
    """Level table sorted by exact energy."""
    run_config = load_run_config(config_file, overrides)
    _maybe_save(run_config, save_config)
    frame = asyncio.run(_with_orchestrator(run_config, lambda o: o.spectrum(run_config)))
    write_table(frame, run_config.out, run_config.format)
    return 0


@cli.command()
@parameter_options
@table_options
@click.option("--param", "sweep_param", type=click.Choice(["omega", "zeta", "k", "mass"]))
@click.option("--from", "sweep_from", type=float)
@click.option("--to", "sweep_to", type=float)
@click.option("--steps", "sweep_steps", type=int)
def sweep(config_file, save_config, **overrides):
    """Long-format level table over a parameter sweep."""
    run_config = load_run_config(config_file, overrides)
    if not run_config.has_sweep:
        raise click.UsageError("sweep needs --param/--from/--to/--steps (or the sweep_* config keys)")
    _maybe_save(run_config, save_config)
    frame = asyncio.run(_with_orchestrator(run_config, lambda o: o.sweep(run_config)))
    write_table(frame, run_config.out, run_config.format)
    return 0


@cli.command()
@click.option("--full", is_flag=True, help="Full oracle resolution and the n = 0..50 decay sweep.")
@click.option("--suite", "suites", multiple=True, type=click.Choice(["geometry", "specfun", "spectrum", "oracle"]))
@click.option("--inject-fault", is_flag=True, hidden=True, help="Flip the sign of the R'/rho term.")
def verify(full, suites, inject_fault):
    """Run the invariant suites; JSON lines on stdout, exit 1 on any failure."""
    suite = VerificationSuite("full" if full else "quick", connection_term=-1.0 if inject_fault else 1.0)
    suite.run(suites or None)
    for line in suite.report_lines():
        click.echo(line)
    if suite.passed:
        logger.info("All checks passed")
        return 0
    logger.error("%d checks failed", sum(not r.passed for r in suite.results))
    return 1


@cli.command()
@parameter_options
@click.option("--n", "n", type=int, default=0, show_default=True, help="Radial index.")
@click.option("--l", "l", type=int, default=0, show_default=True, help="Orbital quantum number.")
@click.option("--spin", type=click.Choice(["+1", "1", "-1"]), default="+1", show_default=True)
@click.option("--samples", type=click.IntRange(min=config.MIN_RADIAL_GRID_SIZE), default=512, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False))
@click.option("--format", "fmt", type=click.Choice(config.OUTPUT_FORMATS))
def wavefunction(config_file, n, l, spin, samples, out, fmt, **overrides):
    """Sampled radial function R(rho) of one level."""
    run_config = load_run_config(config_file, overrides)
    params = run_config.physical_params()
    qn = QuantumNumbers(n, l, int(spin))
    frame, meta = asyncio.run(_with_orchestrator(run_config, lambda o: o.wavefunction(qn, params, samples)))
    out = out if out is not None else run_config.out
    fmt = fmt or (format_from_path(out, default=None) if out else None) or run_config.format
    write_table(frame, out, fmt, meta)
    return 0


@cli.command()
@parameter_options
@click.option("--rho", type=float, required=True, help="Radial coordinate.")
def geometry(config_file, rho, **overrides):
    """Metric, tetrad and structure-equation residuals at one radius (JSON)."""
    run_config = load_run_config(config_file, overrides)
    report = SpectrumOrchestrator.geometry_report(run_config.physical_params(), rho)
    click.echo(json.dumps(report, sort_keys=True, indent=2))
    return 0


def main():
    cli(prog_name="dspec")


if __name__ == "__main__":
    main()
