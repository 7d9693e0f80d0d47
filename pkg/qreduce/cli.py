"""Command-line entry point: ``python -m qreduce <subcommand>``.

    params     the tau -> tau_perp parameter maps (CSV)
    kravchuk   roots, gaps and masses of Krawtchouk polynomials (CSV)
    simulate   one run of the reduction pipeline (JSON transcript)
    verify     executable checks of the lemmas (JSON report)

Exit codes: 0 success, 1 failed verification, 2 usage error, 3 budget exceeded.
"""

import logging
import os
from contextlib import contextmanager

import click

from typing import Optional

from .analytic import TauPerpCurves, OptimalTauPerp, TAU_STEP
from .kravchuk import KrawtchoukContext
from .parameters import (
    Configurable, IntParameter, OptionalIntParameter, SelectionParameter, BooleanParameter,
    PatternParameter, PathParameter, BudgetExceededError, BUDGET_ENV, default_budget
)
from .recorders import record, write_json, ANALYTIC_DIGITS, KRAWTCHOUK_DIGITS
from .reduction import PRESETS, STRICT, EXPLORATORY, DECODER_PATTERN, ReductionParams, preset, run_pipeline
from .verifiers import VERIFIERS, SCHEMA_VERSION, run_verifier

_LOGGER = logging.getLogger(__name__)

FAILURE_EXIT = 1
BUDGET_EXIT = 3

SUBCOMMANDS = ('params', 'kravchuk', 'simulate', 'verify')


class RunConfig(Configurable):
    """Validated command-line configuration of one invocation."""

    subcommand = SelectionParameter(SUBCOMMANDS)
    preset = SelectionParameter(tuple(PRESETS) + (None,), default=None)
    q = OptionalIntParameter(min=2, default=None)
    n = OptionalIntParameter(min=1, default=None)
    k = OptionalIntParameter(min=0, default=None)
    t = OptionalIntParameter(min=0, default=None)
    u = OptionalIntParameter(min=1, default=None)
    l = IntParameter(min=0, max=4, default=0)
    decoder = PatternParameter(DECODER_PATTERN, default='exhaustive')
    shots = IntParameter(min=0, default=1000)
    seed = IntParameter(min=0, default=0)
    mode = SelectionParameter((STRICT, EXPLORATORY), default=EXPLORATORY)
    budget = OptionalIntParameter(min=1, default=None)
    workers = IntParameter(min=1, default=1)
    out = PathParameter(default=None)
    overwrite = BooleanParameter(default=False)

    def __init__(self, subcommand: str, **options):
        self.subcommand = subcommand
        for name, value in options.items():
            if name not in self.parameter_names():
                raise ValueError(f"unknown option '{name}' for {self.subcommand}.")
            if value is not None:
                setattr(self, name, value)

    def resolved_budget(self) -> int:
        """The REDUCE_BUDGET environment variable wins over --budget."""
        if BUDGET_ENV in os.environ or self.budget is None:
            return default_budget()
        return self.budget

    def reduction_params(self):
        """(ReductionParams, fixed code or None) from the preset and the explicit flags."""
        overrides = dict(q=self.q, n=self.n, k=self.k, t=self.t, u=self.u, coin_bits=self.l,
                         decoder=self.decoder, shots=self.shots, seed=self.seed, mode=self.mode)
        if self.preset is not None:
            return preset(self.preset, **overrides)
        missing = [name for name in ('q', 'n', 'k', 't') if getattr(self, name) is None]
        if missing:
            raise ValueError(f"missing {', '.join('--' + m for m in missing)}: give them or a --preset.")
        options = {key: value for key, value in overrides.items() if value is not None}
        return ReductionParams(**options), None


@contextmanager
def _handle_errors():
    """Map library errors onto exit codes."""
    try:
        yield
    except BudgetExceededError as e:
        click.echo(f'Error: budget exceeded in {e.dimension}: {e}', err=True)
        click.get_current_context().exit(BUDGET_EXIT)
    except (ValueError, FileExistsError) as e:
        raise click.UsageError(str(e))


@click.group()
@click.option('-v', '--verbose', count=True, help='Raise the log level (repeat for debug).')
def cli(verbose):
    """Quantum reduction lab: parameter maps, Krawtchouk data, pipeline simulation, checks."""
    level = logging.WARNING - 10 * min(verbose, 2)
    logging.basicConfig(level=level, format='%(levelname)s %(name)s: %(message)s')


@cli.command()
@click.option('--q', 'qs', type=int, multiple=True, default=(2,), help='Field order, repeatable.')
@click.option('--rate', 'rates', type=float, multiple=True, help='Code rate, repeatable (default 0.05 grid).')
@click.option('--tau-step', type=float, default=TAU_STEP, help='Step of the tau grid.')
@click.option('--fig2', is_flag=True, help='Emit the optimal tau_perp per rate instead of the tau curves.')
@click.option('--out', type=click.Path(dir_okay=False), help='Output CSV (default stdout).')
@click.option('--overwrite', is_flag=True, help='Overwrite the output file.')
def params(qs, rates, tau_step, fig2, out, overwrite):
    """tau_perp against tau and against the hard band of the dual code."""
    for q in qs:
        if q < 2:
            raise click.BadParameter(f'q ({q}) must be >= 2.', param_hint='--q')
    for rate in rates:
        if not 0 < rate < 1:
            raise click.BadParameter(f'rate ({rate}) must be in (0, 1).', param_hint='--rate')
    if not 0 < tau_step <= 0.5:
        raise click.BadParameter(f'tau step ({tau_step}) must be in (0, 0.5].', param_hint='--tau-step')

    config = RunConfig('params', out=out, overwrite=overwrite)
    stream = OptimalTauPerp(qs, rates or None) if fig2 else TauPerpCurves(qs, rates or None, tau_step)
    with _handle_errors():
        record(stream, config.out, config.overwrite, ANALYTIC_DIGITS)


@cli.command()
@click.option('--q', type=int, default=2, show_default=True)
@click.option('--n', type=int, required=True)
@click.option('--t-max', type=int, help='Largest degree (default n // q).')
@click.option('--out', type=click.Path(dir_okay=False), help='Output CSV (default stdout).')
@click.option('--overwrite', is_flag=True)
def kravchuk(q, n, t_max, out, overwrite):
    """Roots, root gaps and maximal masses of K_1 .. K_t_max."""
    with _handle_errors():
        config = RunConfig('kravchuk', q=q, n=n, out=out, overwrite=overwrite)
        report = KrawtchoukContext(config.q, config.n).report(t_max)
        record(report, config.out, config.overwrite, KRAWTCHOUK_DIGITS)


def _common_options(function):
    for option in reversed([
        click.option('--preset', type=click.Choice(sorted(PRESETS)), help='Named instance.'),
        click.option('--q', type=int), click.option('--n', type=int),
        click.option('--k', type=int), click.option('--t', type=int),
        click.option('--u', type=int, help='Target dual weight (default selected from K_t).'),
        click.option('--l', type=int, help='Coin bits of the decoder.'),
        click.option('--decoder', help='exhaustive, constant or unreliable:EPS.'),
        click.option('--shots', type=int), click.option('--seed', type=int),
        click.option('--budget', type=int, help=f'Basis-state budget ({BUDGET_ENV} overrides it).'),
        click.option('--out', type=click.Path(dir_okay=False), help='Output JSON (default stdout).'),
        click.option('--overwrite', is_flag=True),
    ]):
        function = option(function)
    return function


@cli.command()
@_common_options
@click.option('--mode', type=click.Choice([STRICT, EXPLORATORY]), default=EXPLORATORY, show_default=True)
def simulate(preset, q, n, k, t, u, l, decoder, shots, seed, budget, out, overwrite, mode):
    """Run the reduction on one code and write its transcript."""
    with _handle_errors():
        if preset is None and q is None:
            preset = 'repetition3'
        config = RunConfig('simulate', preset=preset, q=q, n=n, k=k, t=t, u=u, l=l, decoder=decoder,
                           shots=shots, seed=seed, mode=mode, budget=budget, out=out, overwrite=overwrite)
        params, code = config.reduction_params()
        transcript = run_pipeline(params, code=code, budget=config.resolved_budget())
        write_json(transcript.to_dict(), config.out, config.overwrite, schema_name='transcript')

    click.echo(
        f'u={transcript.u} Z={transcript.Z:.6g} epsilon_G={transcript.epsilon_G:.6g} '
        f'D_tr={transcript.trace_distance:.6g} success={transcript.success_rate}',
        err=True
    )


@cli.command()
@click.argument('names', nargs=-1)
@click.option('--list', 'list_only', is_flag=True, help='List the verifiers and exit.')
@_common_options
@click.option('--p', type=float, help='True good probability of the amplification toy.')
@click.option('--q-est', type=float, help='Estimated good probability of the amplification toy.')
@click.option('--epsilon', type=float, help='Decoder success target.')
@click.option('--eta', type=float, help='Relative excess of Z.')
@click.option('--rate', type=float, help='Code rate.')
@click.option('--codes', type=int, help='Number of sampled codes.')
@click.option('--workers', type=int, default=1, show_default=True, help='Process pool size.')
def verify(names, list_only, preset, q, n, k, t, u, l, decoder, shots, seed, budget, workers, out,
           overwrite, p, q_est, epsilon, eta, rate, codes):
    """Run the named verifiers and write a JSON report; exit 1 if one fails."""
    if list_only:
        for name, verifier in VERIFIERS.items():
            click.echo(f'{name:24s}{(verifier.__doc__ or "").strip().splitlines()[0]}')
        return
    if not names:
        raise click.UsageError('give at least one verifier name, or --list.')

    with _handle_errors():
        config = RunConfig('verify', preset=preset, workers=workers, out=out, overwrite=overwrite, budget=budget)
        options = dict(
            preset_name=config.preset, q=q, n=n, k=k, t=t, u=u, l=l, decoder=decoder, shots=shots,
            seed=seed, workers=config.workers, budget=config.resolved_budget(), p=p, q_est=q_est,
            epsilon=epsilon, eta=eta, rate=rate, codes=codes,
        )
        reports = [run_verifier(name, **options) for name in names]
        passed = all(report.passed for report in reports)
        write_json({
            'schema_version': SCHEMA_VERSION,
            'passed': passed,
            'reports': [report.to_dict() for report in reports],
        }, config.out, config.overwrite, schema_name='verify_report')

    for report in reports:
        click.echo(f'{report.name}: {"PASS" if report.passed else "FAIL"}', err=True)
    if not passed:
        click.get_current_context().exit(FAILURE_EXIT)


def main(argv: Optional[list] = None):
    cli.main(args=argv, prog_name='qreduce')
