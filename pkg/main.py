# main.py

"""
Chain strength toolkit: bounds, verification oracles, job-shop encoding and
classical solver sweeps for minor-embedded Ising problems.
"""

import asyncio
import json
import logging
import sys
from typing import Any, List, Optional

import click

from bound_hub import BoundHub
from bounds import check_admissible, optimize_all, tight_bound
from config_loader import load_config
from embedding import MinorEmbedding, distribute_fields, require_valid
from errors import ChainBoundError, SizeCapError
from formatter import FormatterFactory
from jsp import encode, report_gap_quantities
from loaders import dump_json, load_bundle, load_distribution, load_json, load_jsp, load_problem, parse_grid
from numeric import parse_number, to_json_number
from oracle import probe_tightness, verify_no_domain_wall
from solver import AnnealSchedule, solve_exhaustive, solve_sa, sweep_embeddings, tts

logger = logging.getLogger(__name__)

EXIT_VALIDATION = 1
EXIT_SIZE_CAP = 2
EXIT_IO = 3


def setup_logging(verbose: bool = False, level: str = "INFO"):
    """Setup logging configuration; log lines go to stderr."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else getattr(logging, str(level).upper(), logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=[logging.StreamHandler(sys.stderr)],
        force=True,
    )


def exit_code_for(error: Exception) -> int:
    if isinstance(error, SizeCapError):
        return EXIT_SIZE_CAP
    if isinstance(error, (OSError, json.JSONDecodeError)):
        return EXIT_IO
    return EXIT_VALIDATION


def fail(ctx: click.Context, error: Exception):
    logger.error(f"❌ {error}", exc_info=ctx.obj.get('debug', False))
    ctx.exit(exit_code_for(error))


def emit(ctx: click.Context, report: Any, output: Optional[str] = None):
    """Render a report in the selected format; optionally also write its JSON."""
    if output:
        dump_json(report if isinstance(report, dict) else report.to_dict(), output)
    text = FormatterFactory.create(ctx.obj['format']).format(report)
    if text:
        click.echo(text)


def resolve_distribution(ctx: click.Context, bundle, dist_path: Optional[str], strategy: Optional[str]):
    if dist_path:
        dist = load_distribution(dist_path, ctx.obj['exact'])
        dist.validate(bundle.problem, bundle.embedding)
        return dist
    strategy = strategy or ctx.obj['config']['bounds']['distribution']
    return distribute_fields(bundle.problem, bundle.hardware, bundle.embedding, strategy)


def parse_strengths(text: str, count: int, exact: bool) -> List:
    """A single magnitude for every chain or a comma separated list with one per qubit."""
    values = parse_grid(text, exact)
    if len(values) == 1:
        return values * count
    if len(values) != count:
        raise ChainBoundError(f"Expected 1 or {count} chain strengths, got {len(values)}")
    return values


@click.group()
@click.option('--config', 'config_path', default=None, help='Configuration file path')
@click.option('--format', 'output_format', type=click.Choice(['rich', 'simple', 'json']), default='rich',
              help='Output format')
@click.option('--exact/--float', 'exact', default=None, help='Rational or 64-bit float arithmetic')
@click.option('--verbose', '-v', is_flag=True, help='Enable verbose logging')
@click.option('--debug', is_flag=True, help='Enable debug logging with tracebacks')
@click.pass_context
def cli(ctx, config_path, output_format, exact, verbose, debug):
    """Lower bounds and verification tools for minor-embedding chain strength."""
    config = load_config(config_path)
    setup_logging(verbose or debug, config['logging']['level'])
    ctx.ensure_object(dict)
    ctx.obj.update({
        'config': config,
        'format': output_format,
        'exact': config['arithmetic']['exact'] if exact is None else exact,
        'debug': debug,
    })
    logger.debug("📋 Configuration loaded")


def bound_options(command):
    command = click.option('--dist', 'dist_path', default=None, help='Field distribution JSON')(command)
    command = click.option('--strategy', type=click.Choice(['uniform', 'choi2', 'single']), default=None,
                           help='Field distribution strategy')(command)
    return click.argument('instance', type=click.Path())(command)


@cli.command()
@bound_options
@click.option('--optimize', is_flag=True, help='Also run the field distribution optimizer')
@click.option('--trial', 'trials', default=None, help='Comma separated magnitudes for the admissibility profile')
@click.option('--output', default=None, help='Write the JSON report to this file')
@click.pass_context
def bounds(ctx, instance, dist_path, strategy, optimize, trials, output):
    """C(i), Choi bounds and the tight subset bound per logical qubit."""
    try:
        bundle = load_bundle(instance, ctx.obj['exact'])
        dist = resolve_distribution(ctx, bundle, dist_path, strategy)
        hub = BoundHub(ctx.obj['config'])
        trial_strengths = parse_grid(trials, ctx.obj['exact']) if trials else None
        report = asyncio.run(hub.compute_report(bundle.problem, bundle.hardware, bundle.embedding, dist=dist,
                                                optimize=optimize, trial_strengths=trial_strengths))
        emit(ctx, report, output)
        logger.info(f"✅ Bounds computed for {len(report.qubits)} logical qubits")
    except Exception as e:
        fail(ctx, e)


@cli.command('optimize-h')
@click.argument('instance', type=click.Path())
@click.option('--qubit', 'qubits', type=int, multiple=True, help='Restrict to these logical qubits')
@click.option('--output', default=None, help='Write the optimized distribution JSON to this file')
@click.pass_context
def optimize_h(ctx, instance, qubits, output):
    """Search the sign-coherent field splits for the smallest tight bound."""
    try:
        bundle = load_bundle(instance, ctx.obj['exact'])
        settings = ctx.obj['config']['optimizer']
        dist, values = optimize_all(bundle.problem, bundle.hardware, bundle.embedding, qubits=list(qubits) or None,
                                    resolution_bits=settings['resolution_bits'], max_passes=settings['max_passes'],
                                    max_chain_size=ctx.obj['config']['bounds']['max_chain_size'])
        if output:
            dump_json(dist.to_dict(), output)
        report = {
            str(i): {
                "bound": to_json_number(value),
                "h_dist": [to_json_number(dist.values[i][node]) for node in sorted(dist.values[i])],
            }
            for i, value in sorted(values.items())
        }
        emit(ctx, report)
    except Exception as e:
        fail(ctx, e)


@cli.command()
@bound_options
@click.option('--strength', required=True, help='Chain strength magnitude, or one per qubit (comma separated)')
@click.option('--output', default=None, help='Write the JSON report to this file')
@click.pass_context
def admissible(ctx, instance, dist_path, strategy, strength, output):
    """Check C(W) >= 0 on every chain subset at the given magnitudes."""
    try:
        bundle = load_bundle(instance, ctx.obj['exact'])
        dist = resolve_distribution(ctx, bundle, dist_path, strategy)
        strengths = parse_strengths(strength, bundle.problem.num_qubits, ctx.obj['exact'])
        report = check_admissible(bundle.problem, bundle.hardware, bundle.embedding, dist, strengths,
                                  ctx.obj['config']['bounds']['max_chain_size'])
        emit(ctx, report, output)
    except Exception as e:
        fail(ctx, e)


@cli.command()
@bound_options
@click.option('--strength', default=None, help='Magnitudes to verify; default is tight bound + epsilon per chain')
@click.option('--epsilon', default=None, help='Margin above the tight bound (rational allowed)')
@click.option('--output', default=None, help='Write the JSON report to this file')
@click.pass_context
def verify(ctx, instance, dist_path, strategy, strength, epsilon, output):
    """Exhaustively check that no ground state contains a domain wall."""
    try:
        config = ctx.obj['config']
        bundle = load_bundle(instance, ctx.obj['exact'])
        dist = resolve_distribution(ctx, bundle, dist_path, strategy)
        n = bundle.problem.num_qubits
        if strength:
            strengths = parse_strengths(strength, n, ctx.obj['exact'])
        else:
            margin = parse_number(epsilon or config['oracle']['epsilon'], ctx.obj['exact'])
            strengths = [tight_bound(bundle.problem, bundle.hardware, bundle.embedding, dist, i,
                                     config['bounds']['max_chain_size'])[0] + margin for i in range(n)]
        check = verify_no_domain_wall(bundle.problem, bundle.hardware, bundle.embedding, dist, strengths,
                                      max_physical=config['oracle']['max_physical_qubits'],
                                      workers=config['enumeration']['workers'])
        emit(ctx, check, output)
        if not check.passed:
            logger.error("❌ Verification failed")
            ctx.exit(EXIT_VALIDATION)
        logger.info("✅ No domain wall in any ground state")
    except click.exceptions.Exit:
        raise
    except Exception as e:
        fail(ctx, e)


@cli.command()
@bound_options
@click.option('--qubit', type=int, required=True, help='Logical qubit to probe')
@click.option('--epsilon', default=None, help='Distance below the tight bound')
@click.option('--strength', default=None, help='Probe at this magnitude instead')
@click.option('--output', default=None, help='Write the JSON report to this file')
@click.pass_context
def probe(ctx, instance, dist_path, strategy, qubit, epsilon, strength, output):
    """Look for neighbour spins that break chain QUBIT just below its tight bound."""
    try:
        config = ctx.obj['config']
        bundle = load_bundle(instance, ctx.obj['exact'])
        dist = resolve_distribution(ctx, bundle, dist_path, strategy)
        _, witness = tight_bound(bundle.problem, bundle.hardware, bundle.embedding, dist, qubit,
                                 config['bounds']['max_chain_size'])
        margin = parse_number(epsilon or config['oracle']['epsilon'], ctx.obj['exact'])
        override = parse_number(strength, ctx.obj['exact']) if strength else None
        result = probe_tightness(bundle.problem, bundle.hardware, bundle.embedding, dist, qubit, witness, margin,
                                 strength=override, max_physical=config['oracle']['max_physical_qubits'])
        emit(ctx, result, output)
    except Exception as e:
        fail(ctx, e)


@cli.command('encode-jsp')
@click.argument('instance', type=click.Path())
@click.option('--output', default=None, help='Write the Ising problem JSON (with offset and variable map)')
@click.pass_context
def encode_jsp(ctx, instance, output):
    """Encode a job-shop instance as an Ising problem and report its C(i) figures."""
    try:
        encoding = encode(load_jsp(instance, ctx.obj['exact']))
        if output:
            data = encoding.problem.to_dict()
            data["offset"] = to_json_number(encoding.offset)
            data["variables"] = [list(var) for var, _ in sorted(encoding.index.items(), key=lambda kv: kv[1])]
            dump_json(data, output)
        emit(ctx, report_gap_quantities(encoding))
    except Exception as e:
        fail(ctx, e)


@cli.command()
@click.argument('problem', type=click.Path())
@click.option('--method', type=click.Choice(['exhaustive', 'sa']), default='exhaustive')
@click.option('--seed', type=int, default=None)
@click.option('--sweeps', type=int, default=None)
@click.option('--restarts', type=int, default=None)
@click.option('--output', default=None, help='Write the JSON result to this file')
@click.pass_context
def solve(ctx, problem, method, seed, sweeps, restarts, output):
    """Ground states by exhaustive enumeration or simulated annealing."""
    try:
        config = ctx.obj['config']
        logical = load_problem(problem, ctx.obj['exact'])
        if method == 'exhaustive':
            result = solve_exhaustive(logical, config['enumeration']['max_qubits'], config['enumeration']['workers'])
        else:
            annealing = config['annealing']
            result = solve_sa(logical.to_float(), AnnealSchedule.from_config(config),
                              seed=annealing['seed'] if seed is None else seed, sweeps=sweeps,
                              restarts=restarts or annealing['restarts'])
        emit(ctx, result, output)
    except Exception as e:
        fail(ctx, e)


@cli.command()
@bound_options
@click.option('--grid', required=True, help='Comma separated chain strength magnitudes')
@click.option('--embedding', 'extra_embeddings', multiple=True, help='Additional embedding JSON files')
@click.option('--cap', type=float, default=None, help='Coupling cap lambda for |J| and |F|')
@click.option('--majority', is_flag=True, help='Count majority-vote repaired samples as successes')
@click.option('--samples', type=int, default=None)
@click.option('--seed', type=int, default=None)
@click.option('--output', default=None, help='Write the CSV to this file instead of stdout')
@click.pass_context
def sweep(ctx, instance, dist_path, strategy, grid, extra_embeddings, cap, majority, samples, seed, output):
    """Success probability and TTS across chain strengths (CSV)."""
    try:
        config = ctx.obj['config']
        bundle = load_bundle(instance, ctx.obj['exact'])
        embeddings = [(bundle.embedding, resolve_distribution(ctx, bundle, dist_path, strategy))]
        for path in extra_embeddings:
            emb = MinorEmbedding.from_dict(load_json(path))
            require_valid(bundle.problem, bundle.hardware, emb)
            embeddings.append((emb, distribute_fields(bundle.problem, bundle.hardware, emb,
                                                      strategy or config['bounds']['distribution'])))
        settings = config['sweep']
        result = asyncio.run(sweep_embeddings(
            bundle.problem, bundle.hardware, embeddings, parse_grid(grid),
            schedule=AnnealSchedule.from_config(config),
            samples=samples or settings['samples'],
            seed=config['annealing']['seed'] if seed is None else seed,
            target=settings['target_probability'],
            anneal_time=settings['anneal_time'],
            cap=settings['cap'] if cap is None else cap,
            majority=majority,
        ))
        text = result.to_csv(output)
        if output:
            emit(ctx, result)
        else:
            click.echo(text, nl=False)
        best = result.points[result.best_index()]
        logger.info(f"✅ Minimum TTS {best.tts:g} at F = {best.F:g}")
    except Exception as e:
        fail(ctx, e)


@cli.command('tts')
@click.argument('success_prob', type=float)
@click.option('--target', type=float, default=None, help='Target probability p')
@click.option('--anneal-time', type=float, default=None, help='Anneal time t_a')
@click.pass_context
def tts_command(ctx, success_prob, target, anneal_time):
    """Time to solution t_a log(1 - p) / log(1 - s)."""
    try:
        settings = ctx.obj['config']['sweep']
        target = settings['target_probability'] if target is None else target
        anneal_time = settings['anneal_time'] if anneal_time is None else anneal_time
        value = tts(success_prob, target, anneal_time)
        emit(ctx, {"success_prob": success_prob, "target": target, "anneal_time": anneal_time,
                   "tts": to_json_number(value)})
    except Exception as e:
        fail(ctx, e)


def main():
    cli(obj={})


if __name__ == "__main__":
    main()
