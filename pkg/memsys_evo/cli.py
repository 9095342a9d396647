"""
Command line interface.

Exit codes: 0 success, 1 invalid input, 2 estimator backend failure,
3 exhaustive search over capacity.
"""
from memsys_evo import __version__
from memsys_evo.baseline import (DEFAULT_COMBO_CAP, enumerate_candidates,
                                 exhaustive_front, front_parameterizations,
                                 instance_choice, instance_fronts)
from memsys_evo.catalog import (MemoryRequirement, catalog_to_dict,
                                dump_json, load_catalog, load_system,
                                system_to_dict)
from memsys_evo.engine import DeConfig, run_optimization
from memsys_evo.errors import (CapacityExceeded, CatalogError, EstimatorError,
                               InfeasibleParameterization,
                               PreconditionViolation, ValidationError)
from memsys_evo.estimator import (DEFAULT_TIMEOUT, ExecBackend,
                                  SurrogateBackend, surrogate_matrix,
                                  worker_count)
from memsys_evo.genome import build_layout
from memsys_evo.metrics import (deviation_report, front_stats,
                                report_header, report_markdown, report_rows)
from memsys_evo.output_file import (read_front, write_atomic, write_front,
                                    write_manifest, write_run)
from memsys_evo.plot import label_for, plot_fronts
from memsys_evo.service import EstimatorService
from memsys_evo.synthetic import generate_synthetic_system

import argparse
from concurrent.futures import ThreadPoolExecutor
from contextlib import closing
import csv
from datetime import datetime, timezone
import io
import itertools
import json
import logging
import os
import sys

import numpy as np


logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_BACKEND = 2
EXIT_CAPACITY = 3


def open_backend(catalog, spec, timeout=DEFAULT_TIMEOUT):
    """
    Creates the estimator backend named by a --backend value.

    Args:
        catalog (Catalog): The design space.
        spec (str): 'surrogate', 'exec:COMMAND', or an http(s) URL.
        timeout (float): Seconds to wait for an external estimator.

    Raises:
        PreconditionViolation: The backend value is not recognized.
    """
    if spec == 'surrogate':
        return SurrogateBackend(catalog)
    if spec.startswith('exec:'):
        return ExecBackend(catalog, spec[len('exec:'):], timeout)
    if spec.startswith('http://') or spec.startswith('https://'):
        return EstimatorService(catalog, spec, timeout)
    raise PreconditionViolation(
            'Unknown backend {!r}; use surrogate, exec:COMMAND or a URL'
            .format(spec))


def _now():
    return datetime.now(timezone.utc).isoformat()


def _manifest(args, started, **extra):
    manifest = {
        'command': args.command,
        'argv': list(args.argv),
        'started': started,
        'finished': _now(),
        'version': __version__,
        }
    for key in ('catalog', 'system', 'out', 'backend', 'timeout', 'cap',
                'baseline'):
        if getattr(args, key, None) is not None:
            manifest[key] = getattr(args, key)
    manifest.update(extra)
    return manifest


def _load_inputs(args):
    catalog = load_catalog(args.catalog)
    system = load_system(args.system)
    build_layout(catalog, system)
    return catalog, system


def _run_repeats(catalog, system, configs, backend):
    """Runs one optimization per config, in parallel if configured, and
    returns the results in config order."""
    workers = worker_count()
    if workers > 1 and len(configs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(
                lambda cfg: run_optimization(catalog, system, cfg, backend,
                                             workers=1), configs))
    return [run_optimization(catalog, system, cfg, backend)
            for cfg in configs]


def cmd_optimize(args):
    started = _now()
    catalog, system = _load_inputs(args)
    if args.repeats < 1:
        raise PreconditionViolation('--repeats must be at least 1')
    configs = [DeConfig(pop_size=args.pop, generations=args.gens, f=args.f,
                        cr=args.cr, seed=args.seed + k)
               for k in range(args.repeats)]
    with closing(open_backend(catalog, args.backend, args.timeout)) as be:
        results = _run_repeats(catalog, system, configs, be)

    for k, result in enumerate(results):
        write_run(os.path.join(args.out, 'rep{}'.format(k)), result)
        logger.info('Repetition %d (seed %d): %d front members', k,
                    result.config.seed, len(result.final_front))
    write_manifest(args.out, _manifest(
        args, started, config=configs[0].to_dict(), repeats=args.repeats,
        seeds=[cfg.seed for cfg in configs],
        evaluations=[{'new': r.evaluations_used, 'pool': r.pool_evaluations,
                      'wall_time': r.wall_time} for r in results]))
    return EXIT_OK


def cmd_exhaustive(args):
    started = _now()
    catalog, system = _load_inputs(args)
    with closing(open_backend(catalog, args.backend, args.timeout)) as be:
        table = enumerate_candidates(catalog, system, be)
    front = exhaustive_front(table, args.cap)
    write_front(args.out, catalog.objectives,
                front_parameterizations(table, front))
    logger.info('Global front has %d members', len(front))
    write_manifest(args.out, _manifest(args, started,
                                       candidates=table.sizes))
    return EXIT_OK


def cmd_instance(args):
    started = _now()
    catalog, system = _load_inputs(args)
    with closing(open_backend(catalog, args.backend, args.timeout)) as be:
        table = enumerate_candidates(catalog, system, be)
    for mem, front in zip(system.memories, instance_fronts(table)):
        logger.info('Memory %s: %d Pareto-optimal candidates', mem.id,
                    len(front))
    indices, total = instance_choice(table)
    front = front_parameterizations(table, [(indices, total)])
    write_front(args.out, catalog.objectives, front, name='instance')
    write_manifest(args.out, _manifest(args, started,
                                       candidates=table.sizes))
    return EXIT_OK


def _read_fronts(paths):
    fronts = []
    for path in paths:
        if not os.path.exists(path):
            raise FileNotFoundError(path)
        fronts.append(read_front(path))
    names = {objectives for objectives, _ in fronts}
    if len(names) > 1:
        raise ValidationError('Front files disagree on objectives: {}'.format(
            sorted(names)))
    return fronts


def cmd_compare(args):
    started = _now()
    fronts = _read_fronts([args.baseline] + args.fronts)
    objectives, base = fronts[0]
    report = deviation_report([values for _, values in fronts[1:]], base,
                              objectives)
    out = io.StringIO()
    writer = csv.writer(out, lineterminator='\n')
    writer.writerow(report_header(report))
    writer.writerows(report_rows(report))
    write_atomic(os.path.join(args.out, 'deviation.csv'), out.getvalue())
    markdown = report_markdown(report)
    write_atomic(os.path.join(args.out, 'deviation.md'), markdown)
    sys.stdout.write(markdown)
    write_manifest(args.out, _manifest(args, started, fronts=args.fronts))
    return EXIT_OK


def _grid(text, default, kind, flag):
    if text is None:
        return [default]
    try:
        values = [kind(v) for v in text.split(',') if v.strip()]
    except ValueError as e:
        raise PreconditionViolation('{}: {}'.format(flag, e))
    if not values:
        raise PreconditionViolation('{} is empty'.format(flag))
    return values


def cmd_sweep(args):
    started = _now()
    catalog, system = _load_inputs(args)
    grids = [_grid(args.f_grid, args.f, float, '--f-grid'),
             _grid(args.cr_grid, args.cr, float, '--cr-grid'),
             _grid(args.pop_grid, args.pop, int, '--pop-grid'),
             _grid(args.gens_grid, args.gens, int, '--gens-grid')]
    if args.repeats < 1:
        raise PreconditionViolation('--repeats must be at least 1')
    cells = list(itertools.product(*grids))
    configs = [DeConfig(pop_size=pop, generations=gens, f=f, cr=cr,
                        seed=args.seed + k)
               for f, cr, pop, gens in cells for k in range(args.repeats)]
    logger.info('Sweeping %d configurations, %d runs', len(cells),
                len(configs))
    with closing(open_backend(catalog, args.backend, args.timeout)) as be:
        results = _run_repeats(catalog, system, configs, be)

    out = io.StringIO()
    writer = csv.writer(out, lineterminator='\n')
    header = ['f', 'cr', 'pop', 'gens']
    for obj in catalog.objectives:
        header += ['{}_min'.format(obj), '{}_mean'.format(obj),
                   '{}_max'.format(obj)]
    writer.writerow(header)
    for c, cell in enumerate(cells):
        runs = results[c * args.repeats:(c + 1) * args.repeats]
        stats = [front_stats(np.array([v for _, v in r.final_front]))
                 for r in runs]
        row = [repr(v) for v in cell]
        for m in range(len(catalog.objectives)):
            for stat in ('min', 'mean', 'max'):
                row.append(repr(float(np.mean([s[stat][m] for s in stats]))))
        writer.writerow(row)
    write_atomic(os.path.join(args.out, 'sweep.csv'), out.getvalue())
    write_manifest(args.out, _manifest(args, started, repeats=args.repeats,
                                       seed=args.seed))
    return EXIT_OK


def cmd_plot(args):
    paths = args.fronts + ([args.baseline] if args.baseline else [])
    fronts = _read_fronts(paths)
    objectives = fronts[0][0]
    if len(objectives) < 2:
        raise ValidationError('Plotting needs at least two objectives')
    series = [(label_for(path), values)
              for path, (_, values) in zip(args.fronts, fronts)]
    baseline = None
    if args.baseline:
        baseline = ('baseline', fronts[-1][1])
    plot_fronts(series, objectives, args.out, baseline=baseline)
    return EXIT_OK


def cmd_generate(args):
    catalog, system = generate_synthetic_system(args.seed, args.memories,
                                                args.compilers, args.target)
    write_atomic(os.path.join(args.out, 'catalog.json'),
                 dump_json(catalog_to_dict(catalog)))
    write_atomic(os.path.join(args.out, 'system.json'),
                 dump_json(system_to_dict(system)))
    return EXIT_OK


def serve(catalog, stdin, stdout):
    """
    Answers estimator line-protocol requests with the surrogate model
    until stdin is closed.
    """
    for line in stdin:
        if not line.strip():
            continue
        request = json.loads(line)
        comp = catalog.compiler(request['compiler'])
        columns = [catalog.objectives.index(obj)
                   for obj in request['objectives']]
        mems = [MemoryRequirement(id=str(k), words=item['words'],
                                  bits=item['bits'], ports=comp.ports,
                                  kind=comp.kind)
                for k, item in enumerate(request['items'])]
        codes = [item['codes'] for item in request['items']]
        if mems:
            values = surrogate_matrix(catalog, comp, mems, codes)[:, columns]
        else:
            values = np.zeros((0, len(columns)))
        stdout.write(json.dumps({'batch_id': request['batch_id'],
                                 'ppa': values.tolist()}) + '\n')
        stdout.flush()


def cmd_serve(args):
    catalog = load_catalog(args.catalog)
    try:
        serve(catalog, sys.stdin, sys.stdout)
    except (KeyError, ValueError) as e:
        raise ValidationError('Bad estimator request: {}'.format(e))
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
            prog='memsys-evo',
            description='System-level multi-objective optimization of'
                        ' embedded memory compiler parameters.')
    parser.add_argument('--version', action='version', version=__version__)
    parser.add_argument('-v', '--verbose', action='count', default=0,
                        help='More log output; repeat for debug output.')
    sub = parser.add_subparsers(dest='command')
    sub.required = True

    inputs = argparse.ArgumentParser(add_help=False)
    inputs.add_argument('--catalog', required=True,
                        help='Catalog of memory compilers (JSON).')
    inputs.add_argument('--system', required=True,
                        help='Memories of the system (JSON).')

    out = argparse.ArgumentParser(add_help=False)
    out.add_argument('--out', required=True, help='Output directory.')

    backend = argparse.ArgumentParser(add_help=False)
    backend.add_argument('--backend', default='surrogate',
                         help='surrogate, "exec:COMMAND" or an http(s) URL.')
    backend.add_argument('--timeout', type=float, default=DEFAULT_TIMEOUT,
                         help='Seconds to wait for each estimator batch.')

    de = argparse.ArgumentParser(add_help=False)
    de.add_argument('--pop', type=int, default=20, help='Population size.')
    de.add_argument('--gens', type=int, default=50,
                    help='Number of generations.')
    de.add_argument('--cr', type=float, default=0.9,
                    help='Crossover probability.')
    de.add_argument('--f', type=float, default=0.8,
                    help='Differential weight.')
    de.add_argument('--seed', type=int, default=0,
                    help='Seed of the first repetition.')
    de.add_argument('--repeats', type=int, default=3,
                    help='Repetitions, with seeds seed, seed+1, ...')

    p = sub.add_parser('optimize', parents=[inputs, out, backend, de],
                       help='Run differential evolution.')
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser('exhaustive', parents=[inputs, out, backend],
                       help='Find the global front by exhaustive search.')
    p.add_argument('--cap', type=int, default=DEFAULT_COMBO_CAP,
                   help='Most system combinations to enumerate.')
    p.set_defaults(func=cmd_exhaustive)

    p = sub.add_parser('instance', parents=[inputs, out, backend],
                       help='Optimize each memory alone and combine the'
                            ' balanced choices.')
    p.set_defaults(func=cmd_instance)

    p = sub.add_parser('compare', parents=[out],
                       help='Deviation of found fronts from a baseline.')
    p.add_argument('--baseline', required=True, help='Global front file.')
    p.add_argument('fronts', nargs='+', help='Found front per repetition.')
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser('sweep', parents=[inputs, out, backend, de],
                       help='Run a grid of hyperparameters.')
    p.add_argument('--f-grid', help='Comma-separated values of F.')
    p.add_argument('--cr-grid', help='Comma-separated values of CR.')
    p.add_argument('--pop-grid', help='Comma-separated population sizes.')
    p.add_argument('--gens-grid', help='Comma-separated generation counts.')
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser('plot', help='Plot fronts as SVG.')
    p.add_argument('--out', required=True, help='SVG file to write.')
    p.add_argument('--baseline', help='Global front to normalize by.')
    p.add_argument('fronts', nargs='+', help='Front files.')
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser('generate', parents=[out],
                       help='Write a synthetic catalog and system.')
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--memories', type=int, default=4)
    p.add_argument('--compilers', type=int, default=3)
    p.add_argument('--target', type=int, default=200,
                   help='Candidates per memory to aim for.')
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser('serve',
                       help='Serve the surrogate on stdin/stdout as an'
                            ' external estimator.')
    p.add_argument('--catalog', required=True)
    p.set_defaults(func=cmd_serve)
    return parser


def _configure_logging(verbosity):
    pkg_logger = logging.getLogger('memsys_evo')
    for old in [h for h in pkg_logger.handlers
                if getattr(h, '_memsys_evo', False)]:
        pkg_logger.removeHandler(old)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(
        '%(levelname)s %(name)s: %(message)s'))
    handler._memsys_evo = True
    pkg_logger.addHandler(handler)
    pkg_logger.setLevel(
            [logging.WARNING, logging.INFO, logging.DEBUG][min(verbosity, 2)])


def main(argv=None):
    """
    Runs a command.

    Args:
        argv ([str]): Command line arguments, without the program name.

    Returns:
        int: The exit code.
    """
    if argv is None:
        argv = sys.argv[1:]
    args = build_parser().parse_args(argv)
    args.argv = argv
    _configure_logging(args.verbose)
    try:
        return args.func(args)
    except FileNotFoundError as e:
        logger.error('File not found: %s', e.filename or e)
        return EXIT_INPUT
    except (CatalogError, PreconditionViolation,
            InfeasibleParameterization) as e:
        logger.error('%s', e)
        return EXIT_INPUT
    except EstimatorError as e:
        logger.error('Estimator failed: %s', e)
        return EXIT_BACKEND
    except CapacityExceeded as e:
        logger.error('%s', e)
        return EXIT_CAPACITY


if __name__ == '__main__':
    sys.exit(main())
