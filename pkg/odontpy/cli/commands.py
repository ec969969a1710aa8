import argparse
import json
import logging
import os
import sys
from dataclasses import fields
from typing import List, Optional

import numpy as np
import pandas as pd

from ..assembly import ArchCurve, assemble_jaws, reconstruct_scene
from ..conditioning import PatchImage, ToothClass, read_pgm
from ..exceptions import CheckpointError, ConfigError, DatasetError, NumericError, OdontError
from ..meshing import eval_grid, export_mesh, extract_mesh
from ..metrics import METRICS, evaluate_reconstruction, oracle_mesh, pool_reports, report_table, summarize
from ..model import CBN, CX, Reconstructor, fit
from ..synth import (ToothShapeOracle, dataset_build, generate_tooth, load_dataset, single_shape_dataset,
                     synthesize_scene, tooth_patch)
from ..conditioning.patch import write_pgm
from ..tensorfile import read_tensors
from .checkpoint import checkpoint_load, checkpoint_save
from .config import RunConfig, load_config

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_IO = 2
EXIT_NUMERIC = 3

ABLATION_VARIANTS = (
    ('CBN Only', CBN, False),
    ('CX Only', CX, False),
    ('CBN+Tooth Class', CBN, True),
    ('CX+Tooth Class', CX, True),
)

_HELP = {
    'dataset_dir': 'Dataset directory written by synth and read by train, eval and ablate.',
    'checkpoint': 'OCDT checkpoint written by train and read by reconstruct, eval and assemble.',
    'output': 'Output path of the command (dataset dir, OBJ, JSON or CSV); a per-command default otherwise.',
    'classes': "Tooth classes for synth, e.g. '1-16' or '1,3,17-19'.",
    'conditioning': 'One of cx, cbn, none.',
    'patch': 'PGM or OCDT patch for reconstruct; the synthetic tooth of --tooth_class/--seed if omitted.',
    'ablation_seeds': "Comma-separated seeds of the ablation runs, e.g. '0,1,2'.",
    'overfit_one': 'Train on one in-memory synthetic tooth (tooth_class, seed) with a 2000-step budget.',
    'ground_truth': 'Assemble oracle meshes instead of reconstructions.',
    'surface_fraction': 'Share of the synth points drawn near the tooth surface; 0 keeps them uniform.',
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def parse_args(argv=None):
    desc = "Conditional implicit tooth reconstruction from synthetic panoramic patches"
    common = _Parser(add_help=False)
    common.add_argument('--config', type=str, default=None, help='Flat key = value file; flags override it.')
    common.add_argument('--verbose', action='store_true', help='Log at DEBUG level.')
    for f in fields(RunConfig):
        names = ['--' + f.name]
        if '_' in f.name:
            names.append('--' + f.name.replace('_', '-'))
        if f.type is bool and f.default is False:
            common.add_argument(*names, dest=f.name, action='store_const', const='true', default=argparse.SUPPRESS,
                                help=_HELP.get(f.name, 'Default false.'))
        else:
            common.add_argument(*names, dest=f.name, type=str, default=argparse.SUPPRESS,
                                help=_HELP.get(f.name, 'Default {}.'.format(f.default)))

    parser = _Parser(description=desc)
    commands = parser.add_subparsers(dest='command')
    commands.required = True
    for name, text in (('synth', 'Build the synthetic tooth dataset.'),
                       ('train', 'Train a reconstructor and save the best checkpoint.'),
                       ('reconstruct', 'Reconstruct one tooth mesh from a class and a patch.'),
                       ('eval', 'Evaluate a checkpoint on the test split.'),
                       ('ablate', 'Train and evaluate the four conditioning variants.'),
                       ('assemble', 'Reconstruct a synthetic scene and assemble both jaws.')):
        commands.add_parser(name, parents=[common], help=text, description=text)
    return check_args(parser.parse_args(argv))


def check_args(args):
    reserved = ('command', 'config', 'verbose')
    overrides = {k: v for k, v in vars(args).items() if k not in reserved}
    args.run_config = load_config(args.config, overrides)
    return args


def _output(config, default):
    return config.output or default


def _build_reconstructor(config, seed, conditioning=None, use_class_embedding=None):
    return Reconstructor(conditioning_mode=conditioning or config.conditioning,
                         use_class_embedding=config.use_class_embedding if use_class_embedding is None
                         else use_class_embedding,
                         alpha=config.alpha, n_blocks=config.n_blocks, hidden=config.hidden, seed=seed)


def _load_patch(config):
    if config.patch is None:
        _, oracle = generate_tooth(config.tooth_class, config.seed)
        logging.info('No patch given, rendering synthetic class %d tooth with seed %d', config.tooth_class, config.seed)
        return tooth_patch(oracle)
    if config.patch.lower().endswith('.ocdt'):
        tensors = read_tensors(config.patch)
        if 'patch' not in tensors:
            raise DatasetError('{} holds no patch tensor'.format(config.patch))
        return PatchImage(tensors['patch'])
    return PatchImage(read_pgm(config.patch))


def _write_json(path, payload):
    with open(path, 'w') as f:
        f.write(json.dumps(payload, indent=2, sort_keys=True) + '\n')


def cmd_synth(config):
    output = _output(config, config.dataset_dir)
    dataset = dataset_build(output, n_per_class=config.n_per_class, classes=config.class_list,
                            seed=config.seed, num_points=config.num_points,
                            surface_fraction=config.surface_fraction)
    logging.info('Manifest lists %d samples', len(dataset))
    return EXIT_OK


def cmd_train(config):
    if config.overfit_one:
        dataset = single_shape_dataset(config.tooth_class, config.seed, config.num_points)
        train_config = config.train_config(batch_size=1, epoch_steps=100, max_epochs=20, patience=20, max_steps=2000)
    else:
        dataset = load_dataset(config.dataset_dir)
        train_config = config.train_config()
    reconstructor = _build_reconstructor(config, config.seed)
    reconstructor, history = fit(reconstructor, dataset, train_config)
    checkpoint_save(reconstructor, config.checkpoint)
    history_path = _output(config, os.path.splitext(config.checkpoint)[0] + '_history.csv')
    history.to_csv(history_path, index=False)
    logging.info('Loss history written to %s', history_path)
    return EXIT_OK


def cmd_reconstruct(config):
    reconstructor = checkpoint_load(config.checkpoint)
    patch = _load_patch(config)
    c = reconstructor.condition(config.tooth_class, patch)
    mesh = extract_mesh(eval_grid(reconstructor, c, config.resolution), config.iso)
    if mesh.is_empty:
        logging.warning('Empty mesh at iso %.3f, writing an empty OBJ', config.iso)
    export_mesh(mesh, _output(config, 'tooth_{:02d}.obj'.format(ToothClass(config.tooth_class).index)))
    return EXIT_OK


def _evaluate_split(reconstructor, samples, eval_config):
    reports = {}
    for n, sample in enumerate(samples, start=1):
        logging.info('Evaluating %s (%d/%d)', sample.sample_id, n, len(samples))
        _, oracle = sample.generate()
        c = reconstructor.condition(sample.tooth_class, sample.patch)
        reports[sample.sample_id] = evaluate_reconstruction(reconstructor, c, oracle, eval_config)
    return reports


def cmd_eval(config):
    reconstructor = checkpoint_load(config.checkpoint)
    dataset = load_dataset(config.dataset_dir)
    samples = dataset.test
    if not samples:
        raise DatasetError('Dataset at {} has no test split'.format(config.dataset_dir))
    logging.info('---- Begin Evaluation of %d test shapes ----', len(samples))
    reports = _evaluate_split(reconstructor, samples, config.eval_config())
    output = _output(config, 'metrics.json')
    _write_json(output, {'checkpoint': config.checkpoint, 'per_tooth': reports,
                         'pooled': pool_reports(list(reports.values()))})
    report_table(list(reports.values()), list(reports)).to_csv(os.path.splitext(output)[0] + '.csv', index=False)
    logging.info('---- Evaluation Written to %s ----', output)
    return EXIT_OK


def ablation_table(results):
    """Fixed-order table: one row per variant, mean±std over seeds of the pooled test means."""
    rows = []
    for name, _, _ in ABLATION_VARIANTS:
        row = {'variant': name}
        for metric in METRICS:
            values = [r[metric]['mean'] for r in results[name] if metric in r]
            row[metric] = summarize(values, range(len(values)))['formatted'] if values else 'failed'
        ious = [r['iou']['mean'] for r in results[name] if 'iou' in r]
        row['median_iou'] = float(np.median(ious)) if ious else float('nan')
        rows.append(row)
    return pd.DataFrame(rows, columns=['variant'] + list(METRICS) + ['median_iou'])


def cmd_ablate(config):
    dataset = load_dataset(config.dataset_dir)
    samples = dataset.test or dataset.val
    if not samples:
        raise DatasetError('Dataset at {} has no test or validation shapes'.format(config.dataset_dir))
    eval_config = config.eval_config()
    results = {name: [] for name, _, _ in ABLATION_VARIANTS}
    for seed in config.ablation_seed_list:
        for name, mode, use_class in ABLATION_VARIANTS:
            logging.info('---- Ablation %s, seed %d ----', name, seed)
            reconstructor = _build_reconstructor(config, seed, mode, use_class)
            train_config = config.train_config(max_epochs=config.ablation_epochs, rng_seed=seed)
            reconstructor, _ = fit(reconstructor, dataset, train_config)
            pooled = pool_reports(list(_evaluate_split(reconstructor, samples, eval_config).values()))
            results[name].append(pooled)
    table = ablation_table(results)
    output = _output(config, 'ablation.csv')
    table.to_csv(output, index=False)
    with open(os.path.splitext(output)[0] + '.txt', 'w') as f:
        f.write(table.to_string(index=False) + '\n')
    logging.info('Ablation table:\n%s', table.to_string(index=False))
    return EXIT_OK


def cmd_assemble(config):
    specs, px_image, seg_map = synthesize_scene(range(1, 33), config.scene_seed)
    output = _output(config, 'jaw.obj')
    write_pgm(os.path.splitext(output)[0] + '_scene.pgm', px_image)
    if config.ground_truth:
        meshes = {spec.tooth_class: oracle_mesh(ToothShapeOracle(spec), config.resolution, config.iso)[1]
                  for spec in specs}
    else:
        reconstructor = checkpoint_load(config.checkpoint)
        meshes = reconstruct_scene(reconstructor, px_image, seg_map, classes=range(1, 33),
                                   resolution=config.resolution, iso=config.iso)
    curve = ArchCurve(config.arch_width, config.arch_depth, config.arch_exponent)
    export_mesh(assemble_jaws(meshes, curve, config.jaw_offset), output)
    return EXIT_OK


COMMANDS = {
    'synth': cmd_synth,
    'train': cmd_train,
    'reconstruct': cmd_reconstruct,
    'eval': cmd_eval,
    'ablate': cmd_ablate,
    'assemble': cmd_assemble,
}


def run(command: str, config: Optional[RunConfig] = None, **overrides):
    """Run one command programmatically; keyword overrides take RunConfig keys."""
    config = (config or RunConfig()).with_values(overrides).validate()
    if command not in COMMANDS:
        raise ConfigError('Unknown command {!r}'.format(command))
    return COMMANDS[command](config)


def main(argv: Optional[List[str]] = None):
    argv = sys.argv[1:] if argv is None else argv
    logging.basicConfig(level=logging.DEBUG if '--verbose' in argv else logging.INFO,
                        format='%(asctime)s %(levelname)s %(message)s')
    try:
        args = parse_args(argv)
        logging.info('---- Begin %s ----', args.command)
        code = COMMANDS[args.command](args.run_config)
        logging.info('---- %s Finished ----', args.command)
        return code
    except ConfigError as e:
        logging.error('Configuration error: %s', e)
        return EXIT_CONFIG
    except NumericError as e:
        logging.error('Numeric failure: %s', e)
        return EXIT_NUMERIC
    except (OSError, CheckpointError, DatasetError) as e:
        logging.error('%s: %s', type(e).__name__, e)
        return EXIT_IO
    except OdontError as e:
        logging.error('%s: %s', type(e).__name__, e)
        return EXIT_IO


if __name__ == '__main__':
    sys.exit(main())
