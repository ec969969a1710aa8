import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd

from ..meshing import ScalarGrid, eval_grid, extract_mesh, rasterize_grid
from ..synth import voxelize
from .surface import chamfer_l1, normal_consistency, sample_surface
from .volumetric import volumetric_iou, volumetric_precision

METRICS = ('iou', 'chamfer_l1', 'normal_consistency', 'precision')


@dataclass
class EvalConfig:
    resolution: int = 128
    iso: float = 0.5
    repetitions: int = 10
    surface_samples: int = 100000
    seed: int = 0


def summarize(values, seeds):
    """{mean, std, runs, seeds, values, formatted} of one metric over repetitions."""
    values = [float(v) for v in values]
    mean = float(np.mean(values)) if values else float('nan')
    std = float(np.std(values)) if values else float('nan')
    return {'mean': mean, 'std': std, 'runs': len(values), 'seeds': list(seeds), 'values': values,
            'formatted': '{:.3f}±{:.3f}'.format(mean, std)}


def oracle_mesh(oracle, resolution=128, iso=0.5):
    """Ground-truth surface: marching cubes on the padded oracle voxelization."""
    grid = voxelize(oracle, (resolution,) * 3)
    return grid, extract_mesh(ScalarGrid(grid.values.astype(np.float64), grid.coords), iso)


def evaluate_reconstruction(model, c, oracle, config=None):
    """Score one reconstruction against its oracle.

    The prediction is evaluated on a resolution^3 lattice, rasterised at iso
    for the volumetric metrics and meshed for the surface metrics. Chamfer-L1
    and normal consistency are repeated with surface-sampling seeds
    seed, seed + 1, ...; within a repetition both meshes are sampled with
    the same seed. The volumetric metrics do not depend on the seed.
    An empty predicted mesh yields a report with failed=True.
    """
    config = config or EvalConfig()
    seeds = [config.seed + r for r in range(config.repetitions)]
    grid = eval_grid(model, c, config.resolution)
    predicted = rasterize_grid(grid, config.iso)
    mesh = extract_mesh(grid, config.iso)
    truth, truth_mesh = oracle_mesh(oracle, config.resolution, config.iso)
    report = {'resolution': config.resolution, 'iso': config.iso, 'vertices': len(mesh.vertices),
              'faces': len(mesh.faces), 'failed': mesh.is_empty or predicted.occupied() == 0}
    if report['failed']:
        logging.warning('Reconstruction failed: empty mesh at iso %.3f', config.iso)
        return report

    iou = volumetric_iou(predicted, truth)
    precision = volumetric_precision(predicted, truth)
    chamfers, consistencies = [], []
    for seed in seeds:
        p = sample_surface(mesh, config.surface_samples, seed=seed, mesh_id='prediction')
        q = sample_surface(truth_mesh, config.surface_samples, seed=seed, mesh_id='ground truth')
        chamfers.append(chamfer_l1(p, q))
        consistencies.append(normal_consistency(p, q))
    report['iou'] = summarize([iou] * len(seeds), seeds)
    report['precision'] = summarize([precision] * len(seeds), seeds)
    report['chamfer_l1'] = summarize(chamfers, seeds)
    report['normal_consistency'] = summarize(consistencies, seeds)
    logging.info('IoU %s, Chamfer-L1 %s, NC %s, precision %s', report['iou']['formatted'],
                 report['chamfer_l1']['formatted'], report['normal_consistency']['formatted'],
                 report['precision']['formatted'])
    return report


def pool_reports(reports):
    """Pool per-tooth reports: each repetition averages the teeth, then mean/std over repetitions.

    Failed teeth are left out and counted under 'failures'.
    """
    scored = [r for r in reports if not r['failed']]
    pooled = {'teeth': len(reports), 'failures': len(reports) - len(scored), 'pooling': 'per-tooth'}
    if not scored:
        return pooled
    seeds = scored[0]['iou']['seeds']
    for metric in METRICS:
        per_run = np.mean([r[metric]['values'] for r in scored], axis=0)
        pooled[metric] = summarize(per_run, seeds)
    return pooled


def report_table(reports, index):
    """One row per tooth with the mean of every metric (NaN for failures)."""
    rows = []
    for name, report in zip(index, reports):
        row = {'tooth': name, 'failed': report['failed']}
        for metric in METRICS:
            row[metric] = report[metric]['mean'] if metric in report else float('nan')
        rows.append(row)
    return pd.DataFrame(rows, columns=['tooth', 'failed'] + list(METRICS))
