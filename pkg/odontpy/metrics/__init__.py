from .volumetric import volumetric_iou, volumetric_precision
from .surface import (SurfaceSamples, sample_surface, chamfer_l1, normal_consistency, chamfer_l1_brute,
                      normal_consistency_brute)
from .evaluate import EvalConfig, evaluate_reconstruction, summarize, pool_reports, report_table, oracle_mesh, METRICS

__all__ = ['volumetric', 'surface', 'evaluate']
