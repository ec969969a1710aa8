import os
import logging
import odontpy
from odontpy.model import Reconstructor, TrainConfig, fit
from odontpy.meshing import eval_grid, extract_mesh, export_mesh
from odontpy.metrics import EvalConfig, evaluate_reconstruction, pool_reports, report_table

if __name__ == '__main__':
    logging.basicConfig(level=logging.INFO, format='%(asctime)s %(levelname)s %(message)s')

    # where the dataset, checkpoint and meshes go. It is best to use the os.path.join function
    output_dir = os.path.join(os.getcwd(), 'odontpy_example')
    dataset_dir = os.path.join(output_dir, 'dataset')

    # classes are numbered 1..16 in the upper jaw and 17..32 in the lower jaw
    # 1-3 are the upper right molars; 60 shapes split 46/3/11 into train/val/test
    dataset = odontpy.synth.dataset_build(dataset_dir, n_per_class=20, classes=[1, 2, 3], seed=0, num_points=20000)

    # CX conditioning with the class embedding is the strongest of the four variants
    # a smaller network keeps this example within a few minutes on a laptop
    reconstructor = Reconstructor(conditioning_mode='cx', use_class_embedding=True, n_blocks=3, hidden=64, seed=0)

    # stop after 40 epochs or 5 epochs without a better validation accuracy
    train_config = TrainConfig(learning_rate=1e-3, batch_size=4, points_per_step=1024, max_epochs=40, patience=5)
    reconstructor, history = fit(reconstructor, dataset, train_config)
    history.to_csv(os.path.join(output_dir, 'history.csv'), index=False)
    odontpy.cli.checkpoint_save(reconstructor, os.path.join(output_dir, 'model.ocdt'))

    # reconstruct every test tooth, write its mesh and score it against the generator it came from
    eval_config = EvalConfig(resolution=64, repetitions=3, surface_samples=20000)
    reports = {}
    for sample in dataset.test:
        c = reconstructor.condition(sample.tooth_class, sample.patch)
        mesh = extract_mesh(eval_grid(reconstructor, c, eval_config.resolution), eval_config.iso)
        export_mesh(mesh, os.path.join(output_dir, sample.sample_id + '.obj'))
        _, oracle = sample.generate()
        reports[sample.sample_id] = evaluate_reconstruction(reconstructor, c, oracle, eval_config)

    # per-tooth table and the pooled means over the test split
    table = report_table(list(reports.values()), list(reports))
    print(table.to_string())
    pooled = pool_reports(list(reports.values()))
    for metric, summary in pooled.items():
        if isinstance(summary, dict) and 'formatted' in summary:
            print('{:>20s}: {}'.format(metric, summary['formatted']))
