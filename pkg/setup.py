from setuptools import setup, find_packages
from multiprocessing import freeze_support
import os
import sys
import unittest

try:
    from setuptools.command.test import test
except ImportError:
    # removed in newer setuptools; 'python -m unittest discover test' still works
    test = None


def discover_and_run_tests():
    # get setup.py directory
    setup_file = sys.modules['__main__'].__file__
    setup_dir = os.path.abspath(os.path.dirname(setup_file))

    # use the default shared TestLoader instance
    test_loader = unittest.defaultTestLoader

    # use the basic test runner that outputs to sys.stderr
    test_runner = unittest.TextTestRunner()

    # automatically discover all tests
    test_suite = test_loader.discover(os.path.join(setup_dir, "test"), pattern='test_*.py')

    # run the test suite
    test_runner.run(test_suite)


commands = {}
if test is not None:
    class DiscoverTest(test):
        def finalize_options(self):
            test.finalize_options(self)
            self.test_args = []
            self.test_suite = True

        def run_tests(self):
            discover_and_run_tests()

    commands['test'] = DiscoverTest


if __name__ == "__main__":
    freeze_support()
    assert sys.version_info >= (3, 8), "Minimum Python >= 3.8 is required!"
    setup(
        name = "odontpy",
        version = "0.1.0",
        keywords = ("Implicit Occupancy", "Tooth Reconstruction", "Panoramic Radiograph", "Marching Cubes"),
        description = "Conditional implicit occupancy networks for 3D tooth reconstruction from panoramic patches.",
        long_description = "Trains a conditional occupancy network on synthetic teeth, reconstructs tooth meshes "
                           "from a class label and a panoramic-radiograph patch, scores them and assembles jaws.",
        license = "MIT Licence",

        packages = find_packages(exclude=['test', 'example']),
        include_package_data = True,
        platforms = "any",
        install_requires = [
            "xarray >= 0.10.0",
            "scipy >= 1.4.0",
            "numpy >= 1.20.0",
            "pandas >= 0.20.0",
            "trimesh >= 4.0.0",
            ],

        scripts = [],
        cmdclass = commands,
        entry_points = {
            'console_scripts': [
                'odontpy = odontpy.cli.commands:main'
            ]
        }
    )
