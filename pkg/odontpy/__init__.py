from . import numerics
from . import conditioning
from . import model
from . import synth
from . import meshing
from . import metrics
from . import assembly
from . import cli

__all__ = ['numerics', 'conditioning', 'model', 'synth', 'meshing', 'metrics', 'assembly', 'cli']
