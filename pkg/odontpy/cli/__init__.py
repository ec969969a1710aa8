from .config import RunConfig, load_config, read_config_file
from .checkpoint import checkpoint_save, checkpoint_load
from .commands import run, main

__all__ = ['config', 'checkpoint', 'commands']
