import logging

from ..model import Reconstructor
from ..tensorfile import read_tensors, write_tensors


def checkpoint_save(reconstructor, path):
    """Write every parameter, running statistic and model setting; returns the CRC-32."""
    crc = write_tensors(path, reconstructor.state_dict())
    logging.info('Checkpoint saved to %s (crc %08x)', path, crc)
    return crc


def checkpoint_load(path):
    """Rebuild a Reconstructor from an OCDT checkpoint alone."""
    reconstructor = Reconstructor.from_state_dict(read_tensors(path))
    logging.info('Checkpoint loaded from %s (%s conditioning, class embedding %s)', path,
                 reconstructor.conditioning_mode, 'on' if reconstructor.use_class_embedding else 'off')
    return reconstructor
