from .classes import ToothClass, NUM_CLASSES, parse_classes
from .patch import PatchImage, PATCH_SIZE, extract_patch, write_pgm, read_pgm
from .embedding import ClassEmbeddingTable, CONDITION_DIM, embed_class, embed_classes, make_condition
from .encoder import PatchEncoder, ConditionEncoder, encode_patch

__all__ = ['classes', 'patch', 'embedding', 'encoder']
