from .arch import ArchCurve, JawLayout, arch_point, layout_slots
from .jaw import place_teeth, assemble_jaws, reconstruct_scene, jaw_slot, UPPER, LOWER

__all__ = ['arch', 'jaw']
