from ..exceptions import InvalidClassError

NUM_CLASSES = 32

INCISOR = 'incisor'
CANINE = 'canine'
PREMOLAR = 'premolar'
MOLAR = 'molar'

# Universal numbering: 1-16 upper jaw from the patient's right third molar,
# 17-32 lower jaw from the left third molar.
_FAMILIES = {}
for _number in (1, 2, 3, 14, 15, 16, 17, 18, 19, 30, 31, 32):
    _FAMILIES[_number] = MOLAR
for _number in (4, 5, 12, 13, 20, 21, 28, 29):
    _FAMILIES[_number] = PREMOLAR
for _number in (6, 11, 22, 27):
    _FAMILIES[_number] = CANINE
for _number in (7, 8, 9, 10, 23, 24, 25, 26):
    _FAMILIES[_number] = INCISOR


class ToothClass:
    """A tooth by universal number 1..32 (segmentation channel 0 is background)."""

    __slots__ = ('index',)

    def __init__(self, index):
        if isinstance(index, ToothClass):
            index = index.index
        if isinstance(index, bool) or int(index) != index or not 1 <= int(index) <= NUM_CLASSES:
            raise InvalidClassError('Tooth class must be an integer in 1..{}, got {!r}'.format(NUM_CLASSES, index))
        self.index = int(index)

    @property
    def family(self):
        return _FAMILIES[self.index]

    @property
    def jaw(self):
        return 'upper' if self.index <= 16 else 'lower'

    def __eq__(self, other):
        return isinstance(other, ToothClass) and other.index == self.index

    def __hash__(self):
        return hash(self.index)

    def __int__(self):
        return self.index

    def __repr__(self):
        return 'ToothClass({})'.format(self.index)


def parse_classes(text):
    """Parse '1-16', '1,3,5' or '1-3,17' into a sorted list of class numbers."""
    numbers = set()
    for part in str(text).split(','):
        part = part.strip()
        if not part:
            continue
        if '-' in part:
            start, end = part.split('-', 1)
            numbers.update(range(int(start), int(end) + 1))
        else:
            numbers.add(int(part))
    return [ToothClass(n).index for n in sorted(numbers)]
