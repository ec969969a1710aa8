"""Named-tensor container shared by checkpoints, dataset samples and grids.

Layout, all integers little-endian::

    b'OCDT' | u32 version | u32 count | u64 total length | u32 crc32 of the preceding header bytes
    count x ( u32 name_len | name utf-8 | u32 rank | rank x u64 dim | f32 data )
    u32 crc32 of every preceding byte

Values are stored as 32-bit floats and come back as float64.
"""
import logging
import os
import struct
import zlib

import numpy as np

from .exceptions import (CheckpointCRCError, CheckpointFormatError, CheckpointTruncatedError,
                         CheckpointVersionError)

MAGIC = b'OCDT'
VERSION = 1
_HEAD = struct.Struct('<4sIIQ')
_CRC = struct.Struct('<I')
HEADER_SIZE = _HEAD.size + _CRC.size


def _crc(data):
    return zlib.crc32(data) & 0xFFFFFFFF


def encode_tensors(tensors):
    chunks = []
    for name, value in tensors.items():
        encoded = name.encode('utf-8')
        data = np.ascontiguousarray(value, dtype='<f4')
        chunks.append(struct.pack('<I', len(encoded)))
        chunks.append(encoded)
        chunks.append(struct.pack('<I', data.ndim))
        chunks.append(struct.pack('<{}Q'.format(data.ndim), *data.shape))
        chunks.append(data.tobytes())
    records = b''.join(chunks)
    head = _HEAD.pack(MAGIC, VERSION, len(tensors), HEADER_SIZE + len(records) + _CRC.size)
    body = head + _CRC.pack(_crc(head)) + records
    return body + _CRC.pack(_crc(body))


class _Reader:
    def __init__(self, payload, position):
        self.payload = payload
        self.position = position

    def take(self, n):
        if self.position + n > len(self.payload):
            raise CheckpointFormatError('Record needs {} bytes, {} remain before the checksum'.format(
                n, len(self.payload) - self.position))
        chunk = self.payload[self.position:self.position + n]
        self.position += n
        return chunk

    def unpack(self, fmt):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))


def _check_frame(payload):
    """Validate magic, version, header checksum, length and body checksum; returns the record count."""
    if payload[:4] != MAGIC:
        raise CheckpointFormatError('Not an OCDT file (magic {!r})'.format(payload[:4]))
    if len(payload) < 8:
        raise CheckpointTruncatedError('File ends inside the version field')
    version, = struct.unpack('<I', payload[4:8])
    if version != VERSION:
        raise CheckpointVersionError('Unsupported OCDT version {} (expected {})'.format(version, VERSION))
    if len(payload) < HEADER_SIZE:
        raise CheckpointTruncatedError('File holds {} of the {} header bytes'.format(len(payload), HEADER_SIZE))
    _, _, count, total = _HEAD.unpack(payload[:_HEAD.size])
    stored, = _CRC.unpack(payload[_HEAD.size:HEADER_SIZE])
    if _crc(payload[:_HEAD.size]) != stored:
        raise CheckpointCRCError('Header CRC-32 mismatch: stored {:08x}, computed {:08x}'.format(
            stored, _crc(payload[:_HEAD.size])))
    if len(payload) < total:
        raise CheckpointTruncatedError('File holds {} of its {} bytes'.format(len(payload), total))
    if len(payload) > total:
        raise CheckpointFormatError('{} unexpected bytes after the checksum'.format(len(payload) - total))
    stored, = _CRC.unpack(payload[-_CRC.size:])
    if _crc(payload[:-_CRC.size]) != stored:
        raise CheckpointCRCError('CRC-32 mismatch: stored {:08x}, computed {:08x}'.format(
            stored, _crc(payload[:-_CRC.size])))
    return count


def decode_tensors(payload):
    """Parse an OCDT byte string into an ordered dict of float64 arrays.

    Bad magic, unknown version, truncation and CRC mismatch raise distinct
    CheckpointError subclasses. Both checksums are verified before any
    record is read, so a corrupted size field reports a CRC mismatch.
    """
    count = _check_frame(payload)
    reader = _Reader(payload[:-_CRC.size], HEADER_SIZE)
    tensors = {}
    for _ in range(count):
        name_len, = reader.unpack('<I')
        try:
            name = reader.take(name_len).decode('utf-8')
        except UnicodeDecodeError:
            raise CheckpointFormatError('Tensor name is not valid UTF-8')
        rank, = reader.unpack('<I')
        shape = reader.unpack('<{}Q'.format(rank))
        size = int(np.prod(shape, dtype=np.int64))
        data = np.frombuffer(reader.take(4 * size), dtype='<f4').astype(np.float64).reshape(shape)
        if name in tensors:
            raise CheckpointFormatError('Duplicate tensor name {!r}'.format(name))
        tensors[name] = data
    if reader.position != len(reader.payload):
        raise CheckpointFormatError('{} bytes left after {} records'.format(
            len(reader.payload) - reader.position, count))
    return tensors


def write_tensors(path, tensors):
    payload = encode_tensors(tensors)
    tmp_path = str(path) + '.part'
    with open(tmp_path, 'wb') as f:
        f.write(payload)
    os.replace(tmp_path, path)
    logging.debug('Wrote %d tensors to %s', len(tensors), path)
    return _crc(payload[:-_CRC.size])


def read_tensors(path):
    with open(path, 'rb') as f:
        payload = f.read()
    return decode_tensors(payload)
