"""
Datasets and the .htds container.

Layout (all integers little-endian):

    magic      4 bytes  b'HTDS'
    version    u16      1
    family     u16      see FAMILY_TAGS
    n          u64      number of rows
    width      u64      floats per row
    rows       n * width float64, row-major
    hash       u64      first 8 bytes of sha256(everything above), big-endian value

The trailing hash is also the dataset's content_hash, so a saved and
reloaded dataset keeps its hash.
"""
import hashlib
import logging
import struct
from pathlib import Path

import numpy as np

from apps.core_math.errors import HashMismatch, InvalidArgument, MalformedFile

logger = logging.getLogger(__name__)

MAGIC = b'HTDS'
VERSION = 1
FAMILY_TAGS = {
    'logistic_pair': 1,
    'robust_regression': 2,
    'quad_plus_sine': 3,
}
_TAG_FAMILIES = {tag: family for family, tag in FAMILY_TAGS.items()}
_HEADER = struct.Struct('<4sHHQQ')
_TRAILER = struct.Struct('<Q')


def _digest(payload):
    return int.from_bytes(hashlib.sha256(payload).digest()[:8], 'big', signed=False)


class Dataset:
    """Immutable (n, width) block of sample rows tagged with its problem family."""

    def __init__(self, family, rows):
        family = str(family)
        if family not in FAMILY_TAGS:
            raise InvalidArgument(f'unknown problem family {family!r}')
        rows = np.array(rows, dtype='<f8')
        if rows.ndim == 1:
            rows = rows.reshape(-1, 1)
        if rows.ndim != 2 or rows.shape[0] < 1 or rows.shape[1] < 1:
            raise InvalidArgument(f'dataset needs at least one row, got shape {rows.shape}')
        if not np.all(np.isfinite(rows)):
            raise InvalidArgument('dataset rows must be finite')
        rows.setflags(write=False)
        self.family = family
        self.rows = rows
        self._payload = self._encode_payload()
        self.content_hash = _digest(self._payload)

    @property
    def n(self):
        return self.rows.shape[0]

    @property
    def width(self):
        return self.rows.shape[1]

    def __len__(self):
        return self.n

    def __repr__(self):
        return f'Dataset(family={self.family!r}, n={self.n}, width={self.width}, hash={self.content_hash:#018x})'

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return self.family == other.family and self._payload == other._payload

    def __hash__(self):
        return self.content_hash

    def _encode_payload(self):
        header = _HEADER.pack(MAGIC, VERSION, FAMILY_TAGS[self.family], self.n, self.width)
        return header + self.rows.tobytes(order='C')

    def to_bytes(self):
        return self._payload + _TRAILER.pack(self.content_hash)

    def replace_row(self, i, row):
        """New dataset equal to this one except at row i."""
        if isinstance(i, bool) or int(i) != i or not (0 <= i < self.n):
            raise InvalidArgument(f'row index {i!r} out of range [0, {self.n})')
        row = np.asarray(row, dtype=np.float64).reshape(-1)
        if row.size != self.width:
            raise InvalidArgument(f'replacement row has width {row.size}, expected {self.width}')
        rows = self.rows.copy()
        rows[int(i)] = row
        return Dataset(self.family, rows)


def dataset_from_bytes(data):
    if len(data) < _HEADER.size + _TRAILER.size:
        raise MalformedFile(f'file is {len(data)} bytes, shorter than header and trailer')
    magic, version, tag, n, width = _HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise MalformedFile(f'bad magic {magic!r}')
    if version != VERSION:
        raise MalformedFile(f'unsupported container version {version}')
    if tag not in _TAG_FAMILIES:
        raise MalformedFile(f'unknown family tag {tag}')
    body_size = n * width * 8
    expected_size = _HEADER.size + body_size + _TRAILER.size
    if len(data) != expected_size:
        raise MalformedFile(f'expected {expected_size} bytes for n={n} width={width}, got {len(data)}')
    payload = data[:_HEADER.size + body_size]
    (stored,) = _TRAILER.unpack_from(data, len(payload))
    actual = _digest(payload)
    if stored != actual:
        raise HashMismatch(stored, actual)
    rows = np.frombuffer(data, dtype='<f8', count=n * width, offset=_HEADER.size).reshape(n, width)
    try:
        return Dataset(_TAG_FAMILIES[tag], rows)
    except InvalidArgument as exc:
        raise MalformedFile(str(exc)) from exc


def save_dataset(dataset, path):
    path = Path(path)
    path.write_bytes(dataset.to_bytes())
    logger.debug('save_dataset: path=%s n=%d hash=%#018x', path, dataset.n, dataset.content_hash)
    return path


def load_dataset(path):
    data = Path(path).read_bytes()
    return dataset_from_bytes(data)
