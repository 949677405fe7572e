import logging
from pathlib import Path
from typing import Tuple

import numpy as np

from app.core.exceptions import ShapeError
from app.models import GridSpec, TorusField
from app.schemas import SnapshotHeader
from .base import FileStoreBase, PathLike, io_error

logger = logging.getLogger(__name__)

# little-endian complex128: 8-byte real part followed by 8-byte imaginary part
SNAPSHOT_DTYPE = np.dtype("<c16")


def sidecar_path(path: PathLike) -> Path:
    """<path>.json next to the blob"""
    path = Path(path)
    return path.with_name(path.name + ".json")


class SnapshotStore(FileStoreBase[SnapshotHeader]):
    def write_snapshot(self, field: TorusField, path: PathLike, component: str = "u") -> Path:
        """Coefficient blob in k-lexicographic order plus its JSON header"""
        target = Path(path)
        header = SnapshotHeader(d=field.grid.d, K=field.grid.K, real_flag=field.real_flag, component=component)
        blob = np.ascontiguousarray(field.lexicographic(), dtype=SNAPSHOT_DTYPE).tobytes()
        try:
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_bytes(blob)
        except OSError as e:
            raise io_error(e, "write snapshot", target) from e
        self.write_model(sidecar_path(target), header)
        logger.debug(f"Snapshot of {field!r} ({component}) written to {target}")
        return target

    def read_snapshot(self, path: PathLike) -> Tuple[TorusField, str]:
        """Field and component name of a snapshot written by write_snapshot"""
        target = Path(path)
        header = self.read_model(sidecar_path(target))
        try:
            blob = target.read_bytes()
        except OSError as e:
            raise io_error(e, "read snapshot", target) from e
        grid = GridSpec(d=header.d, K=header.K)
        if len(blob) != grid.size * SNAPSHOT_DTYPE.itemsize:
            raise ShapeError(f"Snapshot {target} holds {len(blob)} bytes, expected {grid.size * SNAPSHOT_DTYPE.itemsize}")
        coeff = np.frombuffer(blob, dtype=SNAPSHOT_DTYPE).reshape(grid.shape)
        field = TorusField.from_lexicographic(grid, coeff, real_flag=header.real_flag)
        return field, header.component


snapshot_store = SnapshotStore(SnapshotHeader)


def write_snapshot(field: TorusField, path: PathLike, component: str = "u") -> Path:
    return snapshot_store.write_snapshot(field, path, component)


def read_snapshot(path: PathLike) -> Tuple[TorusField, str]:
    return snapshot_store.read_snapshot(path)
