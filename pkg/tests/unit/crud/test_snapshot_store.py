import numpy as np
import pytest

from app.core.exceptions import ShapeError
from app.crud import read_snapshot, write_snapshot
from app.crud.snapshot import SNAPSHOT_DTYPE, sidecar_path
from app.models import GridSpec, TorusField


@pytest.mark.unit
@pytest.mark.crud
class TestSnapshotStore:
    """Test binary field snapshots"""

    def test_write_and_read(self, make_field, tmp_path):
        field = make_field(3, 3)
        path = write_snapshot(field, tmp_path / "snap" / "step000004_v.bin", component="v")
        loaded, component = read_snapshot(path)

        assert component == "v"
        assert loaded.grid == field.grid
        assert np.array_equal(loaded.coeff, field.coeff)
        assert sidecar_path(path).exists()

    def test_blob_layout(self, tmp_path):
        """16 bytes per mode, k-lexicographic, real part first"""
        grid = GridSpec(d=1, K=1)
        field = TorusField.from_modes(grid, {(-1,): 1 - 2j, (0,): 3.0, (1,): 1 + 2j}, real_flag=True)
        path = write_snapshot(field, tmp_path / "u.bin")
        raw = np.frombuffer(path.read_bytes(), dtype="<f8")

        assert path.stat().st_size == 3 * SNAPSHOT_DTYPE.itemsize
        assert raw.tolist() == [1.0, -2.0, 3.0, 0.0, 1.0, 2.0]

    def test_sidecar_header(self, make_field, tmp_path):
        path = write_snapshot(make_field(2, 4), tmp_path / "u.bin")

        assert sidecar_path(path).name == "u.bin.json"
        assert '"K": 4' in sidecar_path(path).read_text()

    def test_truncated_blob(self, make_field, tmp_path):
        path = write_snapshot(make_field(1, 4), tmp_path / "u.bin")
        path.write_bytes(path.read_bytes()[:-16])

        with pytest.raises(ShapeError):
            read_snapshot(path)

    def test_missing_blob(self, make_field, tmp_path):
        path = write_snapshot(make_field(1, 4), tmp_path / "u.bin")
        path.unlink()

        with pytest.raises(FileNotFoundError):
            read_snapshot(path)
