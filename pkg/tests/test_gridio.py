import struct

import numpy as np
import pytest

from fieldbench.gridio import (
    MAGIC,
    FormatError,
    grid_from_bytes,
    grid_to_bytes,
    read_grid,
    read_grid_binary,
    read_grid_csv,
    write_grid_binary,
    write_grid_csv,
)


def random_grid(h=7, w=11, seed=0):
    return np.random.default_rng(seed).random((h, w)).astype(np.float32)


class TestBinaryFormat:
    def test_header_layout(self):
        grid = random_grid(3, 5)
        blob = grid_to_bytes(grid)
        magic, width, height, dtype_code = struct.unpack("<4sIII", blob[:16])
        assert magic == MAGIC == b"WBFG"
        assert (width, height) == (5, 3)
        assert dtype_code == 1  # float32, little endian
        assert len(blob) == 16 + 4 * 15

    def test_payload_row_major(self):
        grid = np.arange(6, dtype=np.float32).reshape(2, 3)
        blob = grid_to_bytes(grid)
        payload = np.frombuffer(blob[16:], dtype="<f4")
        assert (payload == [0, 1, 2, 3, 4, 5]).all()

    def test_round_trip_exact(self):
        grid = random_grid()
        back = grid_from_bytes(grid_to_bytes(grid))
        assert back.dtype == np.float32
        assert np.array_equal(back, grid)

    def test_file_round_trip(self, tmp_path):
        grid = random_grid(seed=1)
        path = tmp_path / "field.wbfg"
        write_grid_binary(path, grid)
        assert np.array_equal(read_grid_binary(path), grid)

    def test_bad_magic(self):
        blob = b"XXXX" + grid_to_bytes(random_grid())[4:]
        with pytest.raises(FormatError):
            grid_from_bytes(blob)

    def test_truncated_payload(self):
        blob = grid_to_bytes(random_grid())[:-4]
        with pytest.raises(FormatError):
            grid_from_bytes(blob)

    def test_short_header(self):
        with pytest.raises(FormatError):
            grid_from_bytes(b"WBFG\x01")

    def test_unknown_dtype_code(self):
        grid = random_grid(2, 2)
        blob = bytearray(grid_to_bytes(grid))
        blob[12:16] = struct.pack("<I", 9)
        with pytest.raises(FormatError):
            grid_from_bytes(bytes(blob))


class TestCsvFormat:
    def test_round_trip_exact(self, tmp_path):
        grid = random_grid(seed=2)
        path = tmp_path / "field.csv"
        write_grid_csv(path, grid)
        back = read_grid_csv(path)
        assert back.dtype == np.float32
        assert np.array_equal(back, grid)

    def test_ragged_rows_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("1.0,2.0\n3.0\n")
        with pytest.raises(FormatError):
            read_grid_csv(path)


class TestReadByExtension:
    def test_dispatch(self, tmp_path):
        grid = random_grid(seed=3)
        wbfg = tmp_path / "a.wbfg"
        csv = tmp_path / "a.csv"
        write_grid_binary(wbfg, grid)
        write_grid_csv(csv, grid)
        assert np.array_equal(read_grid(wbfg), grid)
        assert np.array_equal(read_grid(csv), grid)

    def test_unknown_extension(self, tmp_path):
        path = tmp_path / "a.npy"
        path.write_bytes(b"")
        with pytest.raises(FormatError):
            read_grid(path)


def test_atomic_write_leaves_no_temp_files(tmp_path):
    grid = random_grid(seed=4)
    write_grid_binary(tmp_path / "f.wbfg", grid)
    write_grid_csv(tmp_path / "f.csv", grid)
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == ["f.csv", "f.wbfg"]
