import struct

import numpy as np
import pytest

from g2m import g2mf


@pytest.mark.parametrize("shape", [(7,), (3, 5), (4, 2, 6), (2, 3, 4, 5)])
def test_save_load_roundtrip(tmp_path, shape):
    rng = np.random.default_rng(0)
    arr = rng.normal(size=shape).astype(np.float32)
    path = tmp_path / "t.g2mf"
    g2mf.save(path, arr)
    back = g2mf.load(path)
    assert back.dtype == np.float32
    assert np.array_equal(back, arr)


def test_header_layout_is_as_documented(tmp_path):
    arr = np.arange(6, dtype=np.float32).reshape(2, 3)
    path = tmp_path / "t.g2mf"
    g2mf.save(path, arr)
    raw = path.read_bytes()
    assert raw[:4] == b"G2MF"
    version, dtype, rank = struct.unpack_from("<III", raw, 4)
    assert (version, dtype, rank) == (1, 0, 2)
    assert struct.unpack_from("<II", raw, 16) == (2, 3)
    assert len(raw) == 16 + 8 + 6 * 4


def test_bad_magic(tmp_path):
    path = tmp_path / "bad.g2mf"
    path.write_bytes(b"XXXX" + b"\x00" * 20)
    with pytest.raises(g2mf.G2MFError) as err:
        g2mf.load(path)
    assert err.value.offset == 0


def test_bad_version_and_dtype(tmp_path):
    path = tmp_path / "bad.g2mf"
    path.write_bytes(struct.pack("<4sIII", b"G2MF", 9, 0, 1) + struct.pack("<I", 1) + b"\x00" * 4)
    with pytest.raises(g2mf.G2MFError) as err:
        g2mf.load(path)
    assert err.value.offset == 4
    path.write_bytes(struct.pack("<4sIII", b"G2MF", 1, 7, 1) + struct.pack("<I", 1) + b"\x00" * 4)
    with pytest.raises(g2mf.G2MFError) as err:
        g2mf.load(path)
    assert err.value.offset == 8


def test_truncated_payload_reports_offset(tmp_path):
    arr = np.ones((4, 4), dtype=np.float32)
    path = tmp_path / "t.g2mf"
    g2mf.save(path, arr)
    data = path.read_bytes()
    path.write_bytes(data[:-8])
    with pytest.raises(g2mf.G2MFError) as err:
        g2mf.load(path)
    assert err.value.offset == 24  # dims end for rank 2


def test_zero_dim_rejected(tmp_path):
    path = tmp_path / "bad.g2mf"
    path.write_bytes(struct.pack("<4sIII", b"G2MF", 1, 0, 2) + struct.pack("<II", 0, 3))
    with pytest.raises(g2mf.G2MFError):
        g2mf.load(path)


def test_dim_overflow_rejected(tmp_path):
    path = tmp_path / "bad.g2mf"
    big = 2**31
    path.write_bytes(struct.pack("<4sIII", b"G2MF", 1, 0, 3)
                     + struct.pack("<III", big - 1, big - 1, 64))
    with pytest.raises(g2mf.G2MFError) as err:
        g2mf.load(path)
    assert "overflow" in str(err.value)


def test_short_file(tmp_path):
    path = tmp_path / "tiny.g2mf"
    path.write_bytes(b"G2M")
    with pytest.raises(g2mf.G2MFError):
        g2mf.load(path)
