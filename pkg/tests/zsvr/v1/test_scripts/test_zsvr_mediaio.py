import json
import math
import os

import numpy as np
import pytest

from src.zsvr.v1.entities.zsvr_flow_field import ZsvrFlowField
from src.zsvr.v1.entities.zsvr_frame_sequence import ZsvrFrameSequence
from src.zsvr.v1.entities.zsvr_metrics_report import ZsvrMetricsReport
from src.zsvr.v1.zsvr_errors import *
from src.zsvr.v1.zsvr_mediaio import (decode_flo, decode_pnm, decode_raw_tensor, encode_flo, encode_ppm,
                                      encode_raw_tensor, read_flo, read_frames, read_raw_tensor, read_report,
                                      report_to_dict, write_flo, write_frames, write_raw_tensor, write_report)


def _pgm(width: int, height: int, value: int) -> bytes:
    return f"P5\n{width} {height}\n255\n".encode() + bytes([value] * (width * height))


def test_zsvr_read_frames_gray_directory(tmp_path):
    for index in range(3):
        (tmp_path / f"frame_{index}.pgm").write_bytes(_pgm(4, 4, 128))

    seq = read_frames(str(tmp_path))

    assert isinstance(seq, ZsvrFrameSequence)
    assert seq.num_frames == 3
    assert seq.frames.shape == (3, 4, 4, 3)
    assert np.all(seq.frames == 128 / 255)


def test_zsvr_read_frames_empty_directory(tmp_path):
    with pytest.raises(ZsvrEmptyInputError) as excinfo:
        read_frames(str(tmp_path))
    assert "no frames" in str(excinfo.value)


def test_zsvr_read_frames_inconsistent_sizes(tmp_path):
    (tmp_path / "a.pgm").write_bytes(_pgm(4, 4, 10))
    (tmp_path / "b.pgm").write_bytes(_pgm(5, 4, 10))
    with pytest.raises(ZsvrShapeError):
        read_frames(str(tmp_path))


def test_zsvr_pnm_with_comment():
    data = b"P5\n# a comment\n2 1\n255\n" + bytes([0, 255])
    frame = decode_pnm(data)
    assert frame.shape == (1, 2, 3)
    assert frame[0, 0, 0] == 0.0
    assert frame[0, 1, 2] == 1.0


def test_zsvr_pnm_truncated_and_trailing():
    with pytest.raises(ZsvrLengthError):
        decode_pnm(b"P5\n4 4\n255\n" + bytes(10))
    with pytest.raises(ZsvrFormatError):
        decode_pnm(_pgm(2, 2, 1) + b"\x00")


def test_zsvr_pnm_bad_magic():
    with pytest.raises(ZsvrFormatError):
        decode_pnm(b"P3\n1 1\n255\n0 0 0\n")


def test_zsvr_encode_ppm_extremes():
    zeros = encode_ppm(np.zeros((2, 3, 3)))
    ones = encode_ppm(np.ones((2, 3, 3)))
    header = b"P6\n3 2\n255\n"
    assert zeros == header + bytes(18)
    assert ones == header + bytes([255] * 18)


def test_zsvr_ppm_round_trip(tmp_path):
    ys, xs = np.mgrid[0:6, 0:8]
    gradient = np.stack([xs / 7.0, ys / 5.0, (xs + ys) / 12.0], axis=2)
    seq = ZsvrFrameSequence([gradient])

    written = write_frames(seq, str(tmp_path / "out"))
    back = read_frames(str(tmp_path / "out"))

    assert [os.path.basename(p) for p in written] == ["frame_00000.ppm"]
    assert np.max(np.abs(back.frames[0] - gradient)) <= 1 / 510 + 1e-12


def test_zsvr_flo_examples():
    header = b"PIEH" + np.array([1, 1], dtype='<i4').tobytes()
    flow = decode_flo(header + np.zeros(2, dtype='<f4').tobytes())
    assert flow.data.shape == (1, 1, 2)
    assert np.all(flow.data == 0.0)

    header = b"PIEH" + np.array([2, 1], dtype='<i4').tobytes()
    flow = decode_flo(header + np.array([1, 0, -1, 0], dtype='<f4').tobytes())
    assert flow.data[0, 0].tolist() == [1.0, 0.0]
    assert flow.data[0, 1].tolist() == [-1.0, 0.0]


def test_zsvr_flo_round_trip(tmp_path):
    rng = np.random.default_rng(3)
    data = rng.uniform(-3.0, 3.0, (5, 7, 2)).astype(np.float32).astype(np.float64)
    path = str(tmp_path / "field.flo")

    write_flo(ZsvrFlowField(data), path)
    back = read_flo(path)

    assert np.array_equal(back.data, data)


def test_zsvr_flo_errors():
    good = encode_flo(ZsvrFlowField(np.zeros((2, 2, 2))))
    with pytest.raises(ZsvrFormatError):
        decode_flo(b"XXXX" + good[4:])
    with pytest.raises(ZsvrLengthError):
        decode_flo(good[:-4])
    with pytest.raises(ZsvrLengthError):
        decode_flo(good[:8])
    nan_payload = good[:12] + np.array([np.nan, 0, 0, 0, 0, 0, 0, 0], dtype='<f4').tobytes()
    with pytest.raises(ZsvrFormatError):
        decode_flo(nan_payload)


def test_zsvr_raw_tensor_round_trip(tmp_path):
    rng = np.random.default_rng(5)
    array = rng.standard_normal((3, 4, 2)).astype(np.float32)
    path = str(tmp_path / "latent.rtf")

    write_raw_tensor(array, path)
    back = read_raw_tensor(path)

    assert back.dtype == np.float32
    assert back.shape == (3, 4, 2)
    assert np.array_equal(back, array)


def test_zsvr_raw_tensor_errors():
    good = encode_raw_tensor(np.ones((2, 2), dtype=np.float32))
    with pytest.raises(ZsvrFormatError):
        decode_raw_tensor(b"NOPE" + good[4:])
    with pytest.raises(ZsvrLengthError):
        decode_raw_tensor(good[:-1])
    with pytest.raises(ZsvrSerializationError):
        encode_raw_tensor(np.array([np.inf]))


def test_zsvr_report_to_dict_layout():
    report = ZsvrMetricsReport(psnr=[30.0], ssim=[0.9], e_warp=[0.002], e_inter=[4.0],
                               metadata={'seed': 1})
    obj = report_to_dict(report)

    assert list(obj.keys()) == ['psnr', 'ssim', 'e_warp', 'e_inter', 'metadata']
    assert obj['psnr']['mean'] == 30.0
    assert obj['e_warp']['mean_x1e3'] == pytest.approx(2.0)
    assert json.loads(json.dumps(obj)) == obj


def test_zsvr_report_empty_means_are_null(tmp_path):
    path = str(tmp_path / "report.json")
    write_report(ZsvrMetricsReport(), path)
    with open(path, 'r') as f:
        obj = json.load(f)
    assert obj['psnr']['mean'] is None
    assert obj['e_inter']['mean'] is None


def test_zsvr_report_inf_psnr_round_trip(tmp_path):
    path = str(tmp_path / "report.json")
    report = ZsvrMetricsReport(psnr=[math.inf, 40.0], ssim=[1.0, 0.5], e_warp=[0.0], e_inter=[])
    write_report(report, path)

    with open(path, 'r') as f:
        obj = json.load(f)
    assert obj['psnr']['values'][0] == "inf"
    back = read_report(path)
    assert back.psnr[0] == math.inf
    assert back.psnr[1] == 40.0
    assert back.ssim == [1.0, 0.5]


def test_zsvr_report_rejects_nan():
    report = ZsvrMetricsReport(e_warp=[float('nan')])
    with pytest.raises(ZsvrSerializationError):
        report_to_dict(report)
