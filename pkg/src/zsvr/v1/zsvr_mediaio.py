# Optional, for forward declarations in Python 3.7+
from __future__ import annotations

import json
import logging
import math
import os

import numpy as np

from .constants import (FLO_MAGIC, FLO_MAGIC_TAG, PNM_MAXVAL,
                        PSNR_INF_SENTINEL, RTF_MAGIC)
from .entities.zsvr_flow_field import ZsvrFlowField
from .entities.zsvr_frame_sequence import ZsvrFrameSequence
from .entities.zsvr_metrics_report import ZsvrMetricsReport
from .zsvr_errors import (ZsvrEmptyInputError, ZsvrFormatError, ZsvrLengthError,
                          ZsvrParameterError, ZsvrSerializationError, ZsvrShapeError)
from .zsvr_metrics import scale_e_warp
from .zsvr_utilities import atomic_write_bytes, atomic_write_text

logger = logging.getLogger(__name__)

PNM_EXTENSIONS = ('.pgm', '.ppm', '.pnm')
FRAME_NAME = "frame_{index:05d}.ppm"

_PNM_WHITESPACE = b" \t\n\r\v\f"


# ---------------------------------------------------------------- PNM frames

def _read_pnm_token(data: bytes, pos: int) -> tuple:
    while pos < len(data):
        if data[pos:pos + 1] == b'#':
            end = data.find(b'\n', pos)
            pos = len(data) if end < 0 else end + 1
        elif data[pos:pos + 1] in (b' ', b'\t', b'\n', b'\r', b'\v', b'\f'):
            pos += 1
        else:
            break
    start = pos
    while pos < len(data) and data[pos:pos + 1] not in (b' ', b'\t', b'\n', b'\r', b'\v', b'\f', b'#'):
        pos += 1
    if start == pos:
        raise ZsvrFormatError("truncated PNM header")
    return data[start:pos], pos


def decode_pnm(data: bytes, source: str = None) -> np.ndarray:
    """Decode a binary P5/P6 image with maxval 255 into an (h, w, 3) array in [0, 1]."""
    magic = data[:2]
    if magic not in (b'P5', b'P6'):
        raise ZsvrFormatError("not a binary PNM (P5/P6) file",
                              problem_data={'file': source, 'magic': magic})
    pos = 2
    fields = []
    try:
        for _ in range(3):
            token, pos = _read_pnm_token(data, pos)
            fields.append(int(token))
    except ValueError:
        raise ZsvrFormatError("non-numeric PNM header field",
                              problem_data={'file': source})
    width, height, maxval = fields
    if width < 1 or height < 1:
        raise ZsvrFormatError("PNM dimensions must be positive",
                              problem_data={'file': source, 'width': width, 'height': height})
    if maxval != PNM_MAXVAL:
        raise ZsvrFormatError("only maxval 255 is supported",
                              problem_data={'file': source, 'maxval': maxval})
    if pos >= len(data) or data[pos:pos + 1] not in _PNM_WHITESPACE:
        raise ZsvrFormatError("missing whitespace after PNM header",
                              problem_data={'file': source})
    pos += 1

    channels = 1 if magic == b'P5' else 3
    expected = width * height * channels
    payload = data[pos:]
    if len(payload) < expected:
        raise ZsvrLengthError("truncated PNM payload",
                              problem_data={'file': source, 'expected': expected, 'found': len(payload)})
    if len(payload) > expected:
        raise ZsvrFormatError("trailing bytes after PNM payload",
                              problem_data={'file': source})

    pixels = np.frombuffer(payload, dtype=np.uint8).reshape(height, width, channels)
    if channels == 1:
        pixels = np.repeat(pixels, 3, axis=2)
    return pixels.astype(np.float64) / PNM_MAXVAL


def encode_ppm(frame: np.ndarray) -> bytes:
    height, width = frame.shape[:2]
    quantized = np.clip(np.rint(frame * PNM_MAXVAL), 0, PNM_MAXVAL).astype(np.uint8)
    header = f"P6\n{width} {height}\n{PNM_MAXVAL}\n".encode('ascii')
    return header + quantized.tobytes()


def list_frame_files(path: str) -> list:
    if not os.path.isdir(path):
        raise FileNotFoundError(f"not a directory: {path}")
    names = sorted(name for name in os.listdir(path)
                   if name.lower().endswith(PNM_EXTENSIONS) and not name.startswith('.'))
    return [os.path.join(path, name) for name in names]


def read_frames(path: str) -> ZsvrFrameSequence:
    files = list_frame_files(path)
    if not files:
        raise ZsvrEmptyInputError("no frames", problem_data={'directory': path})

    frames = []
    for file_path in files:
        with open(file_path, 'rb') as f:
            frame = decode_pnm(f.read(), source=file_path)
        if frames and frame.shape != frames[0].shape:
            raise ZsvrShapeError("inconsistent frame dimensions",
                                 problem_data={'file': file_path, 'expected': frames[0].shape[:2],
                                               'found': frame.shape[:2]})
        frames.append(frame)

    logger.info("read %d frames of %dx%d from %s", len(frames),
                frames[0].shape[1], frames[0].shape[0], path)
    return ZsvrFrameSequence(np.stack(frames), name=os.path.basename(os.path.normpath(path)))


def write_frames(seq: ZsvrFrameSequence, path: str) -> list:
    if not isinstance(seq, ZsvrFrameSequence):
        raise TypeError("'seq' should be a ZsvrFrameSequence")
    os.makedirs(path, exist_ok=True)
    payloads = [encode_ppm(frame) for frame in seq.frames]
    written = []
    for index, payload in enumerate(payloads):
        file_path = os.path.join(path, FRAME_NAME.format(index=index))
        atomic_write_bytes(file_path, payload)
        written.append(file_path)
    logger.info("wrote %d frames to %s", len(written), path)
    return written


# ---------------------------------------------------------------- .flo

def decode_flo(data: bytes, source: str = None) -> ZsvrFlowField:
    if len(data) < 12:
        raise ZsvrLengthError("truncated .flo header", problem_data={'file': source})
    magic = np.frombuffer(data[:4], dtype='<f4')[0]
    if data[:4] != FLO_MAGIC_TAG or magic != np.float32(FLO_MAGIC):
        raise ZsvrFormatError("wrong .flo magic", problem_data={'file': source, 'magic': data[:4]})
    width, height = (int(v) for v in np.frombuffer(data[4:12], dtype='<i4'))
    if width < 1 or height < 1:
        raise ZsvrFormatError(".flo dimensions must be positive",
                              problem_data={'file': source, 'width': width, 'height': height})
    expected = 2 * width * height * 4
    payload = data[12:]
    if len(payload) < expected:
        raise ZsvrLengthError("truncated .flo payload",
                              problem_data={'file': source, 'expected': expected, 'found': len(payload)})
    if len(payload) > expected:
        raise ZsvrFormatError("trailing bytes after .flo payload", problem_data={'file': source})
    values = np.frombuffer(payload, dtype='<f4').astype(np.float64)
    if not np.all(np.isfinite(values)):
        raise ZsvrFormatError(".flo payload contains non-finite values", problem_data={'file': source})
    try:
        return ZsvrFlowField(values.reshape(height, width, 2))
    except ZsvrParameterError as e:
        raise ZsvrFormatError(f"implausible .flo content: {e}", problem_data={'file': source})


def encode_flo(flow: ZsvrFlowField) -> bytes:
    data = flow.data
    height, width = data.shape[:2]
    header = FLO_MAGIC_TAG + np.array([width, height], dtype='<i4').tobytes()
    return header + data.astype('<f4').tobytes()


def read_flo(path: str) -> ZsvrFlowField:
    with open(path, 'rb') as f:
        return decode_flo(f.read(), source=path)


def write_flo(flow: ZsvrFlowField, path: str) -> None:
    if not isinstance(flow, ZsvrFlowField):
        raise TypeError("'flow' should be a ZsvrFlowField")
    atomic_write_bytes(path, encode_flo(flow))


# ---------------------------------------------------------------- raw tensors

def encode_raw_tensor(array: np.ndarray) -> bytes:
    array = np.asarray(array)
    if not np.all(np.isfinite(array)):
        raise ZsvrSerializationError("raw tensor contains non-finite values")
    header = RTF_MAGIC + np.array([array.ndim] + list(array.shape), dtype='<u4').tobytes()
    return header + np.ascontiguousarray(array, dtype='<f4').tobytes()


def decode_raw_tensor(data: bytes, source: str = None) -> np.ndarray:
    if data[:4] != RTF_MAGIC:
        raise ZsvrFormatError("wrong raw tensor magic", problem_data={'file': source, 'magic': data[:4]})
    if len(data) < 8:
        raise ZsvrLengthError("truncated raw tensor header", problem_data={'file': source})
    rank = int(np.frombuffer(data[4:8], dtype='<u4')[0])
    header_end = 8 + 4 * rank
    if len(data) < header_end:
        raise ZsvrLengthError("truncated raw tensor dims", problem_data={'file': source, 'rank': rank})
    dims = [int(v) for v in np.frombuffer(data[8:header_end], dtype='<u4')]
    expected = int(np.prod(dims, dtype=np.int64)) * 4
    payload = data[header_end:]
    if len(payload) < expected:
        raise ZsvrLengthError("truncated raw tensor payload",
                              problem_data={'file': source, 'expected': expected, 'found': len(payload)})
    if len(payload) > expected:
        raise ZsvrFormatError("trailing bytes after raw tensor payload", problem_data={'file': source})
    values = np.frombuffer(payload, dtype='<f4').reshape(dims)
    if not np.all(np.isfinite(values)):
        raise ZsvrFormatError("raw tensor contains non-finite values", problem_data={'file': source})
    return values.astype(np.float32)


def read_raw_tensor(path: str) -> np.ndarray:
    with open(path, 'rb') as f:
        return decode_raw_tensor(f.read(), source=path)


def write_raw_tensor(array: np.ndarray, path: str) -> None:
    atomic_write_bytes(path, encode_raw_tensor(array))


# ---------------------------------------------------------------- reports

def _finite_or_raise(value: float, label: str) -> float:
    if not math.isfinite(value):
        raise ZsvrSerializationError(f"non-finite {label} value", problem_data={label: value})
    return value


def _metric_block(values: list, label: str, allow_inf: bool = False) -> dict:
    encoded = []
    for value in values:
        if allow_inf and math.isinf(value) and value > 0:
            encoded.append(PSNR_INF_SENTINEL)
        else:
            encoded.append(_finite_or_raise(value, label))
    mean = ZsvrMetricsReport.mean_of(values)
    if mean is not None:
        mean = PSNR_INF_SENTINEL if (allow_inf and math.isinf(mean)) else _finite_or_raise(mean, label)
    return {'values': encoded, 'mean': mean}


def report_to_dict(report: ZsvrMetricsReport) -> dict:
    """JSON-ready form with stable key order psnr, ssim, e_warp, e_inter, metadata."""
    if not isinstance(report, ZsvrMetricsReport):
        raise TypeError("'report' should be a ZsvrMetricsReport")
    e_warp = _metric_block(report.e_warp, 'e_warp')
    e_warp['values_x1e3'] = [scale_e_warp(v) for v in report.e_warp]
    e_warp['mean_x1e3'] = scale_e_warp(e_warp['mean'])
    return {
        'psnr': _metric_block(report.psnr, 'psnr', allow_inf=True),
        'ssim': _metric_block(report.ssim, 'ssim'),
        'e_warp': e_warp,
        'e_inter': _metric_block(report.e_inter, 'e_inter'),
        'metadata': report.metadata,
    }


def _decode_value(value):
    if value == PSNR_INF_SENTINEL:
        return math.inf
    return float(value)


def report_from_dict(obj: dict) -> ZsvrMetricsReport:
    try:
        return ZsvrMetricsReport(
            psnr=[_decode_value(v) for v in obj['psnr']['values']],
            ssim=[float(v) for v in obj['ssim']['values']],
            e_warp=[float(v) for v in obj['e_warp']['values']],
            e_inter=[float(v) for v in obj['e_inter']['values']],
            metadata=obj.get('metadata', {}))
    except (KeyError, TypeError, ValueError) as e:
        raise ZsvrFormatError(f"malformed metrics report: {e}")


def dumps_json(obj) -> str:
    try:
        return json.dumps(obj, indent=2, allow_nan=False) + "\n"
    except (TypeError, ValueError) as e:
        raise ZsvrSerializationError(f"cannot serialize report: {e}")


def write_json(obj, path: str) -> None:
    atomic_write_text(path, dumps_json(obj))


def write_report(metrics: ZsvrMetricsReport, path: str) -> None:
    write_json(report_to_dict(metrics), path)
    logger.info("wrote metrics report to %s", path)


def read_report(path: str) -> ZsvrMetricsReport:
    with open(path, 'r', encoding='utf-8') as f:
        try:
            obj = json.load(f)
        except json.JSONDecodeError as e:
            raise ZsvrFormatError(f"report is not valid JSON: {e}", problem_data={'file': path})
    return report_from_dict(obj)
