"""Binary checkpoint format.

Layout (all integers little-endian):

    b"SCUNET"  u32 version
    u32 n      n bytes of UTF-8 JSON: {"model": UNetConfig fields, "meta": {...}}
    u32 count  tensor records: parameters, then running statistics
    u32 count  optimizer scalars as JSON (u32 length + bytes), then
               u32 count  moment records ("m.<param>", "v.<param>")
    u32        CRC-32 of everything above

Tensor record: u16 name length, name, u8 dtype tag, u8 ndim, u32 x ndim
shape, raw little-endian data. Loading parses and validates the whole file
before building anything, so a bad file never yields a partial model.
"""
from __future__ import annotations

import json
import struct
import zlib
from pathlib import Path

import numpy as np

from .errors import FormatError, ScunetError, StorageError
from .model import UNetConfig, build_unet
from .optim import AdamState

MAGIC = b"SCUNET"
VERSION = 1
_DTYPES = {1: np.dtype("<f4"), 2: np.dtype("<f8")}
_TAGS = {np.dtype(np.float32): 1, np.dtype(np.float64): 2}


def _record(name, arr):
    arr = np.asarray(arr)
    tag = _TAGS.get(arr.dtype)
    if tag is None:
        raise FormatError(f"cannot store {name}: dtype {arr.dtype} has no tag")
    raw = name.encode()
    head = struct.pack("<H", len(raw)) + raw + struct.pack("<BB", tag, arr.ndim)
    head += struct.pack(f"<{arr.ndim}I", *arr.shape)
    return head + np.ascontiguousarray(arr, dtype=_DTYPES[tag]).tobytes()


def _blob(obj):
    raw = json.dumps(obj, sort_keys=True).encode()
    return struct.pack("<I", len(raw)) + raw


def encode_checkpoint(model, optimizer=None, meta=None):
    params = model.named_parameters()
    tensors = [(k, p.data) for k, p in params.items()] + list(model.named_buffers().items())
    out = [MAGIC, struct.pack("<I", VERSION), _blob({"model": model.cfg.to_dict(), "meta": meta or {}})]
    out.append(struct.pack("<I", len(tensors)))
    out += [_record(k, v) for k, v in tensors]
    opt = optimizer
    scalars = {} if opt is None else {
        "learning_rate": opt.learning_rate, "beta1": opt.beta1, "beta2": opt.beta2,
        "epsilon": opt.epsilon, "weight_decay": opt.weight_decay, "step_count": opt.step_count,
    }
    out.append(_blob(scalars))
    moments = []
    if opt is not None and opt.m:
        names = list(params)
        moments = [(f"m.{n}", a) for n, a in zip(names, opt.m)] + [(f"v.{n}", a) for n, a in zip(names, opt.v)]
    out.append(struct.pack("<I", len(moments)))
    out += [_record(k, v) for k, v in moments]
    body = b"".join(out)
    return body + struct.pack("<I", zlib.crc32(body))


def save_checkpoint(model, optimizer, path, meta=None):
    path = Path(path)
    data = encode_checkpoint(model, optimizer, meta)
    tmp = path.with_name(path.name + ".tmp")
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp.write_bytes(data)
        tmp.replace(path)
    except OSError as exc:
        raise StorageError(f"cannot write checkpoint {path}: {exc.strerror or exc}") from exc


class _Reader:
    def __init__(self, buf, origin):
        self.buf, self.pos, self.origin = buf, 0, origin

    def take(self, n, what):
        if self.pos + n > len(self.buf):
            raise FormatError(f"{self.origin}: truncated while reading {what}")
        chunk = self.buf[self.pos:self.pos + n]
        self.pos += n
        return chunk

    def unpack(self, fmt, what):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt), what))

    def blob(self, what):
        (n,) = self.unpack("<I", what)
        try:
            return json.loads(self.take(n, what).decode())
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise FormatError(f"{self.origin}: corrupt {what}: {exc}") from None

    def record(self):
        (n,) = self.unpack("<H", "record name length")
        name = self.take(n, "record name").decode(errors="replace")
        tag, ndim = self.unpack("<BB", f"header of {name}")
        if tag not in _DTYPES:
            raise FormatError(f"{self.origin}: record {name} has unknown dtype tag {tag}")
        shape = self.unpack(f"<{ndim}I", f"shape of {name}")
        dt = _DTYPES[tag]
        count = int(np.prod(shape, dtype=np.int64))
        raw = self.take(count * dt.itemsize, f"data of {name}")
        return name, np.frombuffer(raw, dtype=dt).reshape(shape).astype(dt.newbyteorder("="))


def decode_checkpoint(buf, origin="<bytes>"):
    """Parse checkpoint bytes into (config dict, meta, tensors, optimizer scalars, moments)."""
    if buf[: len(MAGIC)] != MAGIC:
        raise FormatError(f"{origin}: bad magic bytes {buf[:len(MAGIC)]!r}, not a checkpoint")
    r = _Reader(buf, origin)
    r.take(len(MAGIC), "magic")
    (version,) = r.unpack("<I", "version")
    if version != VERSION:
        raise FormatError(f"{origin}: format version {version}, this build reads version {VERSION}")
    if len(buf) < r.pos + 4:
        raise FormatError(f"{origin}: truncated after header")
    (crc,) = struct.unpack("<I", buf[-4:])
    if zlib.crc32(buf[:-4]) != crc:
        raise FormatError(f"{origin}: checksum mismatch (truncated or corrupted file)")
    r.buf = buf[:-4]
    header = r.blob("config block")
    (n,) = r.unpack("<I", "tensor count")
    tensors = dict(r.record() for _ in range(n))
    scalars = r.blob("optimizer block")
    (k,) = r.unpack("<I", "moment count")
    moments = dict(r.record() for _ in range(k))
    if r.pos != len(r.buf):
        raise FormatError(f"{origin}: {len(r.buf) - r.pos} trailing bytes")
    if not isinstance(header, dict) or "model" not in header:
        raise FormatError(f"{origin}: config block lacks the model configuration")
    return header["model"], header.get("meta", {}), tensors, scalars, moments


def read_header(path):
    """(UNetConfig dict, meta) of a checkpoint, fully validated."""
    cfg, meta, *_ = decode_checkpoint(_read(path), str(path))
    return cfg, meta


def _read(path):
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise StorageError(f"cannot read checkpoint {path}: {exc.strerror or exc}") from exc


def load_checkpoint(path):
    """Rebuild (model, optimizer state) from a checkpoint; the model's ``meta`` is restored too."""
    cfg_dict, meta, tensors, scalars, moments = decode_checkpoint(_read(path), str(path))
    try:
        cfg = UNetConfig.from_dict(cfg_dict)
    except (TypeError, ValueError, ScunetError) as exc:
        raise FormatError(f"{path}: invalid model configuration: {exc}") from None
    model = build_unet(cfg, seed=0)
    params, buffers = model.named_parameters(), model.named_buffers()
    expected = list(params) + list(buffers)
    if sorted(tensors) != sorted(expected):
        missing = sorted(set(expected) - set(tensors))
        extra = sorted(set(tensors) - set(expected))
        raise FormatError(f"{path}: tensor set does not match the config (missing {missing}, unexpected {extra})")
    for name in expected:
        ref = params[name].data if name in params else buffers[name]
        if tensors[name].shape != ref.shape:
            raise FormatError(f"{path}: {name} has shape {tensors[name].shape}, config implies {ref.shape}")
    optimizer = None
    if scalars:
        names = list(params)
        if moments and sorted(moments) != sorted([f"m.{n}" for n in names] + [f"v.{n}" for n in names]):
            raise FormatError(f"{path}: optimizer moments do not match the parameters")
        try:
            optimizer = AdamState(**scalars)
        except (TypeError, ScunetError) as exc:
            raise FormatError(f"{path}: invalid optimizer block: {exc}") from None
        if moments:
            optimizer.m = [moments[f"m.{n}"] for n in names]
            optimizer.v = [moments[f"v.{n}"] for n in names]
    # everything validated; only now mutate the fresh model
    for name, p in params.items():
        p.data = tensors[name]
    for name in buffers:
        model.set_buffer(name, tensors[name])
    model.meta = dict(meta)
    return model, optimizer
