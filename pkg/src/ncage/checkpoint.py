"""Binary training checkpoints.

A checkpoint captures everything needed to restart training mid-run and
reproduce the uninterrupted trajectory bit for bit: model config, step
counter, current learning rate, optimizer moments, weights, and the seed
bookkeeping for the data order. The on-disk format is little-endian and
fully deterministic, so saving the same state twice yields identical
bytes. See docs/checkpoint_format.md for the exact layout.
"""

import hashlib
import json
import struct
from dataclasses import dataclass

import numpy as np

from .errors import CheckpointError

MAGIC = b"NCAGECK1"
VERSION = 1


@dataclass
class Checkpoint:
    config: dict          # model architecture + centrality
    step: int             # nodes consumed so far
    eta: float            # learning rate after the last completed batch
    adam_t: int           # optimizer step counter
    weights: dict         # name -> (rows, cols) float64
    adam_m: dict
    adam_v: dict
    rng: dict             # data-order derivation info (seeds, scheme tag)

    @property
    def model_kind(self):
        return self.config["model"]

    @property
    def centrality(self):
        return self.config["centrality"]


def _json_bytes(obj):
    return json.dumps(obj, sort_keys=True, separators=(",", ":")).encode("utf-8")


def _write_blob(fh, payload):
    fh.write(struct.pack("<I", len(payload)))
    fh.write(payload)


def save(ckpt, path):
    names = sorted(ckpt.weights)
    if sorted(ckpt.adam_m) != names or sorted(ckpt.adam_v) != names:
        raise CheckpointError("weight and optimizer moment names differ")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", VERSION))
        fh.write(struct.pack("<Q", ckpt.step))
        fh.write(struct.pack("<d", ckpt.eta))
        fh.write(struct.pack("<Q", ckpt.adam_t))
        _write_blob(fh, _json_bytes(ckpt.config))
        fh.write(struct.pack("<I", len(names)))
        for name in names:
            w = np.ascontiguousarray(ckpt.weights[name], dtype="<f8")
            if w.ndim != 2:
                raise CheckpointError(f"{name}: weights must be 2-D")
            if ckpt.adam_m[name].shape != w.shape or ckpt.adam_v[name].shape != w.shape:
                raise CheckpointError(f"{name}: moment shapes differ from weights")
            _write_blob(fh, name.encode("utf-8"))
            fh.write(struct.pack("<QQ", w.shape[0], w.shape[1]))
            fh.write(w.tobytes())
            fh.write(np.ascontiguousarray(ckpt.adam_m[name], dtype="<f8").tobytes())
            fh.write(np.ascontiguousarray(ckpt.adam_v[name], dtype="<f8").tobytes())
        _write_blob(fh, _json_bytes(ckpt.rng))


def _read_exact(fh, count, what):
    data = fh.read(count)
    if len(data) != count:
        raise CheckpointError(f"truncated file while reading {what}")
    return data


def _read_blob(fh, what):
    (length,) = struct.unpack("<I", _read_exact(fh, 4, f"{what} length"))
    return _read_exact(fh, length, what)


def load(path):
    with open(path, "rb") as fh:
        magic = _read_exact(fh, 8, "magic")
        if magic != MAGIC:
            raise CheckpointError(f"not a checkpoint file: bad magic {magic!r}")
        (version,) = struct.unpack("<I", _read_exact(fh, 4, "version"))
        if version != VERSION:
            raise CheckpointError(f"unsupported checkpoint version {version}")
        (step,) = struct.unpack("<Q", _read_exact(fh, 8, "step"))
        (eta,) = struct.unpack("<d", _read_exact(fh, 8, "eta"))
        (adam_t,) = struct.unpack("<Q", _read_exact(fh, 8, "adam_t"))
        try:
            config = json.loads(_read_blob(fh, "config"))
        except ValueError as exc:
            raise CheckpointError(f"corrupt config block: {exc}")
        (count,) = struct.unpack("<I", _read_exact(fh, 4, "param count"))
        weights, adam_m, adam_v = {}, {}, {}
        prev = None
        for _ in range(count):
            name = _read_blob(fh, "param name").decode("utf-8")
            if prev is not None and name <= prev:
                raise CheckpointError("parameter blocks out of order")
            prev = name
            rows, cols = struct.unpack("<QQ", _read_exact(fh, 16, f"{name} shape"))
            size = rows * cols * 8
            for store, part in ((weights, "weights"), (adam_m, "adam m"), (adam_v, "adam v")):
                raw = _read_exact(fh, size, f"{name} {part}")
                store[name] = np.frombuffer(raw, dtype="<f8").reshape(rows, cols).copy()
        try:
            rng = json.loads(_read_blob(fh, "rng state"))
        except ValueError as exc:
            raise CheckpointError(f"corrupt rng block: {exc}")
        if fh.read(1):
            raise CheckpointError("trailing bytes after checkpoint payload")
    return Checkpoint(config=config, step=step, eta=eta, adam_t=adam_t,
                      weights=weights, adam_m=adam_m, adam_v=adam_v, rng=rng)


def checkpoint_hash(path):
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()
