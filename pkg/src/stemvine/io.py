"""File helpers: atomic output and weight directories."""
from __future__ import annotations

import os
import sys
import tempfile
from pathlib import Path

from .archio import Architecture
from .errors import FormatError
from .linalg import read_matrix, write_matrix


def atomic_write(path, data) -> None:
    """Write ``data`` (str or bytes) to ``path`` via a temp file and rename; ``-`` means stdout."""
    if str(path) == "-":
        if isinstance(data, bytes):
            sys.stdout.buffer.write(data)
        else:
            sys.stdout.write(data)
        sys.stdout.flush()
        return
    path = Path(path)
    raw = data.encode("utf-8") if isinstance(data, str) else data
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(raw)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_weights(directory, weights: dict, refs: dict | None = None) -> None:
    """Store ``<slot>.svm`` and, when given, ``<slot>.ref.svm`` for every slot."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for sid, w in weights.items():
        write_matrix(directory / f"{sid}.svm", w)
    for sid, r in (refs or {}).items():
        write_matrix(directory / f"{sid}.ref.svm", r)


def load_weights(arch: Architecture, base_dir=".", weights_dir=None) -> tuple[dict, dict]:
    """Weights and references for every slot of ``arch``.

    Paths listed in the architecture's ``weights`` table are resolved against
    ``base_dir``. Other slots are looked up as ``<slot>.svm`` (and optionally
    ``<slot>.ref.svm``) in ``weights_dir``. A missing reference means zero.
    """
    base_dir = Path(base_dir)
    weights, refs = {}, {}
    for info in arch.network.weight_slots():
        sid = info.slot_id
        entry = arch.weight_refs.get(sid)
        if entry is not None:
            if "weight" not in entry:
                raise FormatError(f"weights.{sid} has no 'weight' path")
            w_path = base_dir / entry["weight"]
            r_path = base_dir / entry["reference"] if "reference" in entry else None
        elif weights_dir is not None:
            w_path = Path(weights_dir) / f"{sid}.svm"
            r_path = Path(weights_dir) / f"{sid}.ref.svm"
            if not r_path.exists():
                r_path = None
        else:
            raise FormatError(f"no weight file for slot {sid}")
        if not w_path.exists():
            raise FormatError(f"missing weight file {w_path}")
        weights[sid] = read_matrix(w_path)
        if r_path is not None:
            refs[sid] = read_matrix(r_path)
    return weights, refs
