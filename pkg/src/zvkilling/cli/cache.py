"""Content-addressed on-disk cache for assembled matrices and derivative values.

Every entry is a text payload (sparse triplets for matrices, ``j t a b
value`` lines for derivatives) plus a JSON sidecar recording the key and
the payload's SHA-256. Loads verify the checksum.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from fractions import Fraction
from pathlib import Path
from typing import Dict, Mapping, Optional, Tuple

from ..exactla import MatrixFormatError, SparseRationalMatrix, dumps_triplets, loads_triplets

CACHE_ENV = "ZVKILLING_CACHE_DIR"
FORMAT_VERSION = 1

DerivKey = Tuple[int, int, Tuple[int, int]]


class CacheCorruptionError(RuntimeError):
    pass


def cache_key(kind: str, fields: Mapping) -> str:
    blob = json.dumps({"kind": kind, "version": FORMAT_VERSION, **fields}, sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()


def _atomic_write(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dumps_derivatives(values: Mapping[DerivKey, Fraction]) -> str:
    lines = []
    for (j, t, (a, b)) in sorted(values):
        v = values[(j, t, (a, b))]
        lines.append(f"{j} {t} {a} {b} {v.numerator}/{v.denominator}")
    return "\n".join(lines) + "\n"


def loads_derivatives(text: str) -> Dict[DerivKey, Fraction]:
    out = {}
    for ln in text.splitlines():
        if not ln.strip():
            continue
        parts = ln.split()
        if len(parts) != 5:
            raise MatrixFormatError(f"bad derivative line {ln!r}")
        j, t, a, b = (int(x) for x in parts[:4])
        out[(j, t, (a, b))] = Fraction(parts[4])
    return out


class MatrixCache:
    def __init__(self, root):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.hits = 0
        self.misses = 0

    def _paths(self, digest: str) -> Tuple[Path, Path]:
        d = self.root / digest[:2]
        return d / f"{digest}.txt", d / f"{digest}.json"

    def put(self, kind: str, fields: Mapping, payload: str) -> str:
        digest = cache_key(kind, fields)
        data, meta = self._paths(digest)
        data.parent.mkdir(exist_ok=True)
        _atomic_write(data, payload)
        info = {"kind": kind, "key": dict(fields), "sha256": hashlib.sha256(payload.encode()).hexdigest()}
        _atomic_write(meta, json.dumps(info, sort_keys=True, indent=1))
        return digest

    def get(self, kind: str, fields: Mapping) -> Optional[str]:
        digest = cache_key(kind, fields)
        data, meta = self._paths(digest)
        if not (data.exists() and meta.exists()):
            self.misses += 1
            return None
        payload = data.read_text()
        try:
            info = json.loads(meta.read_text())
        except json.JSONDecodeError as e:
            raise CacheCorruptionError(f"unreadable cache metadata {meta}: {e}") from None
        if hashlib.sha256(payload.encode()).hexdigest() != info.get("sha256"):
            raise CacheCorruptionError(f"checksum mismatch for cache entry {data}")
        self.hits += 1
        return payload

    # store protocol used by analysis.IntegralSearch

    def save_matrix(self, key: Mapping, m: SparseRationalMatrix) -> None:
        self.put("matrix", key, dumps_triplets(m))

    def load_matrix(self, key: Mapping) -> Optional[SparseRationalMatrix]:
        payload = self.get("matrix", key)
        return None if payload is None else loads_triplets(payload)

    def save_derivatives(self, key: Mapping, values: Mapping[DerivKey, Fraction]) -> None:
        self.put("derivatives", key, dumps_derivatives(values))

    def load_derivatives(self, key: Mapping) -> Dict[DerivKey, Fraction]:
        payload = self.get("derivatives", key)
        return {} if payload is None else loads_derivatives(payload)


def resolve_cache_dir(flag: Optional[str]) -> Optional[Path]:
    if flag:
        return Path(flag)
    env = os.environ.get(CACHE_ENV)
    return Path(env) if env else None
