"""Grids, CSV formatting and all-or-nothing file output."""

from __future__ import annotations

import json
import os
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConfigError, IOFailure

FLOAT_FMT = "%.17g"


def parse_grid(spec: str) -> np.ndarray:
    """``log:a:b:n`` or ``lin:a:b:n`` to n points from a to b inclusive."""
    parts = spec.split(":")
    if len(parts) != 4 or parts[0] not in ("log", "lin"):
        raise ConfigError(f"bad grid {spec!r}; expected log:a:b:n or lin:a:b:n")
    try:
        a, b = float(parts[1]), float(parts[2])
        n = int(parts[3])
    except ValueError:
        raise ConfigError(f"bad grid {spec!r}; a and b must be numbers, n an integer") from None
    if n < 1 or not (np.isfinite(a) and np.isfinite(b)):
        raise ConfigError(f"bad grid {spec!r}; need finite bounds and n >= 1")
    if n == 1:
        return np.array([a])
    if parts[0] == "lin":
        return np.linspace(a, b, n)
    if a <= 0 or b <= 0:
        raise ConfigError(f"log grid {spec!r} needs positive bounds")
    return np.geomspace(a, b, n)


def fmt(x) -> str:
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    if isinstance(x, str):
        return x
    return FLOAT_FMT % float(x)


def csv_text(header, rows, meta: dict, footer: dict | None = None) -> str:
    """CSV with ``#`` metadata lines above the header and optional ones after the rows."""
    lines = [f"# rmblock {__version__}"]
    lines += [f"# {k}: {_meta_value(v)}" for k, v in meta.items()]
    lines.append(",".join(header))
    lines += [",".join(fmt(v) for v in row) for row in rows]
    if footer:
        lines += [f"# {k}: {_meta_value(v)}" for k, v in footer.items()]
    return "\n".join(lines) + "\n"


def _meta_value(v):
    if isinstance(v, dict):
        return json.dumps(v, sort_keys=True)
    if isinstance(v, float):
        return fmt(v)
    return str(v)


class Outputs:
    """Collect files and write them only when the whole run succeeded.

    If any write fails, every file written by this set is removed again.
    """

    def __init__(self):
        self.files: list[tuple[Path, bytes]] = []

    def add(self, path, text: str | bytes):
        data = text.encode("utf-8") if isinstance(text, str) else text
        self.files.append((Path(path), data))

    def commit(self):
        done = []
        try:
            for path, data in self.files:
                tmp = path.with_name(path.name + ".part")
                tmp.write_bytes(data)
                os.replace(tmp, path)
                done.append(path)
        except OSError as e:
            for p in done:
                p.unlink(missing_ok=True)
            for path, _ in self.files:
                path.with_name(path.name + ".part").unlink(missing_ok=True)
            raise IOFailure(f"cannot write {e.filename}: {e.strerror}") from e
        return [p for p, _ in self.files]
