"""Reading seeds and matrices from JSON files, writing reports."""

from __future__ import annotations

import csv
import io
import json
import re
from pathlib import Path

from .errors import SympIndexError
from .forms import EPS_SYM_USER, IndexSeed, SymplecticMatrix


class InputError(SympIndexError, ValueError):
    """A file could not be read or does not match its schema."""


_QUOTED = re.compile(r"'([A-Za-z_][A-Za-z0-9_]*)'")


def _line_of(text: str, message: str, start: int = 0) -> int | None:
    """Line of the first JSON key named in ``message`` at or after offset ``start``."""
    for name in _QUOTED.findall(message):
        pos = text.find(f'"{name}"', start)
        if pos >= 0:
            return text.count("\n", 0, pos) + 1
    return None


def read_json(path) -> tuple[object, str]:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise InputError(f"{p}: cannot read ({exc.strerror})") from exc
    try:
        return json.loads(text), text
    except json.JSONDecodeError as exc:
        raise InputError(f"{p}:{exc.lineno}: invalid JSON: {exc.msg}") from exc


def _items(obj, key: str) -> list:
    if isinstance(obj, list):
        return obj
    if isinstance(obj, dict) and key in obj:
        if not isinstance(obj[key], list):
            raise InputError(f"field '{key}' must be a list")
        return obj[key]
    return [obj]


def _item_offsets(text: str, count: int, anchor: str) -> list[int]:
    # start offsets of successive objects, located by a key every object carries
    offs, pos = [], 0
    for _ in range(count):
        hit = text.find(f'"{anchor}"', pos)
        if hit < 0:
            hit = pos
        offs.append(hit)
        pos = hit + 1
    return offs


def load_seeds(path) -> list[IndexSeed]:
    """Seeds from a file holding one seed, a list, or ``{"seeds": [...]}``."""
    obj, text = read_json(path)
    items = _items(obj, "seeds")
    offsets = _item_offsets(text, len(items), "n")
    out = []
    for k, (item, off) in enumerate(zip(items, offsets)):
        try:
            seed = IndexSeed.from_json(item)
        except (SympIndexError, TypeError, ValueError) as exc:
            line = _line_of(text, str(exc), off)
            where = f"{path}:{line}" if line else f"{path}"
            raise InputError(f"{where}: seed {k}: {exc}") from exc
        if not seed.label:
            seed = IndexSeed(seed.n, seed.i1, seed.counts, label=f"seed{k}")
        out.append(seed)
    return out


def load_matrices(path, tol: float = EPS_SYM_USER) -> list[SymplecticMatrix]:
    """Matrices from a file holding one matrix, a list, or ``{"matrices": [...]}``."""
    obj, text = read_json(path)
    items = _items(obj, "matrices")
    offsets = _item_offsets(text, len(items), "rows")
    out = []
    for k, (item, off) in enumerate(zip(items, offsets)):
        try:
            out.append(SymplecticMatrix.from_json(item, tol=tol))
        except (SympIndexError, TypeError, ValueError) as exc:
            line = _line_of(text, str(exc) + " 'rows'", off)
            where = f"{path}:{line}" if line else f"{path}"
            raise InputError(f"{where}: matrix {k}: {exc}") from exc
    return out


def dumps_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def dumps_csv(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()


__all__ = ["InputError", "dumps_csv", "dumps_json", "load_matrices", "load_seeds", "read_json"]
