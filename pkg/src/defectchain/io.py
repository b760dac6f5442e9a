"""Deterministic file output: JSON with fixed float formatting, provenance blocks, Matrix Market.

Floats are written with 17 significant digits (``'%.17g'``), which round-trips every
IEEE double and makes the output a pure function of the data. Dictionary keys keep
insertion order; no timestamps or host information are recorded, so identical inputs
give byte-identical files.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from pathlib import Path

import numpy as np
import scipy.io

from .bimodule import Bimodule, vec_zp_bimodule
from .chain import ChainOperator
from .fusion import FusionCategory, ising, vec_zp

__all__ = ['format_float', 'dumps', 'config_hash', 'provenance', 'write_json', 'read_json',
           'resolve_category', 'resolve_bimodule', 'write_matrix_market', 'read_matrix_market']


def format_float(x: float) -> str:
    """17 significant digits; integral values keep a trailing ``.0`` so they re-read as floats."""
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite float {x!r}")
    s = format(x, '.17g')
    if not any(ch in s for ch in '.en'):
        s += '.0'
    return s


def _encode(obj, indent: int, level: int) -> str:
    pad = '\n' + ' ' * (indent * (level + 1))
    end = '\n' + ' ' * (indent * level)
    if obj is None or isinstance(obj, (bool, str)):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(obj)
    if isinstance(obj, complex):
        return _encode([obj.real, obj.imag], indent, level)
    if isinstance(obj, dict):
        if not obj:
            return '{}'
        items = [json.dumps(str(k), ensure_ascii=False) + ': ' + _encode(v, indent, level + 1)
                 for k, v in obj.items()]
        return '{' + pad + (',' + pad).join(items) + end + '}'
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return '[]'
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq):
            return '[' + ', '.join(_encode(v, indent, level + 1) for v in seq) + ']'
        return '[' + pad + (',' + pad).join(_encode(v, indent, level + 1) for v in seq) + end + ']'
    if hasattr(obj, 'to_json'):
        return _encode(obj.to_json(), indent, level)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    """Serialize ``obj`` to JSON text with :func:`format_float` for every float."""
    return _encode(obj, indent, 0) + '\n'


def config_hash(config) -> str:
    """SHA-256 of the canonical (sorted-key, compact) JSON form of ``config``."""
    canon = json.dumps(json.loads(dumps(config)), sort_keys=True, separators=(',', ':'))
    return hashlib.sha256(canon.encode()).hexdigest()


def provenance(config) -> dict:
    from . import __version__
    return {'tool': 'defectchain', 'version': __version__, 'config_sha256': config_hash(config)}


def write_json(path, payload: dict, config=None) -> Path:
    """Write ``payload`` preceded by a ``"provenance"`` block derived from ``config``."""
    path = Path(path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    doc = {'provenance': provenance(config if config is not None else {})}
    doc.update(payload)
    path.write_text(dumps(doc))
    return path


def read_json(path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def resolve_category(spec) -> FusionCategory:
    """Builtin name (``'vecz<p>'``, ``'ising'``, ``'ising+1'``, ``'ising-1'``) or a JSON file path."""
    if isinstance(spec, FusionCategory):
        return spec
    s = str(spec).strip()
    low = s.lower()
    if low.startswith('vecz') and low[4:].isdigit():
        return vec_zp(int(low[4:]))
    if low in ('ising', 'ising+', 'ising+1', 'ising1'):
        return ising(1)
    if low in ('ising-', 'ising-1'):
        return ising(-1)
    if os.path.exists(s):
        return FusionCategory.from_json(read_json(s))
    raise FileNotFoundError(f"unknown category {spec!r} (not a builtin name or existing file)")


def resolve_bimodule(spec, category: FusionCategory | None = None) -> Bimodule:
    """``'F1'``-style catalog name over ``category`` (``'vecz2:F1'`` also accepted) or a JSON path."""
    if isinstance(spec, Bimodule):
        return spec
    s = str(spec).strip()
    if os.path.exists(s):
        return Bimodule.from_json(read_json(s))
    if ':' in s:
        cat, name = s.split(':', 1)
        category = resolve_category(cat)
    else:
        name = s
    if category is None:
        raise ValueError("a catalog bimodule name needs a category (use 'vecz<p>:<name>')")
    p = len(category.labels)
    if not category.same_data(vec_zp(p, category.order)):
        raise ValueError("catalog bimodules exist only over Vec(Z/pZ)")
    return vec_zp_bimodule(p, name, order=category.order)


def write_matrix_market(path, op: ChainOperator, config=None) -> tuple[Path, Path]:
    """Write ``op.matrix`` in Matrix Market format and a sidecar ``<stem>.basis.json``.

    The matrix is written as ``real`` when all imaginary parts vanish.
    """
    path = Path(path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    m = op.matrix.tocoo()
    if m.nnz == 0 or not np.any(m.data.imag):
        m = m.real.tocoo()
    scipy.io.mmwrite(str(path), m, comment=f"defectchain {op.metadata.get('model', '')}", precision=17)
    side = path.with_suffix('.basis.json')
    write_json(side, {'basis': op.basis.to_json(), 'metadata': op.metadata}, config)
    return path, side


def read_matrix_market(path):
    """Read a Matrix Market file (and its sidecar metadata, if present) → ``(csr matrix, metadata)``."""
    path = Path(path)
    m = scipy.io.mmread(str(path)).tocsr()
    side = path.with_suffix('.basis.json')
    meta = read_json(side) if side.exists() else {}
    return m, meta
