"""
Phase file reader and writer.

Layout (all little-endian):
    header   magic "PHFN", uint32 version, f8 lambda, f8 a, f8 b, uint32 n, uint32 m
    f8[n+1]  breakpoints
    f8[n, m+1] x 5   alpha, alphap, alphapp, r, rp (one row per interval)

A JSON sidecar ``<path>.json`` repeats the header, names the problem and
carries a SHA-256 checksum per table.
"""
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

import json
import struct
import numpy as np

from src.core.kummer import PhaseFunction
from src.utils.constants import PHASE_FILE_MAGIC, PHASE_FILE_VERSION, PHASE_FUNCTIONS
from src.utils.errors import PhaseFileError
from src.utils.hashing import metadata_hash, table_hash, verify_tables
from src.utils.logging import get_logger

logger = get_logger(__name__)

HEADER = struct.Struct('<4sIdddII')


def sidecar_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.name + '.json')


def _header_metadata(phase: PhaseFunction) -> Dict[str, Any]:
    return {
        'version': PHASE_FILE_VERSION,
        'lambda': phase.lam,
        'a': phase.a,
        'b': phase.b,
        'intervals': phase.n_intervals,
        'order': phase.m,
    }


def write_phase_file(path, phase: PhaseFunction, problem: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    """Write the binary file and its sidecar; returns the sidecar contents."""
    path = Path(path)
    tables = phase.tables()
    with open(path, 'wb') as f:
        f.write(HEADER.pack(PHASE_FILE_MAGIC, PHASE_FILE_VERSION, phase.lam, phase.a, phase.b,
                            phase.n_intervals, phase.m))
        f.write(np.ascontiguousarray(phase.breakpoints, dtype='<f8').tobytes())
        for name in PHASE_FUNCTIONS:
            f.write(np.ascontiguousarray(tables[name], dtype='<f8').tobytes())

    header = _header_metadata(phase)
    sidecar = {
        **header,
        'header_sha256': metadata_hash(header),
        'functions': list(PHASE_FUNCTIONS),
        'breakpoints_sha256': table_hash(phase.breakpoints),
        'checksums': {name: table_hash(tables[name]) for name in PHASE_FUNCTIONS},
        'problem': problem or {'name': 'custom', 'params': {}},
    }
    with open(sidecar_path(path), 'w') as f:
        json.dump(sidecar, f, indent=2, sort_keys=True)

    logger.info("Phase file written", path=str(path), intervals=phase.n_intervals, order=phase.m)
    return sidecar


def read_phase_file(path, verify: bool = True) -> Tuple[PhaseFunction, Optional[Dict[str, Any]]]:
    """Read a phase file; checksums are verified when the sidecar exists."""
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as e:
        raise PhaseFileError(f"cannot read phase file {path}: {e}") from e
    if len(data) < HEADER.size:
        raise PhaseFileError(f"{path}: truncated header")

    magic, version, lam, a, b, n, m = HEADER.unpack_from(data)
    if magic != PHASE_FILE_MAGIC:
        raise PhaseFileError(f"{path}: not a phase file")
    if version != PHASE_FILE_VERSION:
        raise PhaseFileError(f"{path}: unsupported version {version}")
    expected = HEADER.size + 8 * ((n + 1) + len(PHASE_FUNCTIONS) * n * (m + 1))
    if len(data) != expected:
        raise PhaseFileError(f"{path}: expected {expected} bytes, found {len(data)}")

    offset = HEADER.size
    bp = np.frombuffer(data, dtype='<f8', count=n + 1, offset=offset).astype(float)
    offset += 8 * (n + 1)
    tables = {}
    for name in PHASE_FUNCTIONS:
        tables[name] = np.frombuffer(data, dtype='<f8', count=n * (m + 1),
                                     offset=offset).astype(float).reshape(n, m + 1)
        offset += 8 * n * (m + 1)

    sidecar = None
    side = sidecar_path(path)
    if side.exists():
        with open(side) as f:
            sidecar = json.load(f)
        if verify and not verify_tables(tables, sidecar.get('checksums', {})):
            raise PhaseFileError(f"{path}: node tables do not match sidecar checksums")

    if bp[0] != a or bp[-1] != b:
        raise PhaseFileError(f"{path}: breakpoints disagree with header interval")
    return PhaseFunction.from_tables(lam, bp, m, tables), sidecar
