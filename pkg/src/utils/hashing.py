"""Checksums for phase file integrity."""
import hashlib
import json
from typing import Dict, Any

import numpy as np

def table_hash(table: np.ndarray) -> str:
    """
    SHA-256 of a float64 node table in little-endian byte order.
    """
    data = np.ascontiguousarray(table, dtype='<f8').tobytes()
    return hashlib.sha256(data).hexdigest()

def metadata_hash(metadata: Dict[str, Any]) -> str:
    """SHA-256 of canonical JSON metadata."""
    canonical_json = json.dumps(metadata, sort_keys=True)
    return hashlib.sha256(canonical_json.encode('utf-8')).hexdigest()

def verify_tables(tables: Dict[str, np.ndarray], checksums: Dict[str, str]) -> bool:
    """Verify every node table against its recorded checksum."""
    for name, table in tables.items():
        if checksums.get(name) != table_hash(table):
            return False
    return True
