"""Shared helpers for CLI parsing and tabular output."""
from typing import List, Optional

import json
import sys
import numpy as np
import pandas as pd

from src.utils.errors import InvalidParametersError


def parse_number_list(text: str) -> List[float]:
    """'1e1,1e7' or 'start..stop[:step]' (step defaults to start)."""
    text = text.strip()
    if '..' in text:
        start_text, rest = text.split('..', 1)
        stop_text, _, step_text = rest.partition(':')
        try:
            start, stop = float(start_text), float(stop_text)
            step = float(step_text) if step_text else start
        except ValueError:
            raise InvalidParametersError(f"bad range {text!r}") from None
        if step <= 0 or stop < start:
            raise InvalidParametersError(f"bad range {text!r}")
        count = int(np.floor((stop - start) / step + 1e-9)) + 1
        return [start + i * step for i in range(count)]
    try:
        return [float(item) for item in text.split(',') if item.strip()]
    except ValueError:
        raise InvalidParametersError(f"bad number list {text!r}") from None


def write_frame(frame: pd.DataFrame, output: Optional[str], fmt: str = 'csv'):
    """CSV with a header row, or a JSON array of row objects; floats round-trip exactly."""
    if fmt == 'json':
        rows = [{k: (float(v) if isinstance(v, (float, np.floating)) else v) for k, v in row.items()}
                for row in frame.to_dict(orient='records')]
        text = json.dumps(rows) + '\n'
    else:
        text = frame.to_csv(index=False, float_format='%.17g')
    if output:
        with open(output, 'w', newline='') as f:
            f.write(text)
    else:
        sys.stdout.write(text)
