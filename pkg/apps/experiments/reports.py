"""
Report emission: the JSON report and the CSV table.

The CSV is the source of truth for charts. Timestamps appear only in the
JSON report's metadata.generated_at; everything else is a function of the
config and its seeds.
"""
import json
import logging
import math
import platform
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
import pandas as pd
import scipy

from apps.core_math.errors import InvalidArgument, MalformedFile

from .serializers import SCHEMA_VERSION, ReportSerializer, flatten_errors
from .sweeps import CSV_COLUMNS

logger = logging.getLogger(__name__)

CSV_FLOAT_FORMAT = '%.12g'
REQUIRED_SWEEP_COLUMNS = ('algorithm', 'n', 'p', 'status')


def environment():
    return {
        'python': platform.python_version(),
        'numpy': np.__version__,
        'scipy': scipy.__version__,
        'pandas': pd.__version__,
        'platform': platform.platform(),
    }


def json_safe(value):
    """Plain JSON types; non-finite floats become null."""
    if isinstance(value, dict):
        return {str(k): json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [json_safe(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, np.ndarray):
        return json_safe(value.tolist())
    return value


def build_report(config, cells=(), fits=(), comparison=None, lemmas=(), random_walk=None, generated_at=None):
    generated_at = generated_at or datetime.now(timezone.utc)
    report = json_safe({
        'schema_version': SCHEMA_VERSION,
        'name': config.name,
        'kind': config.kind.value,
        'config_hash': config.config_hash,
        'config': config.as_dict(),
        'environment': environment(),
        'metadata': {'generated_at': generated_at.isoformat()},
        'cells': list(cells),
        'fits': list(fits),
        'comparison': comparison,
        'lemmas': list(lemmas),
        'random_walk': random_walk,
    })
    validate_report(report)
    return report


def validate_report(report):
    serializer = ReportSerializer(data=report)
    if not serializer.is_valid():
        problems = flatten_errors(serializer.errors)
        raise InvalidArgument('report does not match schema version '
                              f'{SCHEMA_VERSION}: ' + '; '.join(f'{p}: {m}' for p, m in problems))
    return report


def write_json(report, path):
    path = Path(path)
    path.write_text(json.dumps(report, indent=2, sort_keys=True, allow_nan=False) + '\n', encoding='utf-8')
    logger.info('write_json: path=%s', path)
    return path


def sweep_frame(rows):
    return pd.DataFrame(list(rows), columns=CSV_COLUMNS)


def write_csv(frame, path):
    path = Path(path)
    frame.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator='\n')
    logger.info('write_csv: path=%s rows=%d', path, len(frame))
    return path


def read_sweep_csv(path):
    path = Path(path)
    try:
        frame = pd.read_csv(path)
    except (pd.errors.EmptyDataError, pd.errors.ParserError) as exc:
        raise MalformedFile(f'{path}: not a sweep table ({exc})') from exc
    missing = [c for c in REQUIRED_SWEEP_COLUMNS if c not in frame.columns]
    if missing:
        raise MalformedFile(f'{path}: missing sweep columns {", ".join(missing)}')
    return frame
