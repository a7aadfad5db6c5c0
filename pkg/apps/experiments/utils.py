"""
Output formatting for experiment commands.

CSV outputs start with one comment line carrying the schema version and the
config echo, then a header row:

    # groupsketch schema=1 config={"n": 16, ...}
    p,surjection,...

JSON outputs are objects with ``schema_version`` and ``config`` keys next to
the command's payload. Both can be fed back with ``--replay``.
"""
import csv
import io
import json
import logging
import os
import tempfile
from pathlib import Path

import numpy as np
from django.conf import settings

logger = logging.getLogger(__name__)

CSV_PREFIX = '# groupsketch '


def _to_builtin(value):
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"{type(value).__name__} is not JSON serializable")


def dump_config(config):
    """Canonical single-line JSON of a config."""
    return json.dumps(config, sort_keys=True, separators=(',', ':'), default=_to_builtin)


def format_csv(rows, columns, config):
    """
    Render rows as CSV under the schema/config comment line.

    Args:
        rows: iterable of dicts
        columns: header, in order; missing keys are left empty
        config: validated config echoed in the comment line
    """
    buffer = io.StringIO()
    buffer.write(f"{CSV_PREFIX}schema={settings.GROUPSKETCH['SCHEMA_VERSION']} config={dump_config(config)}\n")
    writer = csv.DictWriter(buffer, fieldnames=columns, extrasaction='ignore', lineterminator='\n')
    writer.writeheader()
    for row in rows:
        writer.writerow({key: _cell(value) for key, value in row.items()})
    return buffer.getvalue()


def _cell(value):
    if value is None:
        return ''
    if isinstance(value, (np.generic, np.ndarray)):
        return _to_builtin(value)
    return value


def format_json(payload, config):
    document = {'schema_version': settings.GROUPSKETCH['SCHEMA_VERSION'], 'config': config, **payload}
    return json.dumps(document, sort_keys=True, indent=2, default=_to_builtin) + '\n'


def write_output(text, path=None, stream=None):
    """
    Write ``text`` to ``path`` atomically, or to ``stream`` when no path is given.
    """
    if path is None:
        stream.write(text)
        return

    path = Path(path)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=f'.{path.name}.')
    try:
        with os.fdopen(fd, 'w', encoding='utf-8', newline='') as fh:
            fh.write(text)
        os.replace(tmp_name, path)
    except BaseException:
        Path(tmp_name).unlink(missing_ok=True)
        raise

    logger.info(f"Wrote {path}")


def read_config(path):
    """
    Config echo embedded in a previous CSV or JSON output.

    Raises:
        ValueError: when the file carries no readable config
    """
    text = Path(path).read_text(encoding='utf-8')

    if text.startswith(CSV_PREFIX):
        first_line = text.split('\n', 1)[0]
        head, sep, payload = first_line.partition(' config=')
        if not sep:
            raise ValueError(f"{path}: comment line has no config")
        schema = head[len(CSV_PREFIX):].removeprefix('schema=')
        config = json.loads(payload)
    else:
        document = json.loads(text)
        if not isinstance(document, dict):
            raise ValueError(f"{path}: expected a JSON object")
        schema, config = document.get('schema_version'), document.get('config')

    if not isinstance(config, dict):
        raise ValueError(f"{path}: no config echo found")
    if str(schema) != str(settings.GROUPSKETCH['SCHEMA_VERSION']):
        logger.warning(f"{path} was written with schema {schema}; replaying with schema {settings.GROUPSKETCH['SCHEMA_VERSION']}")

    logger.info(f"Replaying config from {path}")
    return config
