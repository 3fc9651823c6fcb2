"""
CSV and JSON result files.

CSV files start with ``#`` metadata lines (resolved config, tolerance
profile, solver metadata, one timestamp line), then the mandatory header
row. Failed values are written as ``NaN``. Apart from the ``# generated``
line the output depends only on the configuration.
"""
from __future__ import annotations

import csv
import io
import json
import logging
import math
from pathlib import Path

from django.core.serializers.json import DjangoJSONEncoder
from django.utils import timezone

import floquetea

logger = logging.getLogger(__name__)

NAN = 'NaN'
TIMESTAMP_PREFIX = '# generated = '

SIGMA_COLUMNS = ('method', 'U0', 'U1', 'omega', 'k', 'sigma_tot', 'l_max', 'n_max', 'residual', 'warning')
SWEEP_COLUMNS = ('param', 'value', 'sigma_ea', 'sigma_exact', 'rel_diff', 'ea_valid_flag')
AMPLITUDE_COLUMNS = ('n', 'theta', 'method', 're_f', 'im_f')


def format_value(value):
    if value is None:
        return ''
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, float):
        return NAN if math.isnan(value) else repr(float(value))
    return str(value)


def _json_value(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, complex):
        return [_json_value(value.real), _json_value(value.imag)]
    if isinstance(value, dict):
        return {str(key): _json_value(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_value(item) for item in value]
    return value


class ResultWriter:
    """Single writer for one result table; rows arrive in their final order.

    ``metadata`` is an ordered mapping of section -> {key: value}. With
    ``path=None`` the table goes to ``stream``.
    """

    def __init__(self, columns, metadata, path=None, stream=None, fmt='csv'):
        if fmt not in ('csv', 'json'):
            raise ValueError(f"Unknown output format {fmt!r}")
        self.columns = tuple(columns)
        self.metadata = metadata
        self.path = Path(path) if path else None
        self.stream = stream
        self.fmt = fmt
        self.rows = []

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc_type is None:
            self.flush()
        return False

    def write_row(self, row):
        if len(row) != len(self.columns):
            raise ValueError(f"Row has {len(row)} values for {len(self.columns)} columns")
        self.rows.append(tuple(row))

    def render(self):
        if self.fmt == 'json':
            return self._render_json()
        return self._render_csv()

    def _render_csv(self):
        lines = [f"# floquetea = {floquetea.__version__}",
                 f"{TIMESTAMP_PREFIX}{timezone.now().isoformat()}"]
        for section, values in self.metadata.items():
            for key, value in values.items():
                lines.append(f"# {section}.{key} = {format_value(value)}")

        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator='\n')
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([format_value(value) for value in row])
        return '\n'.join(lines) + '\n' + buffer.getvalue()

    def _render_json(self):
        document = {
            'version': floquetea.__version__,
            'generated': timezone.now(),
            'metadata': _json_value(self.metadata),
            'columns': list(self.columns),
            'rows': [dict(zip(self.columns, _json_value(list(row)))) for row in self.rows],
        }
        return json.dumps(document, cls=DjangoJSONEncoder, indent=2) + '\n'

    def flush(self):
        text = self.render()
        if self.path is not None:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            self.path.write_text(text, encoding='utf-8')
            logger.info("Wrote %d rows to %s", len(self.rows), self.path)
        elif self.stream is not None:
            self.stream.write(text)


def read_table(path):
    """Metadata dict and list of row dicts of a CSV written by ResultWriter."""
    metadata = {}
    body = []
    for line in Path(path).read_text(encoding='utf-8').splitlines():
        if line.startswith('#'):
            key, _, value = line[1:].partition('=')
            metadata[key.strip()] = value.strip()
        elif line:
            body.append(line)
    return metadata, list(csv.DictReader(body))
