import io
import sys
import json
import math
import pandas as pd
from colorama import Fore

from src.expsums import CORE_KEYS
from src.scanner import say

CSV_COLUMNS = ['identity', 'q', 'chi', 'psi', 'm1', 'm2', 'm3', 'r', 'extra',
               'left_re', 'left_im', 'right_re', 'right_im', 'residual', 'scale', 'passed', 'soft']

FORMATS = ('json', 'csv')


def format_float(value):
    """17 significant digits, always recognisable as a float."""
    value = float(value)
    if not math.isfinite(value):
        return json.dumps(str(value))
    text = format(value, '.17g')
    if not any(c in text for c in '.en'):
        text += '.0'
    return text


def encode(value):
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format_float(value)
    if isinstance(value, dict):
        return encode_object(value)
    if value is None:
        return 'null'
    return json.dumps(str(value))


def encode_object(record):
    return '{' + ', '.join(f'{json.dumps(str(k))}: {encode(v)}'
                           for k, v in sorted(record.items())) + '}'


def summary_record(summary):
    return dict(summary, identity='summary')


def render_json(reports, summary=None):
    lines = [encode_object(r.to_row()) for r in reports]
    if summary is not None:
        lines.append(encode_object(summary_record(summary)))
    return ''.join(line + '\n' for line in lines)


def _csv_row(row):
    out = {key: row.get(key) for key in CSV_COLUMNS if key != 'extra'}
    extra = {k: v for k, v in row.items() if k not in CSV_COLUMNS and k not in CORE_KEYS}
    out['extra'] = encode_object(extra) if extra else None
    for key, value in out.items():
        if isinstance(value, bool):
            out[key] = 'true' if value else 'false'
        elif isinstance(value, float):
            out[key] = format_float(value)
    return out


def render_csv(reports, summary=None):
    rows = [_csv_row(r.to_row()) for r in reports]
    if summary is not None:
        rows.append(_csv_row(summary_record(summary)))
    df = pd.DataFrame(rows, columns=CSV_COLUMNS, dtype=object)
    buffer = io.StringIO()
    df.to_csv(buffer, index=False, lineterminator='\n')
    return buffer.getvalue()


def report_emit(reports, fmt='json', summary=None):
    """The report stream as bytes: JSON lines or CSV, in the order given."""
    if fmt == 'json':
        return render_json(reports, summary).encode('utf-8')
    if fmt == 'csv':
        return render_csv(reports, summary).encode('utf-8')
    raise ValueError(f"unknown report format {fmt!r}")


class ReportWriter:
    def __init__(self, fmt='json', out=None, quiet=False):
        self.fmt = fmt
        self.out = out
        self.quiet = quiet

    def write(self, reports, summary=None):
        payload = report_emit(reports, self.fmt, summary)
        if self.out:
            with open(self.out, 'wb') as f:
                f.write(payload)
            say(f"[*] Wrote {len(reports)} reports to {self.out}", Fore.YELLOW, self.quiet)
        else:
            sys.stdout.buffer.write(payload)
            sys.stdout.flush()
        return payload

    def print_failure(self, report):
        """The first hard failure, in red, ahead of the stream."""
        say(f"[!] FAILED {report.identity}: {report.param_string()}", Fore.RED, self.quiet)
        say(f"    left     : {report.left}", Fore.RED, self.quiet)
        say(f"    right    : {report.right}", Fore.RED, self.quiet)
        say(f"    residual : {report.residual:.3e} (scale {report.scale:.3e})", Fore.RED, self.quiet)
