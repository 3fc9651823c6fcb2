#!/usr/bin/env python3
"""
Summarise a sweep CSV and optionally write a gnuplot script for it.

    python scripts/sweep_summary.py sweep.csv [plot.gp]
"""

import csv
import math
import sys
from dataclasses import dataclass
from pathlib import Path

COLUMNS = ('param', 'value', 'sigma_ea', 'sigma_exact', 'rel_diff', 'ea_valid_flag')


def _number(value):
    if value is None or value == '':
        return None
    try:
        return float(value)
    except (TypeError, ValueError):
        return None


@dataclass
class SweepSummary:
    param: str
    points: int
    failed: int
    max_rel_diff: float
    mean_rel_diff: float
    worst_value: float

    def text(self):
        if math.isnan(self.max_rel_diff):
            comparison = 'no EA/exact comparison available'
        else:
            comparison = (f"max rel_diff {self.max_rel_diff:.3%} at {self.param} = {self.worst_value:g}, "
                          f"mean {self.mean_rel_diff:.3%}")
        return f"{self.points} points over {self.param} ({self.failed} failed): {comparison}"


def summarise(rows):
    """Summary of sweep rows given as tuples in COLUMNS order."""
    param = rows[0][0] if rows else ''
    failed = 0
    diffs = []
    for _, value, sigma_ea, sigma_exact, rel_diff, _ in rows:
        numbers = [_number(v) for v in (sigma_ea, sigma_exact, rel_diff)]
        if any(n is not None and math.isnan(n) for n in numbers):
            failed += 1
            continue
        if numbers[2] is not None:
            diffs.append((numbers[2], _number(value)))
    if diffs:
        worst, worst_value = max(diffs)
        mean = sum(d for d, _ in diffs) / len(diffs)
    else:
        worst = mean = worst_value = math.nan
    return SweepSummary(param=param, points=len(rows), failed=failed,
                        max_rel_diff=worst, mean_rel_diff=mean, worst_value=worst_value)


def read_sweep_csv(path):
    """Data rows of a sweep CSV, skipping the '#' metadata header and the column row."""
    with open(path, newline='', encoding='utf-8') as handle:
        lines = [line for line in handle if line.strip() and not line.startswith('#')]
    reader = csv.reader(lines)
    if next(reader, None) is None:
        return []
    return [tuple(row) for row in reader]


def write_gnuplot_script(csv_path, script_path, title=None):
    """gnuplot script plotting sigma_ea and sigma_exact against the swept value."""
    rows = read_sweep_csv(csv_path)
    param = rows[0][0] if rows else 'value'
    script = "\n".join([
        "set datafile separator ','",
        "set datafile missing 'NaN'",
        f"set title '{title or param}'",
        f"set xlabel '{param}'",
        "set ylabel 'sigma_tot'",
        "set key top left",
        f"plot '{csv_path}' using 2:3 every ::1 with linespoints title 'EA', \\",
        f"     '{csv_path}' using 2:4 every ::1 with points pointtype 5 title 'exact'",
        "",
    ])
    Path(script_path).write_text(script, encoding='utf-8')
    return script_path


if __name__ == "__main__":
    if len(sys.argv) < 2:
        print("Usage: python sweep_summary.py <sweep.csv> [plot.gp]")
        sys.exit(1)

    csv_file = sys.argv[1]
    print(summarise(read_sweep_csv(csv_file)).text())
    if len(sys.argv) > 2:
        write_gnuplot_script(csv_file, sys.argv[2])
        print(f"gnuplot script written to {sys.argv[2]}")
