"""Sweep CSV I/O and a minimal text SVG line-plot writer."""

from __future__ import annotations

import csv
import io
import math
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from xml.sax.saxutils import escape

CSV_COLUMNS = ("eta", "s", "n_eff", "r", "n", "chi_out", "chi_eve", "i_p", "feasible")
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf")


class CsvFormatError(ValueError):
    def __init__(self, path, line: int, msg: str):
        super().__init__(f"{path}:{line}: {msg}")
        self.line = line


def fmt(x: float) -> str:
    """12 significant digits, the interchange precision of sweep files."""
    if isinstance(x, bool):
        return "1" if x else "0"
    if math.isnan(x):
        return "nan"
    return f"{x:.12g}"


def write_sweep_csv(stream, rows, header: dict | None = None) -> None:
    """Write sweep rows; ``header`` entries become leading ``# key=value`` lines."""
    if header:
        for key in sorted(header):
            stream.write(f"# {key}={header[key]}\n")
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([fmt(getattr(row, c)) for c in CSV_COLUMNS])


@dataclass(frozen=True)
class CsvRow:
    eta: float
    s: float
    n_eff: float
    r: float
    n: float
    chi_out: float
    chi_eve: float
    i_p: float
    feasible: bool


def read_sweep_csv(path) -> tuple[dict, list[CsvRow]]:
    """Parse a sweep file into ``(header, rows)``; errors name the line number."""
    header: dict = {}
    rows: list[CsvRow] = []
    columns = None
    with open(path, newline="") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            if line.startswith("#"):
                key, sep, value = line[1:].strip().partition("=")
                if sep:
                    header[key.strip()] = value
                continue
            fields = next(csv.reader(io.StringIO(line)))
            if columns is None:
                if tuple(fields) != CSV_COLUMNS:
                    raise CsvFormatError(path, lineno, f"expected header {','.join(CSV_COLUMNS)}")
                columns = fields
                continue
            if len(fields) != len(CSV_COLUMNS):
                raise CsvFormatError(path, lineno, f"expected {len(CSV_COLUMNS)} fields, got {len(fields)}")
            try:
                values = [float(v) for v in fields[:-1]]
            except ValueError as exc:
                raise CsvFormatError(path, lineno, str(exc)) from None
            if fields[-1] not in ("0", "1"):
                raise CsvFormatError(path, lineno, f"feasible flag must be 0 or 1, got {fields[-1]!r}")
            rows.append(CsvRow(*values, feasible=fields[-1] == "1"))
    if columns is None:
        raise CsvFormatError(path, 0, "no header row found")
    return header, rows


def _ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi == lo:
        return [lo]
    raw = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=raw)
    start = math.ceil(lo / step) * step
    out = []
    t = start
    while t <= hi + 1e-12 * step:
        out.append(round(t, 12))
        t += step
    return out


def render_svg(curves: dict, title: str, xlabel: str, ylabel: str,
               width: int = 640, height: int = 440) -> str:
    """Line plot with one polyline per ``label -> [(x, y), ...]`` entry."""
    pts = [p for line in curves.values() for p in line]
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(min(ys), 0.0), max(max(ys), 0.0)
    if x1 == x0:
        x0, x1 = x0 - 1, x1 + 1
    if y1 == y0:
        y0, y1 = y0 - 1, y1 + 1
    pad = 0.05 * (y1 - y0)
    y0, y1 = y0 - pad, y1 + pad
    left, right, top, bottom = 70, 130, 40, 55
    pw, ph = width - left - right, height - top - bottom

    def sx(x):
        return left + (x - x0) / (x1 - x0) * pw

    def sy(y):
        return top + (y1 - y) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<text x="{left + pw / 2:.1f}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for t in _ticks(x0, x1):
        X = sx(t)
        out.append(f'<line x1="{X:.2f}" y1="{top + ph}" x2="{X:.2f}" y2="{top + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{X:.2f}" y="{top + ph + 18}" text-anchor="middle">{t:g}</text>')
    for t in _ticks(y0, y1):
        Y = sy(t)
        out.append(f'<line x1="{left - 5}" y1="{Y:.2f}" x2="{left}" y2="{Y:.2f}" stroke="black"/>')
        out.append(f'<text x="{left - 8}" y="{Y + 4:.2f}" text-anchor="end">{t:g}</text>')
    if y0 < 0 < y1:
        out.append(f'<line x1="{left}" y1="{sy(0):.2f}" x2="{left + pw}" y2="{sy(0):.2f}" '
                   'stroke="gray" stroke-dasharray="4,3"/>')
    out.append(f'<text x="{left + pw / 2:.1f}" y="{height - 15}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text transform="translate(18,{top + ph / 2:.1f}) rotate(-90)" '
               f'text-anchor="middle">{escape(ylabel)}</text>')
    for i, (label, line) in enumerate(curves.items()):
        color = COLORS[i % len(COLORS)]
        coords = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in line)
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{coords}">'
                   f'<title>{escape(label)}</title></polyline>')
        ly = top + 15 + 18 * i
        lx = left + pw + 12
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 22}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 28}" y="{ly + 4}">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def plot_sweep(csv_path, out_dir) -> list[Path]:
    """One SVG of ``I_p`` versus ``r`` per ``(eta, n_eff)``, one polyline per ``s``.

    Raises:
        ValueError: if the file holds no feasible row (nothing is written).
    """
    _, rows = read_sweep_csv(csv_path)
    groups: dict = defaultdict(lambda: defaultdict(list))
    for row in rows:
        if row.feasible and not math.isnan(row.i_p):
            groups[(row.eta, row.n_eff)][row.s].append((row.r, row.i_p))
    if not groups:
        raise ValueError(f"{csv_path}: no feasible rows to plot")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for (eta, n_eff), by_s in sorted(groups.items()):
        curves = {f"s = {s:g}": sorted(by_s[s]) for s in sorted(by_s)}
        svg = render_svg(
            curves,
            title=f"Private information, eta = {eta:g}, N_eff = {n_eff:g}",
            xlabel="entanglement parameter r",
            ylabel="I_p (bits per use)",
        )
        path = out_dir / f"ip_eta{eta:g}_neff{n_eff:g}.svg"
        path.write_text(svg)
        written.append(path)
    return written
