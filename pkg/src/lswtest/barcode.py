"""Barcode plots of rejected cells and the rejection CSV.

A barcode has one row per scale (or per HT ``(level, haar_scale)`` pair)
and a horizontal axis in rescaled time ``k / T``. Rejected cells are black
rectangles; adjacent rejections in a row merge into one rectangle. Rows are
drawn finest at the top and coarsest at the bottom.
"""

import csv
from dataclasses import dataclass

import numpy as np

from .errors import InputError

GRID_COLUMNS = ("level", "time_index", "statistic", "p_value", "rejected")
HT_COLUMNS = ("level", "haar_scale", "time_index", "start", "stop", "statistic", "p_value", "rejected")


@dataclass(frozen=True)
class BarcodeArtifact:
    """Rows of ``(label, [(start, stop), ...])`` rejected time spans on ``0..T``.

    Row 0 is drawn at the top.
    """

    rows: tuple
    T: int
    title: str = ""
    cell_width: float = 2.0
    row_height: float = 14.0
    y_label: str = "scale j"

    @property
    def n_rows(self):
        return len(self.rows)


def _runs(mask_row):
    """Maximal ``[start, stop)`` runs of True."""
    m = np.concatenate([[False], np.asarray(mask_row, dtype=bool), [False]])
    edges = np.flatnonzero(m[1:] != m[:-1])
    return [(int(a), int(b)) for a, b in zip(edges[::2], edges[1::2])]


def grid_barcode(mask, title=""):
    """Artifact for a finest-first ``(J, T)`` mask."""
    mask = np.asarray(mask, dtype=bool)
    if mask.ndim != 2:
        raise InputError(f"grid mask must be 2-D, got shape {mask.shape}")
    rows = tuple((str(j + 1), tuple(_runs(mask[j]))) for j in range(mask.shape[0]))
    return BarcodeArtifact(rows, mask.shape[1], title)


def ht_barcode(coords, spans, rejected, T, title=""):
    """Artifact for HT cells: ``coords`` rows ``(level, haar_scale, location)``, ``spans`` rows ``(start, stop)``."""
    coords = np.asarray(coords)
    spans = np.asarray(spans)
    rejected = np.asarray(rejected, dtype=bool)
    keys = sorted({(int(j), int(l)) for j, l in coords[:, :2]}, key=lambda k: (k[0], -k[1]))
    rows = []
    for j, l in keys:
        sel = (coords[:, 0] == j) & (coords[:, 1] == l) & rejected
        cover = np.zeros(T, dtype=bool)
        for a, b in spans[sel]:
            cover[int(a) : int(b)] = True
        rows.append((f"{j}:{l}", tuple(_runs(cover))))
    return BarcodeArtifact(tuple(rows), int(T), title, y_label="level:haar scale")


def ht_spans(coords, T, cfg):
    """Time spans ``[start, stop)`` covered by each HT cell."""
    J = int(T).bit_length() - 1
    exponent = dict(cfg.haar_scales(J))
    out = []
    for _, l, p in np.asarray(coords):
        w = 2 ** exponent[int(l)]
        out.append((w * (int(p) - 1), w * int(p)))
    return np.array(out, dtype=int).reshape(-1, 2)


def result_barcode(result, T, title=""):
    if result.test_kind == "HT":
        spans = ht_spans(result.coords, T, result.config)
        return ht_barcode(result.coords, spans, result.rejected, T, title)
    return grid_barcode(result.rejected, title)


_LEFT, _TOP, _RIGHT, _BOTTOM = 70.0, 28.0, 16.0, 40.0


def _f(x):
    return f"{x:.2f}"


def cell_rect(artifact, row, start, stop):
    """Pixel ``(x, y, width, height)`` of a span in one row."""
    x = _LEFT + start * artifact.cell_width
    y = _TOP + row * artifact.row_height
    return x, y, (stop - start) * artifact.cell_width, artifact.row_height


def render_barcode(artifact):
    """SVG 1.1 text; identical artifacts give identical bytes."""
    a = artifact
    pw = a.T * a.cell_width
    ph = a.n_rows * a.row_height
    width, height = _LEFT + pw + _RIGHT, _TOP + ph + _BOTTOM
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_f(width)}" height="{_f(height)}" '
        f'viewBox="0 0 {_f(width)} {_f(height)}" font-family="sans-serif" font-size="10">',
        f'<rect x="0" y="0" width="{_f(width)}" height="{_f(height)}" fill="white"/>',
    ]
    if a.title:
        out.append(f'<text x="{_f(_LEFT)}" y="16" font-size="12">{_escape(a.title)}</text>')
    out.append('<g id="cells" fill="black" stroke="none">')
    for i, (_, spans) in enumerate(a.rows):
        for s, e in spans:
            x, y, w, h = cell_rect(a, i, s, e)
            out.append(f'<rect x="{_f(x)}" y="{_f(y)}" width="{_f(w)}" height="{_f(h)}"/>')
    out.append("</g>")
    out.append(
        f'<rect id="frame" x="{_f(_LEFT)}" y="{_f(_TOP)}" width="{_f(pw)}" height="{_f(ph)}" '
        'fill="none" stroke="black" stroke-width="1"/>'
    )
    out.append('<g id="y-axis" text-anchor="end">')
    for i, (label, _) in enumerate(a.rows):
        y = _TOP + (i + 0.5) * a.row_height + 3.5
        out.append(f'<text x="{_f(_LEFT - 6)}" y="{_f(y)}">{_escape(label)}</text>')
    out.append("</g>")
    out.append('<g id="x-axis" text-anchor="middle">')
    for z in (0.0, 0.25, 0.5, 0.75, 1.0):
        x = _LEFT + z * pw
        y0 = _TOP + ph
        out.append(f'<line x1="{_f(x)}" y1="{_f(y0)}" x2="{_f(x)}" y2="{_f(y0 + 4)}" stroke="black"/>')
        out.append(f'<text x="{_f(x)}" y="{_f(y0 + 16)}">{z:.2f}</text>')
    out.append("</g>")
    out.append(f'<text x="{_f(_LEFT + pw / 2)}" y="{_f(height - 6)}" text-anchor="middle">rescaled time z</text>')
    yc = _TOP + ph / 2
    out.append(
        f'<text x="14" y="{_f(yc)}" text-anchor="middle" transform="rotate(-90 14 {_f(yc)})">{_escape(a.y_label)}</text>'
    )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _escape(text):
    return str(text).replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


# -- rejection CSV ---------------------------------------------------------------


def _num(x):
    return repr(float(x))


def write_rejections(result, path, T=None):
    """One row per tested cell. Grid levels are finest-first ``j``; HT rows add the Haar scale and span."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if result.test_kind == "HT":
            if T is None:
                raise InputError("HT rejection files need the series length T")
            spans = ht_spans(result.coords, T, result.config)
            w.writerow(HT_COLUMNS)
            for (j, l, p), (s, e), st, pv, r in zip(result.coords, spans, result.statistic, result.p_value, result.rejected):
                w.writerow([int(j), int(l), int(p), int(s), int(e), _num(st), _num(pv), int(bool(r))])
        else:
            w.writerow(GRID_COLUMNS)
            J, Tn = result.rejected.shape
            for j in range(J):
                for k in range(Tn):
                    w.writerow([j + 1, k, _num(result.statistic[j, k]), _num(result.p_value[j, k]), int(result.rejected[j, k])])


@dataclass(frozen=True)
class RejectionTable:
    kind: str
    mask: np.ndarray
    statistic: np.ndarray
    p_value: np.ndarray
    coords: np.ndarray | None = None
    spans: np.ndarray | None = None

    def barcode(self, title=""):
        if self.kind == "grid":
            return grid_barcode(self.mask, title)
        T = int(self.spans[:, 1].max())
        return ht_barcode(self.coords, self.spans, self.mask, T, title)


def read_rejections(path):
    """Parse a file written by :func:`write_rejections`."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise InputError(f"{path}: empty rejection file")
    header = tuple(rows[0])
    body = rows[1:]
    try:
        if header == GRID_COLUMNS:
            lev = np.array([int(r[0]) for r in body])
            k = np.array([int(r[1]) for r in body])
            J, T = int(lev.max()), int(k.max()) + 1
            mask = np.zeros((J, T), dtype=bool)
            stat = np.full((J, T), np.nan)
            pv = np.ones((J, T))
            for r, j, kk in zip(body, lev, k):
                stat[j - 1, kk] = float(r[2])
                pv[j - 1, kk] = float(r[3])
                mask[j - 1, kk] = r[4] == "1"
            return RejectionTable("grid", mask, stat, pv)
        if header == HT_COLUMNS:
            arr = [[int(r[0]), int(r[1]), int(r[2]), int(r[3]), int(r[4])] for r in body]
            arr = np.array(arr, dtype=int).reshape(-1, 5)
            return RejectionTable(
                "ht",
                np.array([r[7] == "1" for r in body]),
                np.array([float(r[5]) for r in body]),
                np.array([float(r[6]) for r in body]),
                coords=arr[:, :3],
                spans=arr[:, 3:],
            )
    except (ValueError, IndexError) as exc:
        raise InputError(f"{path}: malformed rejection file ({exc})") from None
    raise InputError(f"{path}: unrecognised header {','.join(header)}")
