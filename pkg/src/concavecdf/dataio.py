"""Dataset formats and result emission.

Two dataset formats are supported.

Interval CSV
    Header ``left,right``; one row per record; ``inf`` for an open right
    end.  Enough for every estimator, since the likelihood depends on a
    record only through its censoring interval.

Inspection file
    One record per line as ``k;t_1,...,t_k;delta_index`` (e.g.
    ``3;0.5,1.2,2.0;4``), with an optional ``k;times;delta_index`` header
    and ``#`` comments.  Keeps every inspection time, which the increment
    distances need.

Floats are written with ``repr`` so a write/read round trip is exact, and
every writer produces identical bytes for identical inputs.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from .core import CensoredRecord, GridFunction, InvariantError


class DataError(ValueError):
    """Malformed or inconsistent input data (CLI exit code 3)."""


class ConfigError(ValueError):
    """Invalid run configuration (CLI exit code 2)."""


def fmt(value) -> str:
    value = float(value)
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    if math.isnan(value):
        return "nan"
    return repr(value)


def _parse_float(text: str, where: str) -> float:
    text = text.strip()
    if text.lower() in ("inf", "+inf", "infinity"):
        return math.inf
    try:
        value = float(text)
    except ValueError:
        raise DataError(f"{where}: cannot parse number {text!r}") from None
    if math.isnan(value) or value == -math.inf:
        raise DataError(f"{where}: invalid number {text!r}")
    return value


def _lines(path):
    try:
        with open(path, newline="") as fh:
            text = fh.read()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if stripped and not stripped.startswith("#"):
            yield lineno, stripped


def load_intervals(path, treat_as_inf: float | None = None) -> list[CensoredRecord]:
    """Read an interval CSV into records.

    Each ``(L, R]`` becomes the smallest record carrying it: the finite
    positive endpoints are the inspection times.  A right endpoint equal to
    ``treat_as_inf`` (e.g. a study's life-span cap) is read as ``inf``.
    """
    records = []
    for lineno, line in _lines(path):
        where = f"{path}:{lineno}"
        parts = [p.strip() for p in line.split(",")]
        if parts == ["left", "right"]:
            continue
        if len(parts) != 2:
            raise DataError(f"{where}: expected 'left,right', got {line!r}")
        left, right = (_parse_float(p, where) for p in parts)
        if treat_as_inf is not None and right == treat_as_inf:
            right = math.inf
        if left < 0 or right < 0:
            raise DataError(f"{where}: negative endpoint")
        if not left < right:
            raise DataError(f"{where}: need left < right, got ({left}, {right}]")
        try:
            records.append(CensoredRecord.from_interval(left, right))
        except InvariantError as exc:
            raise DataError(f"{where}: {exc}") from None
    if not records:
        raise DataError(f"{path}: no records")
    return records


def load_inspections(path, treat_as_inf: float | None = None) -> list[CensoredRecord]:
    """Read an inspection file (``k;times;delta_index`` per line).

    With ``treat_as_inf``, an inspection time equal to that value is dropped,
    so an event flagged beyond it becomes right-censored.
    """
    records = []
    for lineno, line in _lines(path):
        where = f"{path}:{lineno}"
        if line.replace(" ", "") == "k;times;delta_index":
            continue
        parts = line.split(";")
        if len(parts) != 3:
            raise DataError(f"{where}: expected 'k;t1,...,tk;delta_index', got {line!r}")
        try:
            k = int(parts[0])
            delta = int(parts[2])
        except ValueError:
            raise DataError(f"{where}: k and delta_index must be integers") from None
        times = [_parse_float(t, where) for t in parts[1].split(",") if t.strip()]
        if len(times) != k:
            raise DataError(f"{where}: k={k} but {len(times)} inspection times")
        if not 1 <= delta <= k + 1:
            raise DataError(f"{where}: delta_index {delta} outside 1..{k + 1}")
        if treat_as_inf is not None and times and times[-1] == treat_as_inf:
            times = times[:-1]
            delta = min(delta, len(times) + 1)
        try:
            records.append(CensoredRecord(tuple(times), delta))
        except InvariantError as exc:
            raise DataError(f"{where}: {exc}") from None
    if not records:
        raise DataError(f"{path}: no records")
    return records


def load_dataset(path, treat_as_inf: float | None = None) -> list[CensoredRecord]:
    """Dispatch on content: ``;`` separators mean an inspection file."""
    for _, line in _lines(path):
        if ";" in line:
            return load_inspections(path, treat_as_inf)
        return load_intervals(path, treat_as_inf)
    raise DataError(f"{path}: no records")


def _write_text(path, text: str):
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    return path


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def write_intervals(records, path):
    rows = [(r.interval.left, r.interval.right) for r in records]
    return _write_text(path, _csv_text(["left", "right"], rows))


def write_inspections(records, path):
    lines = ["k;times;delta_index"]
    for r in records:
        lines.append(f"{r.k};{','.join(fmt(t) for t in r.times)};{r.delta_index}")
    return _write_text(path, "\n".join(lines) + "\n")


def write_table(path, header, rows):
    return _write_text(path, _csv_text(header, rows))


def write_grid_csv(path, grid, value, lower=None, upper=None):
    """Grid table with columns ``t,value`` and, if given, ``lower,upper``."""
    cols = [np.asarray(grid, float), np.asarray(value, float)]
    header = ["t", "value"]
    if lower is not None:
        cols += [np.asarray(lower, float), np.asarray(upper, float)]
        header += ["lower", "upper"]
    return write_table(path, header, zip(*[c.tolist() for c in cols]))


def read_grid_csv(path) -> GridFunction:
    """Read the ``t,value`` columns of a grid table."""
    grid, values = [], []
    header = None
    for lineno, line in _lines(path):
        parts = [p.strip() for p in line.split(",")]
        if header is None:
            header = parts
            if header[:2] != ["t", "value"]:
                raise DataError(f"{path}:{lineno}: expected header starting 't,value'")
            continue
        grid.append(_parse_float(parts[0], f"{path}:{lineno}"))
        values.append(_parse_float(parts[1], f"{path}:{lineno}"))
    try:
        return GridFunction(np.array(grid), np.array(values))
    except InvariantError as exc:
        raise DataError(f"{path}: {exc}") from None


def write_draws(path, grid, draws):
    """Stored posterior draws: one row per retained draw, one column per grid point."""
    header = ["draw"] + [fmt(t) for t in grid]
    rows = ([i] + [fmt(v) for v in row] for i, row in enumerate(np.asarray(draws).tolist()))
    return write_table(path, header, rows)


def read_draws(path):
    grid, rows = None, []
    for lineno, line in _lines(path):
        parts = line.split(",")
        if grid is None:
            if parts[0] != "draw":
                raise DataError(f"{path}:{lineno}: expected header starting 'draw'")
            grid = np.array([_parse_float(p, f"{path}:{lineno}") for p in parts[1:]])
            continue
        if len(parts) != grid.size + 1:
            raise DataError(f"{path}:{lineno}: expected {grid.size + 1} columns")
        rows.append([_parse_float(p, f"{path}:{lineno}") for p in parts[1:]])
    if grid is None or not rows:
        raise DataError(f"{path}: no draws")
    return grid, np.array(rows)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return fmt(v) if not math.isfinite(v) else v
    return obj


def write_manifest(path, manifest: dict):
    """JSON with sorted keys; non-finite floats become the tokens ``"inf"``/``"-inf"``."""
    return _write_text(path, json.dumps(_jsonable(manifest), indent=2, sort_keys=True) + "\n")


PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#555555")


def svg_plot(path, series, title="", xlabel="t", ylabel="F(t)", ylim=None):
    """Static line plot on a fixed 800x600 viewBox.

    ``series`` is a list of dicts with keys ``x``, ``y``, ``label`` and
    optionally ``dash`` (bool) and ``color``.  Non-finite points are skipped.
    """
    xs = np.concatenate([np.asarray(s["x"], float) for s in series])
    ys = np.concatenate([np.asarray(s["y"], float) for s in series])
    ok = np.isfinite(xs) & np.isfinite(ys)
    x0, x1 = (float(xs[ok].min()), float(xs[ok].max())) if ok.any() else (0.0, 1.0)
    if ylim is None:
        y0, y1 = (float(ys[ok].min()), float(ys[ok].max())) if ok.any() else (0.0, 1.0)
    else:
        y0, y1 = ylim
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0
    left, right, top, bottom = 70.0, 770.0, 50.0, 540.0

    def px(x):
        return left + (x - x0) / (x1 - x0) * (right - left)

    def py(y):
        return bottom - (y - y0) / (y1 - y0) * (bottom - top)

    out = ['<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 800 600" '
           'width="800" height="600" font-family="sans-serif" font-size="13">',
           '<rect width="800" height="600" fill="white"/>',
           f'<text x="400" y="28" text-anchor="middle" font-size="16">{title}</text>',
           f'<rect x="{left}" y="{top}" width="{right - left}" height="{bottom - top}" '
           'fill="none" stroke="black"/>']
    for frac in np.linspace(0, 1, 5):
        xv, yv = x0 + frac * (x1 - x0), y0 + frac * (y1 - y0)
        out.append(f'<text x="{px(xv):.1f}" y="{bottom + 18:.1f}" '
                   f'text-anchor="middle">{xv:.3g}</text>')
        out.append(f'<text x="{left - 8:.1f}" y="{py(yv) + 4:.1f}" '
                   f'text-anchor="end">{yv:.3g}</text>')
    out.append(f'<text x="400" y="580" text-anchor="middle">{xlabel}</text>')
    out.append(f'<text x="18" y="300" text-anchor="middle" '
               f'transform="rotate(-90 18 300)">{ylabel}</text>')
    for k, s in enumerate(series):
        x = np.asarray(s["x"], float)
        y = np.asarray(s["y"], float)
        keep = np.isfinite(x) & np.isfinite(y)
        pts = " ".join(f"{px(a):.2f},{py(min(max(b, y0), y1)):.2f}"
                       for a, b in zip(x[keep], y[keep]))
        color = s.get("color", PALETTE[k % len(PALETTE)])
        dash = ' stroke-dasharray="6,4"' if s.get("dash") else ""
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash} '
                   f'points="{pts}"/>')
        ly = top + 20 + 18 * k
        out.append(f'<line x1="{right - 170}" y1="{ly - 4}" x2="{right - 140}" y2="{ly - 4}" '
                   f'stroke="{color}" stroke-width="2"{dash}/>')
        out.append(f'<text x="{right - 132}" y="{ly}">{s.get("label", "")}</text>')
    out.append("</svg>")
    return _write_text(path, "\n".join(out) + "\n")


FORMATS = ("csv", "json", "svg")


def _as_cdf_values(values, survival):
    values = np.asarray(values, float)
    return 1.0 - values if survival else values


def emit_results(result, out_dir, formats=FORMATS, grid=None, manifest=None,
                 survival: bool = False, truth=None, save_draws: bool = False) -> list[Path]:
    """Write a fitted result as grid tables, a JSON manifest and an SVG plot.

    ``result`` is a :class:`~concavecdf.gibbs.ChainSummary`, an
    :class:`~concavecdf.frequentist.NPMLEResult` or a
    :class:`~concavecdf.frequentist.ConcaveMLEResult`; the latter two are
    tabulated on ``grid``.  With ``survival`` the tables hold ``1 - F``.
    ``truth`` (a CDF-like callable) is overlaid on the plot.  Returns the
    written paths.
    """
    from .frequentist import ConcaveMLEResult, NPMLEResult
    from .gibbs import ChainSummary

    formats = tuple(formats)
    unknown = set(formats) - set(FORMATS)
    if unknown:
        raise ConfigError(f"unknown output formats {sorted(unknown)}")
    out = Path(out_dir)
    written = []
    manifest = dict(manifest or {})
    series = []

    if isinstance(result, ChainSummary):
        grid = result.grid
        mean = _as_cdf_values(result.mean_cdf, survival)
        lo = _as_cdf_values(result.upper_band if survival else result.lower_band, survival)
        hi = _as_cdf_values(result.lower_band if survival else result.upper_band, survival)
        if "csv" in formats:
            written.append(write_grid_csv(out / "mean.csv", grid, mean))
            written.append(write_grid_csv(out / "bands.csv", grid, mean, lo, hi))
            written.append(write_table(
                out / "trace.csv", ["iteration", "value", "tables", "s"],
                zip(range(result.trace.size), result.trace.tolist(),
                    result.table_counts.tolist(), result.s_trace.tolist())))
            if save_draws:
                draws = 1.0 - result.draws if survival else result.draws
                written.append(write_draws(out / "draws.csv", grid, draws))
        manifest.update(estimator="posterior_mean", n_retained=result.n_retained,
                        quantiles=list(result.quantiles), trace_point=result.trace_point,
                        mean_tables=float(result.table_counts.mean()))
        series = [dict(x=grid, y=mean, label="posterior mean"),
                  dict(x=grid, y=lo, label=f"{result.quantiles[0]:g} quantile", dash=True),
                  dict(x=grid, y=hi, label=f"{result.quantiles[1]:g} quantile", dash=True)]
        stem = "posterior"
    elif isinstance(result, (NPMLEResult, ConcaveMLEResult)):
        if grid is None:
            raise ConfigError("a grid is needed to tabulate a frequentist estimate")
        grid = np.asarray(grid, float)
        values = _as_cdf_values(result.cdf(grid), survival)
        is_np = isinstance(result, NPMLEResult)
        stem = "npmle" if is_np else "cmle"
        if "csv" in formats:
            written.append(write_grid_csv(out / f"{stem}.csv", grid, values))
            if is_np:
                rows = zip(result.intervals.left.tolist(), result.intervals.right.tolist(),
                           result.masses.tolist())
                written.append(write_table(out / "npmle_support.csv",
                                           ["left", "right", "mass"], rows))
            else:
                rows = zip(result.cdf.thetas.tolist(), result.cdf.weights.tolist())
                written.append(write_table(out / "cmle_support.csv", ["theta", "weight"], rows))
        manifest.update(estimator=stem, converged=result.converged, n_iter=result.n_iter,
                        log_likelihood=result.log_likelihood, certificate=result.certificate)
        series = [dict(x=grid, y=values, label="NPMLE" if is_np else "concave MLE")]
    else:
        raise TypeError(f"cannot emit {type(result).__name__}")

    manifest["survival"] = survival
    if truth is not None:
        from .core import evaluate
        series.append(dict(x=grid, y=_as_cdf_values(evaluate(truth, grid), survival),
                           label="truth", color="#000000", dash=True))
    if "svg" in formats:
        written.append(svg_plot(out / "plot.svg", series, title=stem,
                                ylabel="1 - F(t)" if survival else "F(t)", ylim=(0.0, 1.0)))
    if "json" in formats:
        manifest["files"] = sorted(p.name for p in written) + ["manifest.json"]
        written.append(write_manifest(out / "manifest.json", manifest))
    return written
