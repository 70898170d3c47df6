"""CSV outputs and plain-text observation input."""

from __future__ import annotations

import csv
import io
from pathlib import Path

import numpy as np

from .estimator import SampleBatch

RESULT_COLUMNS = ["density", "noise", "assumed_noise", "n", "s2n", "reps", "seed",
                  "mean_ise", "median_ise", "sd_ise", "modal_m"]
MISSPEC_COLUMNS = ["density", "noise", "assumed_noise", "n", "s2n", "reps", "seed",
                   "mise_correct", "mise_assumed", "ratio"]
SCORE_COLUMNS = ["m", "contrast", "pen", "crit"]


class DataError(ValueError):
    pass


def fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _write(rows: list[list], header: list[str], path=None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text


def result_row(stats) -> list:
    s = stats.spec
    return [s.density.letter, s.noise.value, s.estimation_noise.value, s.n, float(s.s2n),
            s.reps, s.seed, stats.mean_ise, stats.median_ise, stats.sd_ise, stats.modal_m]


def write_results(stats, path=None) -> str:
    items = stats if isinstance(stats, (list, tuple)) else [stats]
    return _write([result_row(s) for s in items], RESULT_COLUMNS, path)


def write_misspec(res, path=None) -> str:
    s = res.assumed.spec
    row = [s.density.letter, s.noise.value, s.estimation_noise.value, s.n, float(s.s2n), s.reps,
           s.seed, res.correct.mean_ise, res.assumed.mean_ise, res.ratio]
    return _write([row], MISSPEC_COLUMNS, path)


def write_scores(scores, path=None) -> str:
    return _write([[s.m, s.contrast, s.pen, s.crit] for s in scores], SCORE_COLUMNS, path)


def write_columns(header: list[str], columns, path=None) -> str:
    return _write([list(r) for r in zip(*columns)], header, path)


def read_data(path) -> SampleBatch:
    """One real per line; blank lines are skipped, anything else non-numeric is an error."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror or exc}") from exc
    values = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        tok = line.strip()
        if not tok:
            continue
        try:
            v = float(tok)
        except ValueError:
            raise DataError(f"{path}: line {lineno}: not a number: {tok!r}") from None
        if not np.isfinite(v):
            raise DataError(f"{path}: line {lineno}: non-finite value {tok!r}")
        values.append(v)
    if not values:
        raise DataError(f"{path}: no observations")
    return SampleBatch(np.array(values))


def write_data(values, path) -> None:
    Path(path).write_text("".join(repr(float(v)) + "\n" for v in values))
