"""Yield panel CSV ingestion/emission and JSON report persistence.

Panel CSV columns, in order::

    date,psi_eth,psi_steth,gamma_eth,gamma_steth,steth_eth_ratio

Dates are ISO-8601, yields are annualized decimals (0.0192 rather than
1.92) and ``steth_eth_ratio`` may be left empty or omitted entirely.
"""

from __future__ import annotations

import csv
import datetime as dt
import json
import logging
import math
import os
from dataclasses import dataclass
from typing import Iterable, Sequence

log = logging.getLogger(__name__)

DAYS_PER_YEAR = 365
LIDO_FEE_SHARE = 0.9
FEE_DEVIATION_TOL = 0.05
RATIO_BAND = (0.5, 1.5)

YIELD_COLUMNS = ("psi_eth", "psi_steth", "gamma_eth", "gamma_steth")
REQUIRED_COLUMNS = ("date",) + YIELD_COLUMNS
COLUMNS = REQUIRED_COLUMNS + ("steth_eth_ratio",)


class PanelFormatError(ValueError):
    """Raised for unreadable or invalid panel files; carries the line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class YieldObservation:
    date: dt.date
    psi_eth: float
    psi_steth: float
    gamma_eth: float
    gamma_steth: float
    steth_eth_ratio: float | None = None

    def __post_init__(self):
        for name in YIELD_COLUMNS:
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0:
                raise ValueError(f"{name} must be a finite non-negative yield, got {v!r}")
        r = self.steth_eth_ratio
        if r is not None and not (RATIO_BAND[0] < r < RATIO_BAND[1]):
            raise ValueError(f"steth_eth_ratio {r!r} outside sanity band {RATIO_BAND}")


def to_per_period(y_annualized: float, day_count: int = DAYS_PER_YEAR) -> float:
    if day_count < 1:
        raise ValueError("day_count must be >= 1")
    return y_annualized / day_count


def to_annualized(y_per_period: float, day_count: int = DAYS_PER_YEAR) -> float:
    if day_count < 1:
        raise ValueError("day_count must be >= 1")
    return y_per_period * day_count


def fee_deviations(
    panel: Iterable[YieldObservation], fee: float = LIDO_FEE_SHARE, tol: float = FEE_DEVIATION_TOL
) -> list[YieldObservation]:
    """Rows whose stETH staking yield strays from ``fee`` times the protocol yield."""
    out = []
    for obs in panel:
        if obs.gamma_eth > 0 and abs(obs.gamma_steth - fee * obs.gamma_eth) / obs.gamma_eth > tol:
            out.append(obs)
    return out


def _parse_float(text: str, column: str, line: int) -> float:
    try:
        return float(text)
    except ValueError:
        raise PanelFormatError(f"column {column!r}: cannot parse {text!r} as a number", line) from None


def read_panel(path: str | os.PathLike) -> list[YieldObservation]:
    """Parse and validate a panel CSV.

    Logs a warning (it is not an error) when the stETH staking yield departs
    from 90% of the protocol yield by more than 5% on any row.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise PanelFormatError("empty file", 1) from None
        header = [h.strip() for h in header]
        missing = [c for c in REQUIRED_COLUMNS if c not in header]
        if missing:
            raise PanelFormatError(f"missing required column(s): {', '.join(missing)}", 1)
        idx = {c: header.index(c) for c in COLUMNS if c in header}

        panel: list[YieldObservation] = []
        for row in reader:
            line = reader.line_num
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(header):
                raise PanelFormatError(f"expected {len(header)} fields, found {len(row)}", line)
            try:
                date = dt.date.fromisoformat(row[idx["date"]].strip())
            except ValueError:
                raise PanelFormatError(f"bad ISO date {row[idx['date']]!r}", line) from None
            values = {c: _parse_float(row[idx[c]], c, line) for c in YIELD_COLUMNS}
            ratio = None
            if "steth_eth_ratio" in idx and row[idx["steth_eth_ratio"]].strip():
                ratio = _parse_float(row[idx["steth_eth_ratio"]], "steth_eth_ratio", line)
            try:
                obs = YieldObservation(date, steth_eth_ratio=ratio, **values)
            except ValueError as exc:
                raise PanelFormatError(str(exc), line) from None
            if panel and obs.date <= panel[-1].date:
                raise PanelFormatError(
                    f"dates must be strictly increasing ({obs.date} after {panel[-1].date})", line
                )
            panel.append(obs)

    bad = fee_deviations(panel)
    if bad:
        log.warning(
            "%d of %d rows have gamma_steth more than %.0f%% away from %.1f x gamma_eth "
            "(Lido passes 90%% of staking rewards to stETH holders); first on %s",
            len(bad), len(panel), 100 * FEE_DEVIATION_TOL, LIDO_FEE_SHARE, bad[0].date,
        )
    return panel


def write_panel(panel: Sequence[YieldObservation], path: str | os.PathLike) -> None:
    """Write a panel; floats use their shortest round-trip repr."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(COLUMNS)
        for obs in panel:
            w.writerow([
                obs.date.isoformat(),
                repr(float(obs.psi_eth)),
                repr(float(obs.psi_steth)),
                repr(float(obs.gamma_eth)),
                repr(float(obs.gamma_steth)),
                "" if obs.steth_eth_ratio is None else repr(float(obs.steth_eth_ratio)),
            ])


def dumps_report(results: dict) -> str:
    return json.dumps(results, indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_report(results: dict, path: str | os.PathLike) -> None:
    """Persist a report as key-sorted, two-space-indented JSON."""
    text = dumps_report(results)
    with open(path, "w", newline="\n") as fh:
        fh.write(text)
