"""Storm lifting: turn moderately extreme observed fields into fields at a
much higher threshold.

Given n i.i.d. fields, the five steps are: estimate per-site norming
functions (gamma, a, b) from the top k order statistics, normalize each field
with T_{n/k}, keep the fields whose normalized supremum exceeds 1, multiply
them by a large factor t0, and invert the normalization. Peaks-over-threshold
stability makes the lifted fields distributed (approximately, exactly for
Pareto input with true norming) like exceedances of the t0-times-higher
threshold.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateTail, InsufficientData
from .grid import Field, Grid
from .maxstable import sample_moving_maximum_batch
from .transforms import (
    GAMMA_ZERO_TOL,
    NormingFunctions,
    apply_T_values,
    invert_T_values,
    norming_to_json,
)

SUP_ANYWHERE = "sup_anywhere"
SITES = "sites"


@dataclass(frozen=True)
class FieldSample:
    """n i.i.d. observed fields on one grid, stored as an (n, n_sites) matrix."""

    grid: Grid
    values: np.ndarray
    label: str = ""
    seed: int | None = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2 or values.shape[1] != self.grid.n_sites:
            raise ValueError("values must be (n_samples, n_sites)")
        if values.shape[0] < 2:
            raise ValueError("need at least 2 fields")
        if not np.all(np.isfinite(values)):
            raise ValueError("field values must be finite")
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def fields(self) -> list[Field]:
        return [Field(self.grid, row) for row in self.values]

    @classmethod
    def from_fields(cls, fields: list[Field], label: str = "", seed: int | None = None):
        return cls(fields[0].grid, np.vstack([f.values for f in fields]), label, seed)


@dataclass(frozen=True)
class LiftReport:
    """Outcome of one lifting run, with the normalized intermediates kept."""

    selected_ids: list[int]
    t0: float
    norming: NormingFunctions
    lifted: list[Field]
    normalized: list[Field]
    source: FieldSample | None = None


def estimate_norming(data: FieldSample, k: int) -> NormingFunctions:
    """Estimate (gamma, a, b) at level t = n/k from the top order statistics.

    Per site: b is the (n-k)-th ascending order statistic (the empirical
    1 - k/n quantile); gamma is the moment estimator built from the
    log-spacings of the k largest values above it; a comes from the
    quantile-difference formula a_t = gamma (b_t - b_{t/2}) 2^gamma
    / (2^gamma - 1), which reduces to (b_t - b_{t/2}) / log 2 as gamma -> 0.

    Raises ``InsufficientData`` when k is out of range and ``DegenerateTail``
    when a site has tied or nonpositive top order statistics.
    """
    n = data.n
    if not (2 <= k and 2 * k <= n - 1):
        raise InsufficientData(
            f"k = {k} out of range for n = {n}: need 2 <= k and 2k <= n - 1"
        )
    ordered = np.sort(data.values, axis=0)
    b = ordered[n - k - 1]          # empirical (1 - k/n) quantile
    b_half = ordered[n - 2 * k - 1]  # empirical (1 - 2k/n) quantile
    if np.any(b <= 0):
        raise DegenerateTail(
            "moment estimator needs positive top-k order statistics at every site"
        )
    log_excess = np.log(ordered[n - k :]) - np.log(b)[None, :]  # (k, m)
    m1 = log_excess.mean(axis=0)
    m2 = (log_excess**2).mean(axis=0)
    if np.any(m2 == 0.0):
        raise DegenerateTail("top-k values tied at some site")
    ratio = m1 * m1 / m2
    if np.any(ratio >= 1.0):
        raise DegenerateTail("degenerate log-spacings at some site")
    gamma = m1 + 1.0 - 0.5 / (1.0 - ratio)

    spread = b - b_half
    if np.any(spread <= 0):
        raise DegenerateTail("tied quantiles leave no scale information at some site")
    near_zero = np.abs(gamma) < GAMMA_ZERO_TOL
    with np.errstate(divide="ignore", invalid="ignore"):
        two_g = np.power(2.0, gamma)
        a = np.where(near_zero, spread / np.log(2.0),
                     gamma * two_g * spread / (two_g - 1.0))
    grid = data.grid
    return NormingFunctions(
        Field(grid, gamma), Field(grid, a), Field(grid, b), t=n / k, k=k
    )


def select_exceedances(
    data: FieldSample,
    nf: NormingFunctions,
    policy: str = SUP_ANYWHERE,
    sites=None,
) -> list[int]:
    """Indices of fields whose normalized supremum exceeds 1 (``sup_anywhere``)
    or which exceed the threshold b at every designated site (``sites``)."""
    if policy == SUP_ANYWHERE:
        normalized = apply_T_values(data.values, nf)
        keep = normalized.max(axis=1) > 1.0
    elif policy == SITES:
        if sites is None or len(sites) == 0:
            raise ValueError("sites policy needs a nonempty site list")
        idx = np.asarray(sites, dtype=int)
        keep = np.all(data.values[:, idx] > nf.b_t.values[idx], axis=1)
    else:
        raise ValueError(f"unknown policy {policy!r}")
    return [int(i) for i in np.flatnonzero(keep)]


def lift(
    data: FieldSample,
    nf: NormingFunctions,
    t0: float,
    policy: str = SUP_ANYWHERE,
    sites=None,
) -> LiftReport:
    """Steps 3-5: select exceeding fields, scale their normalized versions by
    t0 and invert the normalization."""
    if not t0 >= 1.0:
        raise ValueError("t0 must be >= 1")
    selected = select_exceedances(data, nf, policy, sites)
    grid = data.grid
    if selected:
        normalized_vals = apply_T_values(data.values[selected], nf)
        lifted_vals = invert_T_values(t0 * normalized_vals, nf)
        normalized = [Field(grid, row) for row in normalized_vals]
        lifted = [Field(grid, row) for row in lifted_vals]
    else:
        normalized, lifted = [], []
    return LiftReport(selected, float(t0), nf, lifted, normalized, source=data)


def smooth_norming(nf: NormingFunctions, window: int) -> NormingFunctions:
    """Centered moving-average smoothing of the estimated norming fields
    across sites (odd window); the underlying functions are continuous in s,
    the raw estimates are not."""
    if window < 1 or window % 2 == 0:
        raise ValueError("window must be a positive odd integer")
    if window == 1:
        return nf

    def smooth(values: np.ndarray) -> np.ndarray:
        half = window // 2
        padded = np.pad(values, half, mode="edge")
        kernel = np.full(window, 1.0 / window)
        return np.convolve(padded, kernel, mode="valid")

    grid = nf.grid
    return NormingFunctions(
        Field(grid, smooth(nf.gamma.values)),
        Field(grid, smooth(nf.a_t.values)),
        Field(grid, smooth(nf.b_t.values)),
        nf.t,
        nf.k,
    )


# ---------------------------------------------------------------------------
# End-to-end storm scenario: X(s) = Z(s)^gamma(s) on [0, 1] with a Gaussian
# moving-maximum Z and index function gamma(s) = 1 - s(1-s)^2, run through
# the full estimate / select / lift pipeline.
# ---------------------------------------------------------------------------

def scenario_index_field(grid: Grid) -> Field:
    s = grid.coords()
    return Field(grid, 1.0 - s * (1.0 - s) ** 2)


def sample_scenario_fields(
    n: int, rng: np.random.Generator, n_sites: int = 101
) -> FieldSample:
    grid = Grid.regular(n_sites)
    z = sample_moving_maximum_batch(grid, n, rng)
    gamma = scenario_index_field(grid).values
    return FieldSample(grid, z**gamma, label="powered_moving_maximum")


def run_storm_scenario(
    n: int,
    k: int,
    t0: float = 10.0,
    rng: np.random.Generator | None = None,
    n_sites: int = 101,
) -> LiftReport:
    """Generate n scenario fields and run steps 2-5 with estimated norming."""
    if n < 20:
        raise ValueError("scenario needs n >= 20")
    if rng is None:
        rng = np.random.default_rng()
    data = sample_scenario_fields(n, rng, n_sites)
    nf = estimate_norming(data, k)
    return lift(data, nf, t0)


# ---------------------------------------------------------------------------
# File formats: FieldSample as long CSV (sample_id, site_index, value);
# LiftReport as a directory with norming.json, selected.csv, lifted.csv and
# a manifest.
# ---------------------------------------------------------------------------

def field_sample_to_csv(data: FieldSample, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sample_id", "site_index", "value"])
        for i in range(data.n):
            for j in range(data.grid.n_sites):
                writer.writerow([i, j, format(data.values[i, j], ".17g")])


def field_sample_from_csv(path, grid: Grid, label: str = "") -> FieldSample:
    rows: dict[int, dict[int, float]] = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        for sample_id, site_index, value in reader:
            rows.setdefault(int(sample_id), {})[int(site_index)] = float(value)
    n = len(rows)
    values = np.empty((n, grid.n_sites))
    for i, sid in enumerate(sorted(rows)):
        per_site = rows[sid]
        if len(per_site) != grid.n_sites:
            raise ValueError(f"sample {sid} has {len(per_site)} sites, expected {grid.n_sites}")
        for j in range(grid.n_sites):
            values[i, j] = per_site[j]
    return FieldSample(grid, values, label=label)


def write_lift_report(report: LiftReport, outdir, extra_manifest: dict | None = None) -> None:
    from pathlib import Path

    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "norming.json").write_text(norming_to_json(report.norming))
    with open(out / "selected.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sample_id"])
        for i in report.selected_ids:
            writer.writerow([i])
    for name, fields in (("lifted.csv", report.lifted), ("normalized.csv", report.normalized)):
        with open(out / name, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["sample_id", "site_index", "value"])
            for sid, f in zip(report.selected_ids, fields):
                for j, v in enumerate(f.values):
                    writer.writerow([sid, j, format(v, ".17g")])
    manifest = {
        "t0": report.t0,
        "k": report.norming.k,
        "t": report.norming.t,
        "n_selected": len(report.selected_ids),
    }
    if extra_manifest:
        manifest.update(extra_manifest)
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True))
