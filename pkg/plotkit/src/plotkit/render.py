"""Render harness CSV outputs to figures.

Five plot kinds, each reading one of the harness CSV schemas:

- ``size_scaling``     sweep CSV: log mean running-max packet size vs log(1/eps)
- ``failure_scaling``  sweep CSV: log failure rate vs log(1/eps) (failures > 0)
- ``success_curve``    sweep CSV: success rate vs eps with error bars
- ``density_overlay``  samples CSV: histogram of one check vs analytic density
- ``deviation_tail``   deviation CSV: -log(tail) vs A^(2/3) per vertex index

This toolkit never simulates anything: it is a pure consumer of the CSV
files.  Fitted slopes use the same closed-form least-squares expressions as
the harness, on the same (round-tripped) floats, so reported values agree to
well below 1e-9.  Rendering is deterministic (fixed svg hash salt, no RNG).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "plotkit"
import matplotlib.pyplot as plt
import numpy as np
from scipy import stats

from .densities import parse_law

PLOT_KINDS = (
    "size_scaling", "failure_scaling", "success_curve",
    "density_overlay", "deviation_tail",
)

_REQUIRED_COLUMNS = {
    "size_scaling": {"epsilon", "mean_running_max"},
    "failure_scaling": {"epsilon", "failure_rate", "failures"},
    "success_curve": {"epsilon", "success_rate", "success_se"},
    "density_overlay": {"check", "role", "law", "value"},
    "deviation_tail": {"i", "A", "tail", "censored", "neg_log_tail", "a_pow_two_thirds"},
}


class SchemaError(ValueError):
    """Input CSV does not carry the columns the plot kind needs."""


@dataclass
class PlotSpec:
    input_csv: str | Path
    plot_kind: str
    output_image: str | Path
    eta: float = 0.05            # reference guide exponent on scaling plots
    guide_lines: bool = True
    check: str | None = None     # density_overlay: which check to draw
    bins: int = 60
    dpi: int = 150
    style: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.plot_kind not in PLOT_KINDS:
            raise SchemaError(f"unknown plot kind {self.plot_kind!r}; expected one of {PLOT_KINDS}")


def ols_slope(x, y):
    """Same closed-form least squares as the harness slope report."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = len(x)
    xm = float(np.mean(x))
    ym = float(np.mean(y))
    sxx = float(np.sum((x - xm) ** 2))
    sxy = float(np.sum((x - xm) * (y - ym)))
    slope = sxy / sxx
    intercept = ym - slope * xm
    if n > 2:
        resid = y - (intercept + slope * x)
        se = math.sqrt(float(np.sum(resid**2)) / (n - 2) / sxx)
    else:
        se = float("nan")
    return slope, intercept, se


def _read_rows(path: str | Path, kind: str) -> list[dict]:
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise SchemaError(f"{path}: empty file, no header row")
        missing = _REQUIRED_COLUMNS[kind] - set(reader.fieldnames)
        if missing:
            raise SchemaError(
                f"{path}: missing columns {sorted(missing)} required by {kind} "
                f"(found {reader.fieldnames})"
            )
        rows = list(reader)
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return rows


def _new_axes(title: str):
    fig, ax = plt.subplots(figsize=(6.4, 4.4), constrained_layout=True)
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    return fig, ax


def _finish(fig, spec: PlotSpec):
    out = Path(spec.output_image)
    out.parent.mkdir(parents=True, exist_ok=True)
    # drop the SVG creation date so identical inputs give identical bytes
    metadata = {"Date": None} if out.suffix.lower() == ".svg" else None
    fig.savefig(out, dpi=spec.dpi, metadata=metadata)
    plt.close(fig)


def _render_scaling(spec: PlotSpec, rows: list[dict], *, failure: bool) -> dict:
    eps = np.array([float(r["epsilon"]) for r in rows])
    if failure:
        keep = np.array([int(float(r["failures"])) > 0 for r in rows])
        if not keep.any():
            raise SchemaError("failure_scaling: every row has zero failures")
        eps = eps[keep]
        y = np.log([float(r["failure_rate"]) for r, k in zip(rows, keep) if k])
    else:
        y = np.log([float(r["mean_running_max"]) for r in rows])
    x = np.log(1.0 / eps)
    raw_slope, intercept, se = ols_slope(x, y)
    slope = -raw_slope if failure else raw_slope  # failure reported as eps-exponent

    fig, ax = _new_axes("failure rate scaling" if failure else "packet size scaling")
    ax.plot(x, y, "o", color="#1f4e79", label="measured")
    xs = np.linspace(x.min(), x.max(), 50)
    ax.plot(xs, intercept + raw_slope * xs, "-", color="#c44e52",
            label=f"fit slope {slope:.3f}")
    if spec.guide_lines:
        anchor = intercept + raw_slope * x[0]
        if failure:
            guides = ((-(1.0 - spec.eta), "--"),)
        else:
            guides = ((1.0, "--"), (1.0 + spec.eta, ":"))
        for g, ls in guides:
            ax.plot(xs, anchor + g * (xs - x[0]), ls, color="gray",
                    label=f"guide slope {g:+.3f}")
    ax.set_xlabel("log(1/eps)")
    ax.set_ylabel("log failure rate" if failure else "log mean running-max size")
    ax.legend()
    _finish(fig, spec)
    kind = "failure" if failure else "size"
    print(f"fitted {kind} slope: {slope!r} (se {se:.6f}, {len(x)} points)")
    return {"kind": spec.plot_kind, "slope": slope, "slope_se": se, "points": int(len(x))}


def _render_success_curve(spec: PlotSpec, rows: list[dict]) -> dict:
    eps = np.array([float(r["epsilon"]) for r in rows])
    rate = np.array([float(r["success_rate"]) for r in rows])
    se = np.array([float(r["success_se"]) for r in rows])
    fig, ax = _new_axes("probability the root stays in the packet")
    ax.errorbar(eps, rate, yerr=1.96 * se, fmt="o-", color="#1f4e79", capsize=3)
    ax.set_xscale("log")
    ax.set_xlabel("eps")
    ax.set_ylabel("success rate")
    ax.set_ylim(0, 1.02)
    _finish(fig, spec)
    return {"kind": spec.plot_kind, "points": int(len(eps))}


def _render_density_overlay(spec: PlotSpec, rows: list[dict]) -> dict:
    checks = sorted({r["check"] for r in rows})
    check = spec.check or checks[0]
    sel = [r for r in rows if r["check"] == check]
    if not sel:
        raise SchemaError(f"density_overlay: no rows for check {check!r} (have {checks})")
    law = sel[0]["law"]
    emp = np.array([float(r["value"]) for r in sel if r["role"] == "empirical"])
    ref = np.array([float(r["value"]) for r in sel if r["role"] == "reference"])
    if emp.size == 0:
        raise SchemaError(f"density_overlay: check {check!r} has no empirical rows")

    pdf, cdf = parse_law(law)
    if ref.size:
        ks = float(stats.ks_2samp(emp, ref).statistic)
        ks_kind = "two_sample"
    elif cdf is not None:
        ks = float(stats.kstest(emp, cdf).statistic)
        ks_kind = "one_sample"
    else:
        raise SchemaError(f"check {check!r}: no reference rows and no closed-form CDF")

    fig, ax = _new_axes(f"{check} vs analytic density")
    ax.hist(emp, bins=spec.bins, density=True, alpha=0.55, color="#1f4e79",
            label=f"samples (n={emp.size})")
    hi = float(np.quantile(emp, 0.999)) * 1.3
    xs = np.linspace(0, max(hi, 1e-3), 400)
    ax.plot(xs, pdf(xs), "-", color="#c44e52", lw=2, label=f"analytic ({law})")
    ax.set_xlabel("value")
    ax.set_ylabel("density")
    ax.legend()
    ax.text(0.98, 0.82, f"KS = {ks:.5f}", transform=ax.transAxes, ha="right")
    _finish(fig, spec)
    print(f"density_overlay {check}: ks {ks!r} ({ks_kind})")
    return {"kind": spec.plot_kind, "check": check, "ks": ks, "ks_kind": ks_kind}


def _render_deviation_tail(spec: PlotSpec, rows: list[dict]) -> dict:
    fig, ax = _new_axes("upper-deviation tails of normalized degrees")
    series = 0
    for i in sorted({int(float(r["i"])) for r in rows}):
        pts = [
            (float(r["a_pow_two_thirds"]), float(r["neg_log_tail"]))
            for r in rows
            if int(float(r["i"])) == i and r["censored"] in ("False", "false", "0")
            and r["neg_log_tail"] != ""
        ]
        if pts:
            xs, ys = zip(*sorted(pts))
            ax.plot(xs, ys, "o-", label=f"index {i}")
            series += 1
    if series == 0:
        ax.text(0.5, 0.5, "all cells censored\n(no tail events observed)",
                transform=ax.transAxes, ha="center", va="center")
    else:
        ax.legend()
    ax.set_xlabel("A^(2/3)")
    ax.set_ylabel("-log tail probability")
    _finish(fig, spec)
    print(f"deviation_tail: {series} uncensored series")
    return {"kind": spec.plot_kind, "series": series}


def render(spec: PlotSpec) -> dict:
    """Render one figure; returns the printed summary values."""
    rows = _read_rows(spec.input_csv, spec.plot_kind)
    if spec.plot_kind == "size_scaling":
        return _render_scaling(spec, rows, failure=False)
    if spec.plot_kind == "failure_scaling":
        return _render_scaling(spec, rows, failure=True)
    if spec.plot_kind == "success_curve":
        return _render_success_curve(spec, rows)
    if spec.plot_kind == "density_overlay":
        return _render_density_overlay(spec, rows)
    return _render_deviation_tail(spec, rows)
