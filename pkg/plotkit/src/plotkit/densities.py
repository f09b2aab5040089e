"""Analytic densities for the harness sample laws, including product laws.

Law strings as they appear in the samples CSV:

- ``beta:u,v``            Beta(u, v)
- ``gg:u,v``              generalized Gamma: v/Gamma(u/v) x^{u-1} e^{-x^v}
- ``betagg:a,b,u,v``      product B * Z, B ~ Beta(a, b), Z ~ GG(u, v)
- ``joint_d1``            B1 * B2 * Z3 with B1~Beta(1,2), B2~Beta(3,1), Z3~GG(5,2)
- ``joint_d2``            (1-B1) * B2 * Z3, i.e. Beta(2,1) * Beta(3,1) * GG(5,2)

Product densities are built by numeric convolution of log-densities on a
uniform grid (products of positive variables turn into sums of logs).
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special

LOG_GRID_LO = -26.0
LOG_GRID_HI = 3.2
LOG_GRID_N = 6001


def beta_pdf(u: float, v: float, x: np.ndarray) -> np.ndarray:
    c = math.gamma(u + v) / (math.gamma(u) * math.gamma(v))
    inside = (x > 0) & (x < 1)
    out = np.zeros_like(x, dtype=float)
    xi = x[inside]
    out[inside] = c * xi ** (u - 1) * (1 - xi) ** (v - 1)
    return out


def gg_pdf(u: float, v: float, x: np.ndarray) -> np.ndarray:
    out = np.zeros_like(x, dtype=float)
    pos = x > 0
    xp = x[pos]
    out[pos] = v / math.gamma(u / v) * xp ** (u - 1) * np.exp(-(xp**v))
    return out


def beta_cdf(u: float, v: float, x: np.ndarray) -> np.ndarray:
    return special.betainc(u, v, np.clip(np.asarray(x, dtype=float), 0.0, 1.0))


def gg_cdf(u: float, v: float, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return special.gammainc(u / v, np.where(x > 0, x, 0.0) ** v)


def _log_density(pdf, grid: np.ndarray) -> np.ndarray:
    """Density of ln X on a log grid: f_X(e^s) * e^s."""
    x = np.exp(grid)
    return pdf(x) * x


def product_density(pdfs, x: np.ndarray) -> np.ndarray:
    """Density of a product of independent positive variables at points x.

    Convolves the component log-densities on a uniform grid, then maps back;
    accuracy is set by the grid step (~5e-3), ample for figure overlays.
    """
    grid = np.linspace(LOG_GRID_LO, LOG_GRID_HI, LOG_GRID_N)
    h = grid[1] - grid[0]
    conv = _log_density(pdfs[0], grid)
    lo = grid[0]
    for pdf in pdfs[1:]:
        nxt = _log_density(pdf, grid)
        conv = np.convolve(conv, nxt) * h
        lo = lo + grid[0]
    support = lo + np.arange(conv.size) * h
    out = np.zeros_like(x, dtype=float)
    pos = x > 0
    logs = np.log(x[pos])
    out[pos] = np.interp(logs, support, conv, left=0.0, right=0.0) / x[pos]
    return out


class LawError(ValueError):
    pass


def parse_law(law: str):
    """Return (pdf(x), cdf(x) or None) for a law string."""
    if law == "joint_d1":
        parts = [lambda x: beta_pdf(1, 2, x), lambda x: beta_pdf(3, 1, x),
                 lambda x: gg_pdf(5, 2, x)]
        return (lambda x: product_density(parts, np.asarray(x, dtype=float)), None)
    if law == "joint_d2":
        parts = [lambda x: beta_pdf(2, 1, x), lambda x: beta_pdf(3, 1, x),
                 lambda x: gg_pdf(5, 2, x)]
        return (lambda x: product_density(parts, np.asarray(x, dtype=float)), None)
    try:
        name, _, argstr = law.partition(":")
        args = [float(a) for a in argstr.split(",")] if argstr else []
    except ValueError as exc:
        raise LawError(f"cannot parse law string {law!r}") from exc
    if name == "beta" and len(args) == 2:
        u, v = args
        return (lambda x: beta_pdf(u, v, np.asarray(x, dtype=float)),
                lambda x: beta_cdf(u, v, x))
    if name == "gg" and len(args) == 2:
        u, v = args
        return (lambda x: gg_pdf(u, v, np.asarray(x, dtype=float)),
                lambda x: gg_cdf(u, v, x))
    if name == "betagg" and len(args) == 4:
        a, b, u, v = args
        parts = [lambda x: beta_pdf(a, b, x), lambda x: gg_pdf(u, v, x)]
        return (lambda x: product_density(parts, np.asarray(x, dtype=float)), None)
    raise LawError(f"unknown law string {law!r}")
