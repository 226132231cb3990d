"""Cached cubic-Hermite tables for the expensive special functions.

A table stores a strictly increasing grid together with function values and
first derivatives, and interpolates with the C^1 cubic Hermite basis.  The
stored representation may be a transform of the target function (here: the
logarithm, to keep super-exponentially growing values in range); the owner
module handles the transform.  Queries outside the tabulated domain raise
``TableRangeError`` -- tables never extrapolate silently.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, TableRangeError

__all__ = ["SpecialFunctionTable"]

_FORMAT_VERSION = "expint-table v1"


@dataclass(frozen=True)
class SpecialFunctionTable:
    """Uniform-grid cubic Hermite interpolant with a certified error bound.

    Fields
    ------
    name: identifier used in error messages and the export header.
    grid: strictly increasing abscissae (uniform spacing assumed).
    values, derivative_values: stored ordinates and slopes.
    max_abs_error: certified bound on |interpolant - truth| in the stored
        representation, measured at panel midpoints against refinement.
    """

    name: str
    grid: np.ndarray
    values: np.ndarray
    derivative_values: np.ndarray
    max_abs_error: float
    domain: tuple[float, float] = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=float)
        v = np.asarray(self.values, dtype=float)
        d = np.asarray(self.derivative_values, dtype=float)
        if g.ndim != 1 or len(g) < 2:
            raise DomainError(f"{self.name}: grid must be 1-D with >= 2 nodes")
        if not (len(g) == len(v) == len(d)):
            raise DomainError(f"{self.name}: grid/values/derivatives length mismatch")
        if not np.all(np.diff(g) > 0):
            raise DomainError(f"{self.name}: grid must be strictly increasing")
        if not (np.all(np.isfinite(v)) and np.all(np.isfinite(d))):
            raise DomainError(f"{self.name}: table entries must be finite")
        if not self.max_abs_error > 0:
            raise DomainError(f"{self.name}: max_abs_error must be positive")
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "derivative_values", d)
        if self.domain is None:
            object.__setattr__(self, "domain", (float(g[0]), float(g[-1])))

    # -- interpolation ---------------------------------------------------

    def __call__(self, x):
        """Cubic Hermite value at x (scalar or array); domain-checked."""
        xa = np.asarray(x, dtype=float)
        lo, hi = self.domain
        if np.any(xa < lo) or np.any(xa > hi):
            bad = xa[(xa < lo) | (xa > hi)]
            raise TableRangeError(self.name, bad.flat[0] if bad.size else x, lo, hi)
        out = self._eval(np.atleast_1d(xa))
        return float(out[0]) if np.ndim(x) == 0 else out

    def _eval(self, xa: np.ndarray) -> np.ndarray:
        g = self.grid
        h = (g[-1] - g[0]) / (len(g) - 1)
        idx = np.clip(((xa - g[0]) / h).astype(np.intp), 0, len(g) - 2)
        w = (xa - g[idx]) / h
        w2 = w * w
        w3 = w2 * w
        y0 = self.values[idx]
        y1 = self.values[idx + 1]
        d0 = self.derivative_values[idx] * h
        d1 = self.derivative_values[idx + 1] * h
        return (
            (2 * w3 - 3 * w2 + 1) * y0
            + (w3 - 2 * w2 + w) * d0
            + (-2 * w3 + 3 * w2) * y1
            + (w3 - w2) * d1
        )

    # -- construction ----------------------------------------------------

    @staticmethod
    def build_cumulative(
        name: str,
        grid: np.ndarray,
        derivative_fn,
        anchor_value: float,
        anchor: str = "left",
        gl_nodes: int = 7,
        log_space: bool = False,
    ) -> "SpecialFunctionTable":
        """Tabulate an antiderivative by per-panel Gauss-Legendre integration.

        ``derivative_fn`` returns the integrand (the target's derivative) in
        linear space, or its log when ``log_space`` -- then panel integrals
        are accumulated with logaddexp and the stored values are logs.
        ``anchor``: which end carries the known value (`left` or `right`).
        """
        g = np.asarray(grid, dtype=float)
        xs, ws = np.polynomial.legendre.leggauss(gl_nodes)
        mid = 0.5 * (g[1:] + g[:-1])
        half = 0.5 * np.diff(g)
        nodes = mid[:, None] + half[:, None] * xs[None, :]
        if log_space:
            log_fp = derivative_fn(nodes.ravel()).reshape(nodes.shape)
            log_w = np.log(ws)[None, :] + np.log(half)[:, None]
            panel_log = _logsumexp_rows(log_fp + log_w)
            vals = np.empty(len(g))
            if anchor == "left":
                vals[0] = anchor_value
                for i in range(len(g) - 1):
                    vals[i + 1] = np.logaddexp(vals[i], panel_log[i])
            else:
                # right-anchored log accumulation would need signed logsumexp;
                # not used for the monotone-increasing tables built here
                raise DomainError("log-space tables must be left-anchored")
            deriv = derivative_fn(g)  # stored slope = d(log target)/dx, see caller
        else:
            fp = derivative_fn(nodes.ravel()).reshape(nodes.shape)
            panel = np.sum(fp * ws[None, :], axis=1) * half
            vals = np.empty(len(g))
            if anchor == "left":
                vals[0] = anchor_value
                np.cumsum(panel, out=vals[1:])
                vals[1:] += anchor_value
            else:
                vals[-1] = anchor_value
                vals[:-1] = anchor_value + np.cumsum(panel[::-1])[::-1]
            deriv = derivative_fn(g)
        # certify by probing midpoints against a half-panel refinement
        err = _certify(g, vals, deriv, derivative_fn, log_space, anchor)
        return SpecialFunctionTable(
            name=name,
            grid=g,
            values=vals,
            derivative_values=np.asarray(deriv, dtype=float),
            max_abs_error=err,
        )

    # -- text serialization ------------------------------------------------

    def export_text(self) -> str:
        """Versioned text format: header, then x<TAB>value<TAB>derivative rows."""
        lo, hi = self.domain
        lines = [
            f"{_FORMAT_VERSION}\tname={self.name}\tdomain=[{lo:.17g},{hi:.17g}]"
            f"\tmax_abs_error={self.max_abs_error:.17g}\tn={len(self.grid)}"
        ]
        for x, v, d in zip(self.grid, self.values, self.derivative_values):
            lines.append(f"{x:.17g}\t{v:.17g}\t{d:.17g}")
        return "\n".join(lines) + "\n"

    @staticmethod
    def import_text(text: str) -> "SpecialFunctionTable":
        lines = text.strip().splitlines()
        header = lines[0].split("\t")
        if header[0] != _FORMAT_VERSION:
            raise DomainError(f"unsupported table format: {header[0]!r}")
        meta = dict(part.split("=", 1) for part in header[1:])
        rows = np.array([[float(tok) for tok in ln.split("\t")] for ln in lines[1:]])
        if len(rows) != int(meta["n"]):
            raise DomainError("table row count disagrees with header")
        return SpecialFunctionTable(
            name=meta["name"],
            grid=rows[:, 0],
            values=rows[:, 1],
            derivative_values=rows[:, 2],
            max_abs_error=float(meta["max_abs_error"]),
        )


def _logsumexp_rows(a: np.ndarray) -> np.ndarray:
    mx = a.max(axis=1)
    return mx + np.log(np.sum(np.exp(a - mx[:, None]), axis=1))


def _certify(grid, vals, deriv, derivative_fn, log_space, anchor, probe_stride=37):
    """Max midpoint discrepancy between the Hermite value and a refined one."""
    g = np.asarray(grid)
    idx = np.arange(0, len(g) - 1, probe_stride)
    xm = 0.5 * (g[idx] + g[idx + 1])
    xs, ws = np.polynomial.legendre.leggauss(7)
    worst = 0.0
    h = g[1] - g[0]
    for i, x in zip(idx, xm):
        nodes = 0.5 * (x - g[i]) * xs + 0.5 * (x + g[i])
        if log_space:
            lp = derivative_fn(nodes) + np.log(ws * 0.5 * (x - g[i]))
            m = lp.max()
            truth = np.logaddexp(vals[i], m + np.log(np.exp(lp - m).sum()))
        else:
            truth = vals[i] + np.sum(derivative_fn(nodes) * ws) * 0.5 * (x - g[i])
        w = (x - g[i]) / h
        w2, w3 = w * w, w * w * w
        interp = (
            (2 * w3 - 3 * w2 + 1) * vals[i]
            + (w3 - 2 * w2 + w) * deriv[i] * h
            + (-2 * w3 + 3 * w2) * vals[i + 1]
            + (w3 - w2) * deriv[i + 1] * h
        )
        worst = max(worst, abs(interp - truth))
    return max(worst * 4.0, 1e-15)
