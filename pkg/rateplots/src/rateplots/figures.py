"""Figure rendering.

Each panel shows the reported values on log-log axes, a least-squares fit
through the rows that carry no flag, and a dashed reference line with the
theoretical slope anchored at the largest n.  Flagged rows (floor-limited,
accuracy) render hollow and never enter the fit.
"""

from __future__ import annotations

import math
import warnings

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .frame import ReportFrame

FIG_RC = {
    "figure.figsize": (4.2, 3.4),
    "font.size": 9,
    "font.family": "DejaVu Sans",
    "svg.fonttype": "none",          # keep annotations as searchable text
    "svg.hashsalt": "rateplots",     # deterministic element ids
}


def _fit_loglog(pts):
    """Plain least squares of log(value) on log(n); None when underdetermined."""
    clean = [(n, v) for (n, v, _se, flag) in pts if not flag and v > 0]
    if len({n for n, _ in clean}) < 2:
        return None
    xs = [math.log(n) for n, _ in clean]
    ys = [math.log(v) for _, v in clean]
    mx = sum(xs) / len(xs)
    my = sum(ys) / len(ys)
    sxx = sum((x - mx) ** 2 for x in xs)
    sxy = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    slope = sxy / sxx
    return slope, my - slope * mx


def _render_panel(ax, pts, label, ref_slope):
    solid = [(n, v, se) for (n, v, se, flag) in pts if not flag]
    hollow = [(n, v, se) for (n, v, se, flag) in pts if flag]
    if solid:
        ns, vs, ses = zip(*solid)
        ax.errorbar(ns, vs, yerr=ses, fmt="o", ms=4, lw=1, capsize=2,
                    color="#1f5fa8", label=label)
    if hollow:
        ns, vs, ses = zip(*hollow)
        ax.errorbar(ns, vs, yerr=ses, fmt="o", ms=4, lw=1, capsize=2,
                    mfc="none", color="#999999", label=f"{label} (excluded)")
    fit = _fit_loglog(pts)
    n_lo = min(n for n, *_ in pts)
    n_hi = max(n for n, *_ in pts)
    if fit is not None:
        slope, intercept = fit
        xs = [n_lo, n_hi]
        ys = [math.exp(intercept + slope * math.log(x)) for x in xs]
        ax.plot(xs, ys, "-", color="#d07000", lw=1.2,
                label=f"fit slope {slope:.3f}")
        ax.annotate(f"slope {slope:.3f}", xy=(0.05, 0.08),
                    xycoords="axes fraction", color="#d07000")
    if ref_slope is not None:
        # anchored at the largest unflagged value (falls back to any row)
        anchor = next(((n, v) for (n, v, _se, flag) in reversed(pts) if not flag),
                      (pts[-1][0], pts[-1][1]))
        ys = [anchor[1] * (x / anchor[0]) ** ref_slope for x in (n_lo, n_hi)]
        ax.plot([n_lo, n_hi], ys, "--", color="#444444", lw=1.0,
                label=f"reference slope {ref_slope:g}")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("n")
    ax.set_ylabel(label)
    ax.legend(fontsize=7, frameon=False)
    return fit


def plot_rates(csv_path, out_path, ref_slopes=None) -> dict:
    """Render one panel per distance metric; returns {metric: fitted slope}.

    ref_slopes maps metric name to the dashed reference slope (default -1/2
    for every metric present).  Metrics with no positive unflagged values are
    omitted with a warning.
    """
    frame = ReportFrame.read(csv_path)
    ref_slopes = ref_slopes or {}
    metrics = []
    for metric in frame.metrics():
        pts = frame.series(metric)
        if not pts:
            warnings.warn(f"metric {metric!r}: no rows, panel omitted")
            continue
        metrics.append((metric, pts))
    if not metrics:
        warnings.warn("no plottable metric groups; writing empty figure")
    fitted = {}
    with plt.rc_context(FIG_RC):
        ncol = max(1, len(metrics))
        fig, axes = plt.subplots(1, ncol,
                                 figsize=(FIG_RC["figure.figsize"][0] * ncol,
                                          FIG_RC["figure.figsize"][1]),
                                 squeeze=False)
        for ax, (metric, pts) in zip(axes[0], metrics):
            fit = _render_panel(ax, pts, metric, ref_slopes.get(metric, -0.5))
            if fit is not None:
                fitted[metric] = fit[0]
        for ax in axes[0][len(metrics):]:
            ax.axis("off")
        fig.tight_layout()
        fig.savefig(out_path, metadata={"Date": None})
        plt.close(fig)
    return fitted


def plot_rho(csv_path, out_path, alpha_beta=None) -> dict:
    """Overlap-integral decay panel with a -alpha*beta/2 reference slope."""
    frame = ReportFrame.read(csv_path)
    pts = frame.series("rho")
    fitted = {}
    with plt.rc_context(FIG_RC):
        fig, ax = plt.subplots()
        if pts:
            ref = None if alpha_beta is None else -float(alpha_beta) / 2.0
            fit = _render_panel(ax, pts, "rho", ref)
            ax.set_xlabel("k")
            if fit is not None:
                fitted["rho"] = fit[0]
        else:
            warnings.warn("no rho rows, panel omitted")
            ax.axis("off")
        fig.tight_layout()
        fig.savefig(out_path, metadata={"Date": None})
        plt.close(fig)
    return fitted
