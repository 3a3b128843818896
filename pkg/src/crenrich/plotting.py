"""Matplotlib rendering of convergence reports."""

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

STYLE = {
    "cr": dict(color="tab:blue", marker="o", label="CR"),
    "c2": dict(color="m", marker="s", label="C2 (quadratic enrichment)"),
    "s3": dict(color="k", marker="^", label="S3 (cubic enrichment)"),
}

_RC = {
    "font.size": 10,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "legend.frameon": False,
    "svg.hashsalt": "crenrich",
    "svg.fonttype": "none",
}


def loglog_figure(report, width=5.0, height=3.8):
    """One polyline per element kind: L1 error against mesh size."""
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(width, height))
        for kind in report.kinds:
            h, err = report.sizes(kind), report.errors(kind)
            if len(h) == 0:
                continue
            style = dict(STYLE.get(kind, dict(label=kind)))
            slope = report.slopes.get(kind)
            if slope is not None:
                style["label"] += f", slope {slope:.2f}"
            ax.loglog(h, err, linewidth=1.5, markersize=4, **style)
        ax.set_xlabel("mesh size h (longest edge)")
        ax.set_ylabel("L1 error")
        ax.set_title(f"f{report.f_id}, alpha={report.params.alpha:g}, beta={report.params.beta:g}")
        if report.rows:
            ax.legend(loc="best", fontsize=8)
        fig.tight_layout()
    return fig


def save_figure(fig, path):
    """Save by file suffix (svg, png, pdf); metadata is stripped so output is reproducible."""
    path = os.path.expanduser(str(path))
    ext = os.path.splitext(path)[1].lstrip(".").lower() or "svg"
    metadata = {"Date": None} if ext == "svg" else None
    with plt.rc_context(_RC):
        fig.savefig(path, format=ext, metadata=metadata)
    plt.close(fig)
