"""Score panels: one horizontal bar chart per (encoding, depth) cell.

The two training bars sit on top, then the six probe words. Bar length is
the mean score on a fixed [0, 1] axis and whiskers are 95% CI half-widths.
"""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
from matplotlib.figure import Figure  # noqa: E402

from .experiment import CATEGORIES  # noqa: E402

LABELS = {
    "train-pos": "train, rating 1",
    "train-neg": "train, rating 0",
    "YY": "YY",
    "ZZ": "ZZ",
    "XY": "xY",
    "YZ": "YZ",
    "XZ": "xZ",
    "ZY": "ZY",
}
STYLES = ("bars-svg", "table-text")

RC = {
    "svg.fonttype": "path",
    "svg.hashsalt": "symlab",
    "font.size": 9,
    "axes.spines.top": False,
    "axes.spines.right": False,
}


def score_panel(ax, stats: dict, title: str = ""):
    """Draw bars for ``stats`` (category -> AggregateRow) on ``ax``; returns the bar container."""
    cats = [c for c in CATEGORIES if c in stats]
    ypos = list(range(len(cats)))[::-1]
    means = [stats[c].mean for c in cats]
    errs = [stats[c].ci95 for c in cats]
    colors = ["0.55" if c.startswith("train") else "C0" for c in cats]
    bars = ax.barh(ypos, means, xerr=errs, color=colors, height=0.7,
                   error_kw={"ecolor": "black", "capsize": 2, "elinewidth": 0.8})
    ax.set_xlim(0.0, 1.0)
    ax.margins(x=0)
    ax.set_yticks(ypos)
    ax.set_yticklabels([LABELS.get(c, c) for c in cats])
    ax.set_xlabel("mean score")
    if title:
        ax.set_title(title)
    return bars


def panel_figure(stats: dict, title: str = "") -> Figure:
    with matplotlib.rc_context(RC):
        fig = Figure(figsize=(4.0, 2.8))
        ax = fig.add_subplot(111)
        score_panel(ax, stats, title)
        fig.tight_layout()
    return fig


def save_svg(fig: Figure, path) -> None:
    with matplotlib.rc_context(RC):
        fig.savefig(path, format="svg", metadata={"Date": None})


def text_table(report) -> str:
    lines = []
    header = f"{'encoding':<12}{'layers':>6}  {'category':<16}{'mean':>8}{'std':>8}{'ci95':>8}{'n':>5}"
    lines.append(header)
    lines.append("-" * len(header))
    for a in report.aggregate():
        lines.append(
            f"{a.encoding:<12}{a.layers:>6}  {LABELS.get(a.category, a.category):<16}"
            f"{a.mean:>8.3f}{a.std:>8.3f}{a.ci95:>8.3f}{a.n:>5}"
        )
    lines.append("")
    lines.append("paired differences (95% CI)")
    for enc, layers in report.cells():
        for a, b in (("YY", "YZ"), ("ZZ", "ZY")):
            try:
                mean, half, n = report.paired(enc, layers, a, b)
            except ValueError:
                continue
            verdict = "indistinguishable" if abs(mean) <= half else "different"
            lines.append(f"{enc:<12}{layers:>6}  {a}-{b:<13}{mean:>+8.3f} +/- {half:.3f}  {verdict}")
    return "\n".join(lines) + "\n"


def render_report(report, output_dir, style=STYLES) -> list[Path]:
    """Write SVG panels and/or the text table for every cell of ``report``."""
    if not report.rows:
        raise ValueError("empty report")
    styles = (style,) if isinstance(style, str) else tuple(style)
    for s in styles:
        if s not in STYLES:
            raise ValueError(f"unknown style {s!r}")
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if "bars-svg" in styles:
        for enc, layers in report.cells():
            fig = panel_figure(report.stats(enc, layers), f"{enc}, {layers} hidden layer{'s' if layers > 1 else ''}")
            path = out / f"scores_{enc}_{layers}.svg"
            save_svg(fig, path)
            written.append(path)
    if "table-text" in styles:
        path = out / "scores_table.txt"
        path.write_text(text_table(report))
        written.append(path)
    return written
