"""Minimal self-contained SVG rendering for diagnostics and screeplots.

Hand-emitted markup with fixed-precision coordinates, so the same inputs
always produce byte-identical files and the toolchain stays free of plotting
dependencies.  CSV twins of every figure are written by the CLI alongside.
"""

__all__ = ["render_diagnostics_svg", "render_screeplot_svg"]

_FONT = 'font-family="monospace" font-size="11"'


def _f(x):
    return format(float(x), ".2f")


def _limits(values):
    lo = min(0.0, min(values))
    hi = max(0.0, max(values))
    if hi - lo < 1e-12:
        lo, hi = lo - 0.5, hi + 0.5
    pad = 0.05 * (hi - lo)
    return lo - pad, hi + pad


class _Canvas:
    def __init__(self, width, height):
        self.width = width
        self.height = height
        self.parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
            f'height="{height}" viewBox="0 0 {width} {height}">',
            f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        ]

    def line(self, x1, y1, x2, y2, color="black", width=1):
        self.parts.append(
            f'<line x1="{_f(x1)}" y1="{_f(y1)}" x2="{_f(x2)}" y2="{_f(y2)}" '
            f'stroke="{color}" stroke-width="{width}"/>'
        )

    def rect(self, x, y, w, h, fill="steelblue"):
        self.parts.append(
            f'<rect x="{_f(x)}" y="{_f(y)}" width="{_f(w)}" height="{_f(h)}" '
            f'fill="{fill}"/>'
        )

    def circle(self, x, y, r=3, fill="black"):
        self.parts.append(
            f'<circle cx="{_f(x)}" cy="{_f(y)}" r="{r}" fill="{fill}"/>'
        )

    def polyline(self, points, color="black"):
        coords = " ".join(f"{_f(x)},{_f(y)}" for x, y in points)
        self.parts.append(
            f'<polyline points="{coords}" fill="none" stroke="{color}"/>'
        )

    def text(self, x, y, s, anchor="start"):
        self.parts.append(
            f'<text x="{_f(x)}" y="{_f(y)}" {_FONT} text-anchor="{anchor}">{s}</text>'
        )

    def render(self):
        return "\n".join(self.parts + ["</svg>"]) + "\n"


def _panel(canvas, x0, y0, w, h, values, style):
    """One framed panel: dots or zero-anchored bars, one slot per interval."""
    lo, hi = _limits(values)

    def ymap(v):
        return y0 + (hi - v) / (hi - lo) * h

    canvas.parts.append(
        f'<rect x="{_f(x0)}" y="{_f(y0)}" width="{_f(w)}" height="{_f(h)}" '
        f'fill="none" stroke="gray"/>'
    )
    if lo < 0.0 < hi:
        canvas.line(x0, ymap(0.0), x0 + w, ymap(0.0), color="lightgray")
    slot = w / len(values)
    for i, v in enumerate(values):
        cx = x0 + (i + 0.5) * slot
        if style == "dot":
            canvas.circle(cx, ymap(v))
        else:
            top = ymap(max(v, 0.0))
            canvas.rect(cx - 0.3 * slot, top, 0.6 * slot, abs(ymap(0.0) - ymap(v)))
    canvas.text(x0 - 4, ymap(hi) + 9, format(hi, ".3g"), anchor="end")
    canvas.text(x0 - 4, ymap(lo), format(lo, ".3g"), anchor="end")


def render_diagnostics_svg(diagnostics, lag=1):
    """Per-channel interval statistics: mean dots, variance and
    autocovariance bars, one panel row per channel."""
    channels = []
    by_channel = {}
    for row in diagnostics:
        name = row["channel"]
        if name not in by_channel:
            by_channel[name] = []
            channels.append(name)
        by_channel[name].append(row)

    panel_w, panel_h, gap_x, gap_y = 170, 64, 64, 18
    left, top = 90, 36
    columns = ("mean", "variance", "autocov")
    titles = ("interval mean", "interval variance", f"interval autocov (lag {lag})")
    width = left + 3 * panel_w + 2 * gap_x + 20
    height = top + len(channels) * (panel_h + gap_y) + 10
    canvas = _Canvas(width, height)
    for j, title in enumerate(titles):
        canvas.text(left + j * (panel_w + gap_x) + panel_w / 2, top - 12, title,
                    anchor="middle")
    for i, name in enumerate(channels):
        y0 = top + i * (panel_h + gap_y)
        canvas.text(12, y0 + panel_h / 2 + 4, name)
        rows = sorted(by_channel[name], key=lambda r: r["interval_index"])
        for j, key in enumerate(columns):
            x0 = left + j * (panel_w + gap_x)
            style = "dot" if key == "mean" else "bar"
            _panel(canvas, x0, y0, panel_w, panel_h, [r[key] for r in rows], style)
    return canvas.render()


def render_screeplot_svg(pairs, label="diagonal energy"):
    """Scree-style plot of (component index, value) pairs."""
    left, top, w, h = 70, 30, 440, 260
    canvas = _Canvas(left + w + 30, top + h + 50)
    values = [v for _, v in pairs]
    lo, hi = 0.0, max(max(values), 1e-12) * 1.05

    def xmap(i):
        return left + (i - 0.5) / len(pairs) * w

    def ymap(v):
        return top + (hi - v) / (hi - lo) * h

    canvas.line(left, top, left, top + h)
    canvas.line(left, top + h, left + w, top + h)
    for t in range(5):
        v = lo + (hi - lo) * t / 4
        canvas.line(left - 4, ymap(v), left, ymap(v))
        canvas.text(left - 8, ymap(v) + 4, format(v, ".3g"), anchor="end")
    points = [(xmap(i), ymap(v)) for i, v in pairs]
    canvas.polyline(points)
    for x, y in points:
        canvas.circle(x, y, r=4)
    for i, _ in pairs:
        canvas.text(xmap(i), top + h + 16, str(i), anchor="middle")
    canvas.text(left + w / 2, top + h + 36, "component", anchor="middle")
    canvas.text(16, top - 12, label)
    return canvas.render()
