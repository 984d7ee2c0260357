"""Minimal standalone SVG line plots.

Every plotted series is also written into the file as an XML comment
(``<!-- data series=... -->`` followed by ``x,y`` lines) so the numbers can be
recovered without parsing the drawing.
"""
import math
from xml.sax.saxutils import escape

PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"]
W, H = 640, 420
ML, MR, MT, MB = 70, 150, 40, 50


def _tf(v, log):
    if log:
        return math.log10(v) if v > 0 else None
    return v


def _ticks(lo, hi, log):
    if log:
        a, b = math.floor(lo), math.ceil(hi)
        step = max(1, (b - a) // 8)
        return [float(k) for k in range(a, b + 1, step)]
    if hi == lo:
        return [lo]
    raw = (hi - lo) / 6
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=raw)
    start = math.ceil(lo / step) * step
    out = []
    t = start
    while t <= hi + 1e-12 * abs(hi):
        out.append(t)
        t += step
    return out


def _label(t, log):
    if log:
        return f"1e{int(t)}"
    return f"{t:g}"


def line_plot(series, title="", xlabel="", ylabel="", logx=False, logy=True):
    """Render ``series`` (list of ``(name, xs, ys)``) as an SVG string.

    Non-positive values are skipped on log axes. Dashed style is used for
    names ending in ``bound``.
    """
    pts = []
    for _, xs, ys in series:
        for x, y in zip(xs, ys):
            tx, ty = _tf(float(x), logx), _tf(float(y), logy)
            if tx is not None and ty is not None and math.isfinite(tx) and math.isfinite(ty):
                pts.append((tx, ty))
    if pts:
        x0, x1 = min(p[0] for p in pts), max(p[0] for p in pts)
        y0, y1 = min(p[1] for p in pts), max(p[1] for p in pts)
    else:
        x0, x1, y0, y1 = 0.0, 1.0, 0.0, 1.0
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    pw, ph = W - ML - MR, H - MT - MB

    def sx(v):
        return ML + (v - x0) / (x1 - x0) * pw

    def sy(v):
        return MT + ph - (v - y0) / (y1 - y0) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">']
    for name, xs, ys in series:
        out.append(f"<!-- data series={escape(name)}")
        out.extend(f"{float(x)!r},{float(y)!r}" for x, y in zip(xs, ys))
        out.append("-->")
    out.append(f'<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>')
    out.append(f'<rect x="{ML}" y="{MT}" width="{pw}" height="{ph}" fill="none" stroke="black"/>')
    for t in _ticks(x0, x1, logx):
        if x0 <= t <= x1:
            X = sx(t)
            out.append(f'<line x1="{X:.2f}" y1="{MT + ph}" x2="{X:.2f}" y2="{MT + ph + 5}" stroke="black"/>')
            out.append(f'<text x="{X:.2f}" y="{MT + ph + 18}" font-size="11" text-anchor="middle">{_label(t, logx)}</text>')
    for t in _ticks(y0, y1, logy):
        if y0 <= t <= y1:
            Y = sy(t)
            out.append(f'<line x1="{ML - 5}" y1="{Y:.2f}" x2="{ML}" y2="{Y:.2f}" stroke="black"/>')
            out.append(f'<text x="{ML - 8}" y="{Y + 4:.2f}" font-size="11" text-anchor="end">{_label(t, logy)}</text>')
    out.append(f'<text x="{W / 2:.0f}" y="22" font-size="14" text-anchor="middle">{escape(title)}</text>')
    out.append(f'<text x="{ML + pw / 2:.0f}" y="{H - 10}" font-size="12" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="16" y="{MT + ph / 2:.0f}" font-size="12" text-anchor="middle" '
               f'transform="rotate(-90 16 {MT + ph / 2:.0f})">{escape(ylabel)}</text>')
    for k, (name, xs, ys) in enumerate(series):
        col = PALETTE[k % len(PALETTE)]
        dash = ' stroke-dasharray="6,4"' if name.endswith("bound") else ""
        seg = []
        for x, y in zip(xs, ys):
            tx, ty = _tf(float(x), logx), _tf(float(y), logy)
            if tx is None or ty is None or not (math.isfinite(tx) and math.isfinite(ty)):
                continue
            seg.append(f"{sx(tx):.2f},{sy(ty):.2f}")
        if seg:
            out.append(f'<polyline points="{" ".join(seg)}" fill="none" stroke="{col}" stroke-width="1.5"{dash}/>')
        ly = MT + 14 + 18 * k
        out.append(f'<line x1="{W - MR + 10}" y1="{ly}" x2="{W - MR + 34}" y2="{ly}" stroke="{col}" stroke-width="2"{dash}/>')
        out.append(f'<text x="{W - MR + 40}" y="{ly + 4}" font-size="11">{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def read_data(svg_text):
    """Recover ``{name: [(x, y), ...]}`` from the embedded data comments."""
    data, cur = {}, None
    for ln in svg_text.splitlines():
        if ln.startswith("<!-- data series="):
            cur = ln[len("<!-- data series="):]
            data[cur] = []
        elif ln == "-->":
            cur = None
        elif cur is not None:
            x, y = ln.split(",")
            data[cur].append((float(x), float(y)))
    return data
