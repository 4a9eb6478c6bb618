"""Deterministic report emission: key = value lines, TSV blocks, JSON,
and optional matplotlib figures rendered to files next to the text output.

Key order is insertion order and never depends on hashing, so the text
form is byte-stable across runs and suitable for golden-file tests.
"""

import json
import os


class Report:
    def __init__(self, command):
        self.items = []          # ("kv", key, value) | ("table", name, header, rows)
        self.add("command", command)

    def add(self, key, value):
        if isinstance(value, bool):
            value = "true" if value else "false"
        self.items.append(("kv", key, str(value)))
        return self

    def add_table(self, name, header, rows):
        rows = [tuple(str(c) for c in row) for row in rows]
        self.items.append(("table", name, tuple(header), rows))
        return self

    def render_text(self):
        out = []
        for item in self.items:
            if item[0] == "kv":
                out.append(f"{item[1]} = {item[2]}")
            else:
                _, name, header, rows = item
                out.append(f"[{name}]")
                out.append("\t".join(header))
                for row in rows:
                    out.append("\t".join(row))
        return "\n".join(out) + "\n"

    def render_json(self):
        data = {}
        for item in self.items:
            if item[0] == "kv":
                data[item[1]] = item[2]
            else:
                _, name, header, rows = item
                data[name] = [dict(zip(header, row)) for row in rows]
        return json.dumps(data, indent=2) + "\n"

    def get(self, key):
        for item in self.items:
            if item[0] == "kv" and item[1] == key:
                return item[2]
        return None


def _figure_axes():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    fig, ax = plt.subplots(figsize=(6.0, 3.7))
    return plt, fig, ax


def save_class_histogram(counts, path, title):
    """Bar chart of invariant value -> point count."""
    plt, fig, ax = _figure_axes()
    labels = [str(c) for c in counts]
    values = [counts[c] for c in counts]
    ax.bar(range(len(values)), values, color="#3b6ea5")
    ax.set_xticks(range(len(values)))
    ax.set_xticklabels(labels)
    ax.set_xlabel("local invariant")
    ax.set_ylabel("smooth fibre points")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_bound_figure(bound, q_verdicts, path, title):
    """Threshold line with the tested residue-field sizes marked."""
    plt, fig, ax = _figure_axes()
    thr = bound.float_value()
    qs = [q for q, _ in q_verdicts]
    top = max(qs + [thr]) * 1.3 if qs else thr * 1.3
    ax.axhline(thr, color="#a54b3b", label=f"threshold {thr:.3f}")
    for q, ok in q_verdicts:
        ax.plot([0], [q], marker="o",
                color="#3b6ea5" if ok else "#888888")
        ax.annotate(f"q={q}", (0, q), textcoords="offset points", xytext=(8, 0))
    ax.set_ylim(0, top)
    ax.set_xticks([])
    ax.set_ylabel("|F|")
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_count_figure(rows, path, title):
    """Grouped point counts per extension degree."""
    plt, fig, ax = _figure_axes()
    ks = [r[0] for r in rows]
    totals = [r[1] for r in rows]
    smooths = [r[2] for r in rows]
    xs = range(len(ks))
    ax.bar([x - 0.2 for x in xs], totals, width=0.4, label="all points",
           color="#3b6ea5")
    ax.bar([x + 0.2 for x in xs], smooths, width=0.4, label="smooth",
           color="#6aa55e")
    ax.set_xticks(list(xs))
    ax.set_xticklabels([f"k={k}" for k in ks])
    ax.set_ylabel("points")
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def emit(report, json_mode=False, figures_dir=None, figure_jobs=()):
    """Render the report; optionally mirror it (and figures) into a directory.

    figure_jobs: (suffix, draw) pairs where draw(path) saves one figure.
    """
    text = report.render_json() if json_mode else report.render_text()
    if figures_dir:
        os.makedirs(figures_dir, exist_ok=True)
        stem = report.get("command") or "report"
        label = report.get("model") or report.get("family") or ""
        if label:
            stem = f"{stem}_{label}"
        ext = "json" if json_mode else "txt"
        with open(os.path.join(figures_dir, f"{stem}.{ext}"), "w") as fh:
            fh.write(text)
        for suffix, draw in figure_jobs:
            draw(os.path.join(figures_dir, f"{stem}_{suffix}.png"))
    return text
