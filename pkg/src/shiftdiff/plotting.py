"""Figure rendering for sweep and comparison tables."""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


def _series(rows):
    """Group rows into {(method, order): (h list, value list)}, grid-ordered."""
    out = {}
    for row in rows:
        out.setdefault((row.method, row.order), ([], []))
        hs, vs = out[(row.method, row.order)]
        hs.append(row.h)
        vs.append(row.value)
    return out


def save_sweep_figure(rows, path, title=None):
    """One panel per approximation series, exact reference overlaid."""
    groups = _series(rows)
    exact = groups.pop(("exact", 0), None)
    if exact is None:
        for key in list(groups):
            if key[0] == "exact":
                exact = groups.pop(key)
                break
    panels = sorted(groups) or [("exact", 0)]
    ncols = min(len(panels), 2)
    nrows = (len(panels) + ncols - 1) // ncols
    fig, axes = plt.subplots(
        nrows, ncols, figsize=(5.2 * ncols, 3.6 * nrows), squeeze=False
    )
    for ax, key in zip(axes.flat, panels):
        hs, vs = groups.get(key, exact)
        if exact is not None:
            ax.plot(exact[0], exact[1], color="0.25", lw=0.9, label="exact")
        ax.plot(hs, vs, color="crimson", lw=1.4, label=f"{key[0]} order {key[1]}")
        ax.set_xlabel("h")
        ax.set_ylabel("D(h)")
        ax.legend(loc="upper left", fontsize=8)
    for ax in axes.flat[len(panels) :]:
        ax.set_visible(False)
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_compare_figure(rows, reference, path, title=None):
    """Absolute error against the exact reference, one curve per series."""
    groups = _series(rows)
    groups.pop(("exact", 0), None)
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ref = dict(zip(reference[0], reference[1]))
    for (method, order), (hs, vs) in sorted(groups.items()):
        errs = [abs(v - ref[h]) + 1e-18 for h, v in zip(hs, vs)]
        ax.semilogy(hs, errs, lw=1.1, label=f"{method} order {order}")
    ax.set_xlabel("h")
    ax.set_ylabel("|D - D_exact|")
    ax.legend(fontsize=8)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
