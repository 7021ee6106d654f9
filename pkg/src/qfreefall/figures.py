"""Figure rendering for scenario reports.

One PNG per run, drawn purely from the ScenarioResult tables so the
picture always agrees with the delimited output next to it.  matplotlib
is imported lazily with the Agg backend; nothing here needs a display.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .scenarios import ScenarioResult, Table


def _numeric(table: Table) -> tuple[list[str], np.ndarray]:
    """Keep the numeric columns of a table, by header name."""
    header, rows = table
    names: list[str] = []
    columns: list[list[float]] = []
    for j, name in enumerate(header):
        if all(isinstance(row[j], (int, float)) for row in rows):
            names.append(name)
            columns.append([float(row[j]) for row in rows])
    return names, np.array(columns)


def _plot_curves(ax, table: Table, logy: bool = False) -> None:
    names, data = _numeric(table)
    x = data[0]
    for name, column in zip(names[1:], data[1:]):
        ax.plot(x, column, linewidth=1.2, label=name)
    ax.set_xlabel(names[0])
    if logy:
        ax.set_yscale("log")
    ax.legend(fontsize="small")


def render_figure(result: ScenarioResult, out_path: Path) -> Path:
    """Render the scenario's figure to out_path and return it."""
    import matplotlib

    matplotlib.use("Agg", force=True)
    import matplotlib.pyplot as plt

    kind = result.kind
    if kind == "wigner":
        fig, (top, bottom) = plt.subplots(2, 1, figsize=(6.4, 6.4))
    else:
        fig, ax = plt.subplots(figsize=(6.4, 4.4))

    if kind in ("ep-a", "evolve"):
        _plot_curves(ax, result.tables["density"])
        ax.set_ylabel("probability density")
        ax.set_title("densities before and after the fall")
    elif kind == "ep-b":
        names, data = _numeric(result.tables["moments"])
        ax.bar([str(int(v)) for v in data[0]], data[1], color="#4878cf")
        ax.set_xlabel("velocity moment order")
        ax.set_ylabel("cross-species mismatch")
        ax.set_title("velocity-moment agreement between masses")
    elif kind == "dephase":
        names, data = _numeric(result.tables["sweep"])
        t = data[names.index("t")]
        ax.plot(t, data[names.index("abs_gamma")], linewidth=1.4, label="abs_gamma")
        ax.plot(
            t,
            data[names.index("gaussian_approx")],
            linewidth=1.2,
            linestyle="--",
            label="gaussian_approx",
        )
        ax.plot(t, data[names.index("re_gamma")], linewidth=0.8, label="re_gamma")
        ax.set_xlabel("t")
        ax.set_ylabel("coherence")
        ax.set_title("thermal dephasing of the internal coherence")
        ax.legend(fontsize="small")
    elif kind == "echo":
        names, data = _numeric(result.tables["stages"])
        t = data[names.index("time")]
        ax.plot(t, data[names.index("visibility")], "o-", label="visibility")
        ax.plot(t, data[names.index("purity")], "s--", label="purity")
        ax.set_xlabel("time")
        ax.set_ylim(0.0, 1.05)
        ax.set_title("coherence loss and revival around the field reversal")
        ax.legend(fontsize="small")
    elif kind == "qubit-phase":
        names, data = _numeric(result.tables["phases"])
        omega = data[names.index("omega")]
        ax.loglog(omega, np.abs(data[names.index("phi_g")]), "o-", label="phi_g")
        blur = np.abs(data[names.index("blur_b")])
        if np.all(blur > 0.0):
            ax.loglog(omega, blur, "s--", label="blur_b")
        ax.set_xlabel("omega")
        ax.set_ylabel("radians")
        ax.set_title("gravitational phase and packet blur versus frequency")
        ax.legend(fontsize="small")
    elif kind == "wigner":
        _plot_curves(top, result.tables["marginals"])
        top.set_ylabel("probability density")
        top.set_title("position marginal against the state density")
        _plot_curves(bottom, result.tables["slice"])
        bottom.set_ylabel("W(0, p)")
        bottom.set_title("central momentum slice")
    else:
        raise ValueError(f"no figure defined for scenario {kind!r}")

    fig.tight_layout()
    # Strip the writer tag so identical runs yield identical bytes.
    fig.savefig(out_path, dpi=110, metadata={"Software": None})
    plt.close(fig)
    return out_path
