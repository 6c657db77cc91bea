"""Matplotlib figure rendering for the report path.

All figures are written straight to files (Agg backend); nothing opens a
window.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import matplotlib.tri as mtri
import numpy as np

from .vtk_io import pressure_on_all_nodes, subtriangulate

__all__ = ["save_trace_figure", "save_field_figure", "save_convergence_figure",
           "save_refinement_figure"]


def save_trace_figure(path, g0, g1, lam):
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.5), sharey=False)
    ax1.plot(g0.y, g0.pressure, "C0.-", lw=1, ms=3, label="inlet  x=0")
    ax1.plot(g1.y, g1.pressure, "C1.-", lw=1, ms=3, label="outlet x=1")
    ax1.set_xlabel("y")
    ax1.set_ylabel("pressure")
    ax1.legend(fontsize=8)
    jump = g1.pressure - g0.pressure
    ax2.plot(g0.y, jump, "C2.-", lw=1, ms=3, label="jump p(1,y) - p(0,y)")
    ax2.axhline(-lam, color="k", ls="--", lw=0.8, label=f"-lambda = {-lam:g}")
    ax2.set_xlabel("y")
    ax2.legend(fontsize=8)
    for ax in (ax1, ax2):
        ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_field_figure(path, mesh, solution):
    tri = mtri.Triangulation(mesh.nodes[:, 0], mesh.nodes[:, 1], subtriangulate(mesh))
    speed = np.hypot(solution.u[0::2], solution.u[1::2])
    pn = pressure_on_all_nodes(mesh, solution.p)
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(7, 6), sharex=True)
    for ax, vals, label in ((ax1, speed, "|u|"), (ax2, pn, "p")):
        im = ax.tripcolor(tri, vals, shading="gouraud")
        fig.colorbar(im, ax=ax, label=label)
        ax.set_aspect("equal")
        ax.set_ylabel("y")
    ax2.set_xlabel("x")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_convergence_figure(path, table):
    fig, ax = plt.subplots(figsize=(5, 4))
    for key, marker in zip(table.errors, "os^"):
        ax.loglog(table.h, table.errors[key], marker + "-", label=key)
    for order, style in ((2, ":"), (3, "--")):
        ref = table.errors[list(table.errors)[0]][0]
        ax.loglog(table.h, ref * (table.h / table.h[0]) ** order, "k" + style,
                  lw=0.8, label=f"order {order}")
    ax.set_xlabel("h")
    ax.set_ylabel("error")
    ax.grid(alpha=0.3, which="both")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_refinement_figure(path, study):
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.loglog(study["h"], study["jump_dev"], "o-", label="|mean jump + lambda|")
    ax.loglog(study["h"], study["deriv_mismatch"], "s-", label="du/dx mismatch")
    ref = study["jump_dev"][0]
    ax.loglog(study["h"], ref * (study["h"] / study["h"][0]) ** 2, "k:", lw=0.8,
              label="order 2")
    ax.set_xlabel("h")
    ax.set_ylabel("defect")
    ax.grid(alpha=0.3, which="both")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
