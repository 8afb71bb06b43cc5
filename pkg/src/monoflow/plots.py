"""Figure rendering for the CLI report path.

Every plot function takes computed artifacts and writes one PNG next to the
delimited output.  Rendering is headless (Agg) and is kept free of run
metadata so repeated runs produce stable files.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_SAVE_KW = dict(dpi=130, metadata={"Software": "monoflow"})


def _finish(fig, path):
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)
    return path


def plot_trajectory(traj, path, title=""):
    """Component time series, plus a phase portrait for 2- and 3-state systems."""
    n = traj.dimension
    if n in (2, 3):
        fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.6, 4.0))
    else:
        fig, ax1 = plt.subplots(figsize=(6.4, 4.0))
        ax2 = None
    for i in range(n):
        ax1.plot(traj.times, traj.states[:, i], lw=0.9, label=f"x{i + 1}")
    ax1.set_xlabel("t")
    ax1.set_ylabel("state")
    ax1.legend(loc="best", fontsize=8)
    ax1.set_title(title or f"{traj.direction.value} trajectory")
    if ax2 is not None:
        if n == 2:
            ax2.plot(traj.states[:, 0], traj.states[:, 1], lw=0.8)
            ax2.set_xlabel("x1")
            ax2.set_ylabel("x2")
        else:
            ax2.remove()
            ax2 = fig.add_subplot(1, 2, 2, projection="3d")
            ax2.plot(traj.states[:, 0], traj.states[:, 1], traj.states[:, 2], lw=0.7)
            ax2.set_xlabel("x1")
            ax2.set_ylabel("x2")
            ax2.set_zlabel("x3")
        ax2.set_title("phase portrait")
    return _finish(fig, path)


def plot_intervals(traj, intervals, verdict, path):
    """Trajectory components with the witness intervals shaded."""
    fig, ax = plt.subplots(figsize=(7.2, 4.2))
    for i in range(traj.dimension):
        ax.plot(traj.times, traj.states[:, i], lw=0.9, label=f"x{i + 1}")
    shown = []
    if verdict.witness_increasing:
        shown.append((verdict.witness_increasing, "tab:green", "increasing"))
    if verdict.witness_decreasing:
        shown.append((verdict.witness_decreasing, "tab:red", "decreasing"))
    for iv, color, label in shown:
        ax.axvspan(iv.a, iv.b, alpha=0.22, color=color, label=f"{label} [{iv.a:.3g}, {iv.b:.3g}]")
    ax.set_xlabel("t")
    ax.set_ylabel("state")
    ax.set_title(f"verdict: {verdict.status.value} "
                 f"({len(intervals)} intervals found)")
    ax.legend(loc="best", fontsize=8)
    return _finish(fig, path)


def plot_witness_ladder(problem, result, path, windows=None):
    """Landing diagram: target windows [nA, nA+E] on a line and the
    comparison points l*B up to the landing index."""
    a = float(problem.A)
    b = float(problem.B)
    e = float(problem.E)
    l_star, n_star = result.l_star, result.n_star
    n_max = n_star + 1 if windows is None else windows
    fig, ax = plt.subplots(figsize=(8.0, 2.6))
    for n in range(n_max + 1):
        ax.add_patch(plt.Rectangle((n * a, -0.18), e, 0.36, color="tab:blue", alpha=0.35))
        ax.text(n * a + e / 2, 0.30, f"I{n}", ha="center", fontsize=7)
    ls = np.arange(1, l_star + 1)
    ax.plot(ls * b, np.zeros_like(ls, dtype=float), "k.", ms=5)
    ax.plot([l_star * b], [0.0], "r*", ms=12,
            label=f"landing: l*={l_star}, n*={n_star}")
    ax.set_ylim(-0.6, 0.6)
    ax.set_xlim(-0.02 * a, (n_max + 1.1) * a)
    ax.set_yticks([])
    ax.set_xlabel("offset from the first window start")
    ax.legend(loc="upper left", fontsize=8)
    ax.set_title(f"window spacing A={a:g}, width E={e:g}; point spacing B={b:g}")
    return _finish(fig, path)


def plot_limit_set(est, projection, path, title=""):
    """Limit-set cloud (3D or 2D) beside its hyperplane projection."""
    pts = est.points
    n = pts.shape[1]
    fig = plt.figure(figsize=(9.6, 4.2))
    if n == 3:
        ax1 = fig.add_subplot(1, 2, 1, projection="3d")
        ax1.plot(pts[:, 0], pts[:, 1], pts[:, 2], ".", ms=1.5)
        ax1.set_xlabel("x1")
        ax1.set_ylabel("x2")
        ax1.set_zlabel("x3")
    else:
        ax1 = fig.add_subplot(1, 2, 1)
        ax1.plot(pts[:, 0], pts[:, 1] if n > 1 else np.zeros(len(pts)), ".", ms=1.5)
        ax1.set_xlabel("x1")
        ax1.set_ylabel("x2" if n > 1 else "")
    ax1.set_title(title or f"limit set ({est.direction.value}), gap {est.hausdorff_gap:.2e}")
    ax2 = fig.add_subplot(1, 2, 2)
    proj = projection.projected
    if proj.shape[1] >= 2:
        ax2.plot(proj[:, 0], proj[:, 1], ".", ms=1.5)
        ax2.set_xlabel("u1")
        ax2.set_ylabel("u2")
    else:
        ax2.plot(proj[:, 0], np.zeros(len(proj)), ".", ms=1.5)
        ax2.set_xlabel("u1")
    ax2.set_title(f"projection (injectivity margin {projection.injectivity_margin:.2e})")
    return _finish(fig, path)


def plot_multipliers(report, path):
    """Eigenvalues/multipliers on the complex plane with the unit circle."""
    fig, ax = plt.subplots(figsize=(4.6, 4.6))
    th = np.linspace(0, 2 * np.pi, 256)
    ax.plot(np.cos(th), np.sin(th), "-", color="0.75", lw=0.8)
    vals = np.asarray(report.values, dtype=complex)
    ax.plot(vals.real, vals.imag, "x", ms=9, mew=2, color="tab:red")
    ax.axhline(0, color="0.85", lw=0.6)
    ax.axvline(0, color="0.85", lw=0.6)
    ax.set_aspect("equal")
    ax.set_xlabel("Re")
    ax.set_ylabel("Im")
    kind = report.at.get("kind", "spectrum")
    ax.set_title(f"{kind}: hyperbolic={report.hyperbolic}, margin={report.margin:.2e}")
    return _finish(fig, path)


def plot_certificate_scan(times, min_slacks, tstar, path, title=""):
    """Minimum order slack against time with the certified transient marked."""
    fig, ax = plt.subplots(figsize=(6.8, 4.0))
    ax.plot(times, min_slacks, lw=0.9)
    ax.axhline(0.0, color="0.7", lw=0.8)
    if tstar is not None:
        ax.axvline(tstar, color="tab:red", lw=1.0, ls="--", label=f"t* = {tstar:.4g}")
        ax.legend(loc="best", fontsize=8)
    ax.set_xlabel("t")
    ax.set_ylabel("min defining slack")
    ax.set_title(title or "order margin along the flow")
    return _finish(fig, path)
