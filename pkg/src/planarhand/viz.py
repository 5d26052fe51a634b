"""Debug rendering of worlds to PNG (requires matplotlib).

Not part of the experiment pipeline; `planarhand plot` emits tabular data
only. This module exists for eyeballing skills while authoring them.
"""

from __future__ import annotations

import math
from pathlib import Path

from .sim import Simulation, WorldState


def _require_matplotlib():
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
        from matplotlib import patches
    except ImportError as exc:  # pragma: no cover
        raise RuntimeError("viz needs matplotlib (pip install matplotlib)") from exc
    return plt, patches


def draw_world(sim: Simulation, world: WorldState, path: str | Path, title: str = "") -> None:
    plt, patches = _require_matplotlib()
    fig, ax = plt.subplots(figsize=(6, 6))

    ax.add_patch(
        patches.Polygon(sim.palm_verts, closed=True, facecolor="#d9c9a8", edgecolor="#8a7a58")
    )

    for d, digit in enumerate(sim.link_segments(world)):
        for (x1, y1, x2, y2, r, _, _) in digit:
            ang = math.atan2(y2 - y1, x2 - x1)
            nx, ny = -math.sin(ang) * r, math.cos(ang) * r
            ax.add_patch(
                patches.Polygon(
                    [(x1 + nx, y1 + ny), (x2 + nx, y2 + ny), (x2 - nx, y2 - ny), (x1 - nx, y1 - ny)],
                    closed=True,
                    facecolor="#e8a0a0",
                    edgecolor="#a05050",
                )
            )
            ax.add_patch(patches.Circle((x1, y1), r, facecolor="#e8a0a0", edgecolor="#a05050"))
            ax.add_patch(patches.Circle((x2, y2), r, facecolor="#e8a0a0", edgecolor="#a05050"))

    for i, obj in enumerate(sim.objects):
        x, y = world.object_xy[i]
        theta = world.object_heading[i]
        if obj.shape == "disc":
            ax.add_patch(patches.Circle((x, y), obj.radius, facecolor="#a9c9e8", edgecolor="#4a6a8a"))
            ax.plot(
                [x, x + obj.radius * math.cos(theta)],
                [y, y + obj.radius * math.sin(theta)],
                color="#4a6a8a",
            )
        else:
            c, s = math.cos(theta), math.sin(theta)
            pts = [(x + c * px - s * py, y + s * px + c * py) for px, py in obj.vertices]
            ax.add_patch(patches.Polygon(pts, closed=True, facecolor="#a9c9e8", edgecolor="#4a6a8a"))
            mx = sum(p[0] for p in pts[1:3]) / 2
            my = sum(p[1] for p in pts[1:3]) / 2
            ax.plot([x, mx], [y, my], color="#4a6a8a")

    for c in world.contacts:
        px, py = c.position
        nx, ny = c.normal
        ax.plot([px], [py], marker="o", color="#208020", markersize=3)
        ax.arrow(px, py, 0.006 * nx, 0.006 * ny, color="#208020", head_width=0.0015)

    ax.set_xlim(-0.10, 0.12)
    ax.set_ylim(-0.10, 0.12)
    ax.set_aspect("equal")
    ax.set_title(title or f"t={world.time:.3f}s")
    ax.grid(True, alpha=0.3)
    fig.savefig(path, dpi=90)
    plt.close(fig)


def film_log(sim, scenario, skill, out_dir: str | Path, time_scale: float = 1.0,
             frame_interval: float = 0.1) -> list:
    """Play a skill while dumping frames; returns the trajectory log."""
    from .skills import play

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    world = scenario.make_world()
    frame = [0]
    next_t = [0.0]

    orig_step = sim.step

    def stepping(world_, dt=None):
        result = orig_step(world_, dt)
        if result.time >= next_t[0]:
            draw_world(sim, result, out / f"f{frame[0]:05d}.png")
            frame[0] += 1
            next_t[0] += frame_interval
        return result

    sim.step = stepping  # type: ignore[method-assign]
    try:
        log = play(skill, world, sim, time_scale=time_scale)
    finally:
        sim.step = orig_step  # type: ignore[method-assign]
    return log
