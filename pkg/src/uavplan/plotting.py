"""Matplotlib figures for benchmark reports.

Figures are written next to the CSV output; nothing here is needed for
planning itself, so matplotlib is imported lazily with the Agg backend.
"""

import os


def _pyplot():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


MODE_COLORS = {
    "reference": "#7f7f7f",
    "tsp-euclid": "#1f77b4",
    "astar-seq": "#d62728",
    "hybrid": "#2ca02c",
}


def length_comparison(rows, path):
    """Grouped bars of route length (km) per scene and mode."""
    plt = _pyplot()
    scenes = sorted({r["scene"] for r in rows})
    modes = [m for m in MODE_COLORS if any(r["mode"] == m for r in rows)]
    by_key = {(r["scene"], r["mode"]): r["length_km"] for r in rows}
    width = 0.8 / max(1, len(modes))
    fig, ax = plt.subplots(figsize=(max(6.0, 0.35 * len(scenes) * len(modes)), 4.0))
    for k, mode in enumerate(modes):
        xs = [s + (k - (len(modes) - 1) / 2) * width for s in range(len(scenes))]
        ax.bar(xs, [by_key.get((sc, mode), 0.0) for sc in scenes], width,
               label=mode, color=MODE_COLORS[mode])
    ax.set_xticks(range(len(scenes)))
    ax.set_xticklabels(scenes, rotation=90, fontsize=7)
    ax.set_ylabel("route length (km)")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def error_distribution(rows, path):
    """Box plots of the three RMSE metrics for each planner against the reference."""
    plt = _pyplot()
    modes = [m for m in MODE_COLORS if m != "reference" and any(r["mode"] == m for r in rows)]
    metrics = (("knn_m", "KNN"), ("dtw_m", "DTW"), ("seq_m", "Sequential"))
    fig, axes = plt.subplots(1, len(metrics), figsize=(10.0, 3.6), sharey=False)
    for ax, (key, title) in zip(axes, metrics):
        data = [[r[key] for r in rows if r["mode"] == m] for m in modes]
        ax.boxplot(data)
        ax.set_xticks(range(1, len(modes) + 1))
        ax.set_xticklabels(modes, fontsize=8)
        ax.set_title(f"{title} RMSE (m)", fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def route_map(scene, missions, path):
    """Obstacle footprints and routes of several missions, in pixel coordinates."""
    plt = _pyplot()
    from matplotlib.patches import Circle, Polygon
    from .geo import pixel_from_geo

    fig, ax = plt.subplots(figsize=(5.5, 5.5))
    for ob in scene.obstacles:
        if ob.kind == "disc":
            patch = Circle(ob.center, ob.radius_px, color="#4a90d9", alpha=0.45)
        else:
            patch = Polygon(ob.vertices, closed=True, color="#4a90d9", alpha=0.45)
        ax.add_patch(patch)
    for m in missions:
        px = [pixel_from_geo(scene.transform, g) for g in m.geo_points(include_pathpoints=True)]
        ax.plot([p.x for p in px], [p.y for p in px], "-", lw=1.3,
                color=MODE_COLORS.get(m.mode, "k"), label=f"{m.mode} ({m.length_m / 1000:.2f} km)")
    ax.plot([t.x for t in scene.targets], [t.y for t in scene.targets], "o", ms=4, color="purple")
    ax.plot([scene.home.x], [scene.home.y], "k^", ms=7)
    ax.set_xlim(0, scene.spec.width_px)
    ax.set_ylim(scene.spec.height_px, 0)
    ax.set_aspect("equal")
    ax.set_title(scene.name, fontsize=9)
    ax.legend(fontsize=7, loc="lower right")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_benchmark(rows, scene, missions, out_dir):
    """Write the standard set of benchmark figures; returns the file paths."""
    os.makedirs(out_dir, exist_ok=True)
    paths = [os.path.join(out_dir, "lengths.png"),
             os.path.join(out_dir, "errors.png"),
             os.path.join(out_dir, f"routes_{scene.name}.png")]
    length_comparison(rows, paths[0])
    error_distribution(rows, paths[1])
    route_map(scene, missions, paths[2])
    return paths
