"""
Scene Figure - walls, terminals and sensed reflection points as SVG
"""

import logging

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from figures.base import Figure  # noqa: E402
import config  # noqa: E402

logger = logging.getLogger(__name__)


class SceneFigure(Figure):
    """Static scatter of the reconstruction over the reference map."""

    name = "scene"
    title = "ENVIRONMENT RECONSTRUCTION"

    def __init__(self):
        w, h = config.FIGURE["scene_inches"]
        # matplotlib draws its own text
        super().__init__(w, h, fonts={})

    def save(self, path, env, observations, cloud):
        """Write the figure to path as SVG; output is byte-stable for equal inputs."""
        plt.rcParams["svg.hashsalt"] = config.FIGURE["svg_hashsalt"]
        fig, ax = plt.subplots(figsize=(self.width, self.height))
        try:
            for w in env.walls:
                ax.plot([w.p1.x, w.p2.x], [w.p1.y, w.p2.y],
                        color=self._get_mpl_color("wall"), linewidth=2)

            ax.scatter([0.0], [0.0], marker="*", s=160, color=self._get_mpl_color("bs"),
                       label="BS", zorder=3)
            if observations:
                ax.scatter([o.ue_pos.x for o in observations], [o.ue_pos.y for o in observations],
                           marker="h", s=50, color=self._get_mpl_color("ue"), label="UE", zorder=3)

            fresh = [p for p in cloud if getattr(p, "duplicate_of", None) is None]
            dupes = [p for p in cloud if getattr(p, "duplicate_of", None) is not None]
            for points, key, label in ((fresh, "rp", "RP"), (dupes, "duplicate", "RP (duplicate)")):
                if points:
                    est = [getattr(p, "estimate", p) for p in points]
                    ax.scatter([e.o.x for e in est], [e.o.y for e in est], marker="x", s=30,
                               color=self._get_mpl_color(key), label=label, zorder=4)

            ax.set_aspect("equal")
            ax.set_xlabel("x [m]")
            ax.set_ylabel("y [m]")
            ax.set_title(self.title.title())
            ax.legend(loc="best")
            fig.savefig(path, format="svg", metadata={"Date": None})
        finally:
            plt.close(fig)
        logger.info("Scene saved to %s (%d points)", path, len(cloud))
