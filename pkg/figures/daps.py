"""
DAPS Figure - polar delay-angular power spectrum of one UE
MPCs are drawn as sample lines from the centre along their AoA, length
scaled by delay, coloured by cluster; range rings mark delay.
"""

import logging
import math

from figures.base import Figure
import config

logger = logging.getLogger(__name__)


class DapsFigure(Figure):
    """Polar DAPS with delay range rings and 30 degree angle ticks."""

    name = "daps"
    title = "DAPS"

    def __init__(self, width=None, height=None, fonts=None):
        w, h = config.FIGURE["daps_size"]
        super().__init__(width or w, height or h, fonts)

    def draw_rings(self, draw, cx, cy, radius, max_delay_s, rings=4):
        grey = self._get_color("secondary")
        for k in range(1, rings + 1):
            r = radius * k / rings
            draw.ellipse([cx - r, cy - r, cx + r, cy + r], outline=grey, width=1)
            label = f"{max_delay_s * k / rings * 1e9:.0f} ns"
            draw.text((cx + r + 2, cy + 2), label, font=self.fonts["small"], fill=grey)

        # angle ticks, world AoA convention (y up in the world, down on the image)
        tick = 8
        for deg in range(0, 360, 30):
            a = math.radians(deg)
            x0, y0 = cx + radius * math.cos(a), cy + radius * math.sin(a)
            x1, y1 = cx + (radius + tick) * math.cos(a), cy + (radius + tick) * math.sin(a)
            draw.line([(x0, y0), (x1, y1)], fill=grey, width=2)
            lx = cx + (radius + 2.5 * tick) * math.cos(a)
            ly = cy + (radius + 2.5 * tick) * math.sin(a)
            draw.text((lx, ly), f"{deg}", font=self.fonts["small"], fill=grey, anchor="mm")

    def render(self, ue_id, mpcs, clusters=()):
        """Draw one UE's MPCs; clusters (from cluster_records) pick the colours."""
        image, draw = super().render(subtitle=f"UE {ue_id}")
        cx, cy = self.width // 2, self.height // 2 + 10
        radius = min(self.width, self.height) // 2 - 60
        max_delay = max((m.delay_s for m in mpcs), default=1e-9)
        self.draw_rings(draw, cx, cy, radius, max_delay)

        group_of = {}
        for cl in clusters:
            for i in cl.members:
                group_of[i] = cl.cluster_id
        powers = [m.power_db for m in mpcs]
        p_lo, p_hi = min(powers, default=0.0), max(powers, default=0.0)

        for i, m in enumerate(mpcs):
            color = self._get_color(config.GROUP_COLORS[group_of.get(i, 0) % len(config.GROUP_COLORS)])
            # stronger MPCs get wider lines
            width = 1 + int(4 * (m.power_db - p_lo) / (p_hi - p_lo)) if p_hi > p_lo else 3
            r = radius * m.delay_s / max_delay
            end = (cx + r * math.cos(m.aoa_rad), cy + r * math.sin(m.aoa_rad))
            draw.line([(cx, cy), end], fill=color, width=width)

        self.draw_border_frame(draw, 5, 5, self.width - 10, self.height - 10)
        logger.info("Rendered DAPS for UE %s (%d MPCs)", ue_id, len(mpcs))
        return image
