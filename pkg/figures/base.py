"""
Base Figure class for the toolkit's static plots
Holds the palette and theme, and the frame/header drawing shared by the
raster figures.
"""

from PIL import Image, ImageDraw, ImageFont
import config


def load_fonts():
    """Load DejaVu fonts, falling back to Pillow's built-in bitmap font."""
    fonts = {}
    try:
        fonts["medium"] = ImageFont.truetype(
            "/usr/share/fonts/truetype/dejavu/DejaVuSansMono.ttf", 18)
        fonts["small"] = ImageFont.truetype(
            "/usr/share/fonts/truetype/dejavu/DejaVuSansMono.ttf", 12)
    except OSError:
        default = ImageFont.load_default()
        fonts["medium"] = default
        fonts["small"] = default
    return fonts


class Figure:
    """Base class for all figures."""

    name = "base"
    title = "FIGURE"

    def __init__(self, width, height, fonts=None):
        self.width = width
        self.height = height
        self.fonts = load_fonts() if fonts is None else fonts
        self.colors = config.COLORS
        self.theme = config.THEME

    def _get_color(self, name):
        """Get RGB color tuple from theme name."""
        color_name = self.theme.get(name, name)
        return self.colors.get(color_name, self.colors["black"])

    def _get_mpl_color(self, name):
        """Theme color as a matplotlib RGB triple in [0, 1]."""
        return tuple(c / 255.0 for c in self._get_color(name))

    def draw_border_frame(self, draw, x, y, width, height, thickness=2):
        """Rectangle with filled corner accents."""
        color = self._get_color("primary")
        draw.rectangle([x, y, x + width, y + height], outline=color, width=thickness)

        corner_size = 6
        for cx, cy in [(x, y), (x + width - corner_size, y),
                       (x, y + height - corner_size),
                       (x + width - corner_size, y + height - corner_size)]:
            draw.rectangle([cx, cy, cx + corner_size, cy + corner_size], fill=color)

    def draw_header(self, draw, subtitle=""):
        draw.text((15, 8), self.title, font=self.fonts["medium"],
                  fill=self._get_color("wall"))
        if subtitle:
            draw.text((self.width - 15, 12), subtitle, font=self.fonts["small"],
                      fill=self._get_color("secondary"), anchor="ra")

    def render(self, subtitle=""):
        """
        Start a raster figure and return (image, draw).
        Subclasses call super().render() first.
        """
        image = Image.new("RGB", (self.width, self.height), self._get_color("background"))
        draw = ImageDraw.Draw(image)
        self.draw_header(draw, subtitle)
        return image, draw
