from figures.base import Figure, load_fonts
from figures.daps import DapsFigure
from figures.scene import SceneFigure

__all__ = ["Figure", "load_fonts", "DapsFigure", "SceneFigure"]
