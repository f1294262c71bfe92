"""Figure rendering for gmmstab CSV outputs."""

from .figures import FIGURE_IDS, FigureError, FigureSpec, render

__version__ = "0.1.0"
