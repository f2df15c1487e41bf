"""Screen decomposition: segmentation, text/visual grouping, touched-widget selection."""

from usagekit.gui.types import Box, ElementKind, GuiElement, GuiEvent, Widget

__all__ = ["Box", "ElementKind", "GuiElement", "GuiEvent", "Widget"]
