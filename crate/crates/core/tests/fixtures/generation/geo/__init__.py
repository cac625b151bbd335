"""Small geometry toolkit."""

from geo.shapes import Circle, area
