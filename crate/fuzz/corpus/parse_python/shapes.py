"""Shapes and measurements."""

import geo._rec as _r


def area(shape, scale=1.0, units='cm'):
    """Area of a shape.

    Parameters
    ----------
    shape : str
        Shape name.
    scale : float, default=1.0
        Scale factor. Must be strictly positive.
    units : {'cm', 'm'}, default='cm'
        Output units.
    """
    return _r.record('geo.shapes.area', locals())


def perimeter(shape, precise=False):
    """Perimeter of a shape."""
    return _r.record('geo.shapes.perimeter', locals())


def rotate(shape, angle, clockwise=True):
    """Rotate a shape.

    Parameters
    ----------
    shape : str
        Shape name.
    angle : int
        Angle in degrees.
    clockwise : bool, default=True
        Direction of rotation.
    """
    return _r.record('geo.shapes.rotate', locals())


def translate(shape, dx, dy, relative=True):
    """Move a shape by an offset."""
    return _r.record('geo.shapes.translate', locals())


def legacy_bbox(shape):
    """Bounding box, old format."""
    return _r.record('geo.shapes.legacy_bbox', locals())


def mirror(shape, axis='x'):
    """Mirror a shape.

    Parameters
    ----------
    shape : str
        Shape name.
    axis : str, default='x'
        Mirror axis. Only used when shape is 'polygon'.
    """
    return _r.record('geo.shapes.mirror', locals())


class Circle:
    """A circle."""

    def __init__(self, radius, filled=False):
        _r.record('geo.shapes.Circle.__init__', locals())

    def scale(self, factor, keep_center=True):
        """Scale the circle."""
        return _r.record('geo.shapes.Circle.scale', locals())

    def describe(self, verbose=0):
        """Describe the circle."""
        return _r.record('geo.shapes.Circle.describe', locals())
