# Generated by adaptor 0.1.0 from geo 1.0. Do not edit.

import geo.io as _orig_geo_io


def save(shapes, path, fmt, indent=2):
    """Save shapes to a file."""
    return _orig_geo_io.save(shapes=shapes, path=path, fmt=fmt, indent=indent)
