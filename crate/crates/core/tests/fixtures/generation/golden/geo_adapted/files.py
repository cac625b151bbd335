# Generated by adaptor 0.1.0 from geo 1.0. Do not edit.

import geo.io as _orig_geo_io


def load(path, fmt='json'):
    """Load shapes from a file."""
    return _orig_geo_io.load(path=path, fmt=fmt)
