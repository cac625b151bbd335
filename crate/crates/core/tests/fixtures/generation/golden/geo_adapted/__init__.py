# Generated by adaptor 0.1.0 from geo 1.0. Do not edit.


from geo_adapted.shapes import Circle
from geo_adapted.shapes import area
