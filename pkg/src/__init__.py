"""
rbdad
Scalar-generic rigid-body dynamics with compiled exact derivatives
"""

__version__ = "0.1.0"
__author__ = "rbdad developers"
__description__ = "Rigid-body dynamics on floats, dual numbers and recording tapes, with compiled derivative programs and SLQ"
