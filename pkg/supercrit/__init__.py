"""
supercrit - pseudospectral simulation and numerical verification toolkit for
the slightly supercritical 2-D Euler equation u = m(|D|) grad-perp Laplacian^-1 omega
and its vortex patch problem, on a periodic torus.
"""

__version__ = "0.1.0"
