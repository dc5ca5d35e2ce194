"""
designlab - spherical (t,t)-designs in R^d, C^d and H^d

Computes the sharp constants of the Welch-Sidelnikov inequality, verifies
designs through the variational, Bessel, cubature and Jacobi-polynomial
criteria, and searches for new ones by frame potential minimisation.
"""

__version__ = "0.1.0"
__author__ = "designlab contributors"
