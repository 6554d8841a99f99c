"""Numerical geometry: pointwise G2 algebra, link and cone calculus, rates, gluing."""
