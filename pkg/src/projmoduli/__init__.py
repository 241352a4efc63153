"""Projective structures on moduli of rational curves via twistor-style deformation families."""
