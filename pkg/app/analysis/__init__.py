"""Analyses built on the backends: locality checks, the classical analogue and reports."""
