"""Test package for the qubit picture simulator.

This package contains the unit, integration and acceptance tests for the
three simulation backends, the locality analyses, the classical analogue, the
scenario registry and its command-line and JSON surfaces.
"""
