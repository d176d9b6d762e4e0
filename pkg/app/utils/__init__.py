"""Utilities shared by the command line and the JSON API."""
