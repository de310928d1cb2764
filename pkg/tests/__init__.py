"""
Test package for the skewlift workbench.
"""
