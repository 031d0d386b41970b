"""
Top-level package for the laboratory code.
Having this file allows imports such as `from lab.qkd ...`.
"""
