"""
Adapters that fulfil the domain ports with scipy, scikit-learn,
pandas and the command line.
"""
