"""Independent reference implementations used to derive frozen test values.

Nothing here imports the package under test.
"""
