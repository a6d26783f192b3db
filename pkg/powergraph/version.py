__version__ = "1.0.0"
"""Current version of the powergraph package."""
