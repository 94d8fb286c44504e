"""Process-chronology reconstruction and TimeFlow visualization toolkit."""

__version__ = "0.1.0"
