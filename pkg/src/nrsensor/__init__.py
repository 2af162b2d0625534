"""Non-regular three-quarter sampling sensors and JSDE reconstruction."""

__version__ = "0.1.0"
