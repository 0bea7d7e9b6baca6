# Star-network n-locality toolkit
__version__ = "1.0.0"
