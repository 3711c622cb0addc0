"""Fill typed holes from type signatures and input-output examples."""

__version__ = "0.1.0"
