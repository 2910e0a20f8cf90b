"""Semi-supervised labeling over density-based leading trees."""

from ._core import InvariantError, Model, ValidationError, fit, two_blobs

__all__ = ["InvariantError", "Model", "ValidationError", "fit", "two_blobs"]
__version__ = "0.1.0"
