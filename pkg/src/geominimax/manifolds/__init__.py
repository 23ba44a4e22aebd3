"""Manifold implementations: Euclidean space, the sphere, SPD matrices, and products."""

from .base import Manifold, Point, Tangent
from .euclidean import Euclidean
from .product import Product
from .sphere import Sphere
from .spd import Spd

__all__ = ["Manifold", "Point", "Tangent", "Euclidean", "Sphere", "Spd", "Product"]
