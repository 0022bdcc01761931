"""Planar geometry helpers: route polylines and rotations."""

import math
from typing import Sequence, Tuple

import numpy as np

from .models.scene import Vec2
from .utils.errors import DegenerateRouteError


def rotate(vector: np.ndarray, angle: float) -> np.ndarray:
    """Rotate 2-D vectors (shape (2,) or (n, 2)) counter-clockwise by ``angle``."""
    c, s = math.cos(angle), math.sin(angle)
    matrix = np.array([[c, -s], [s, c]])
    return vector @ matrix.T


class Route:
    """Arc-length parameterized polyline.

    Stations before the first vertex and past the last vertex extend the first
    and last segments linearly.
    """

    def __init__(self, points: Sequence[Vec2]):
        vertices = np.array([[p.x, p.y] for p in points], dtype=np.float64)
        if vertices.shape[0] < 2:
            raise DegenerateRouteError("route must have at least 2 points")
        segments = np.diff(vertices, axis=0)
        lengths = np.linalg.norm(segments, axis=1)
        if not lengths.sum() > 0:
            raise DegenerateRouteError("route has zero length")
        # Coincident vertices carry no direction; drop them
        keep = np.concatenate(([True], lengths > 0))
        vertices = vertices[keep]
        segments = np.diff(vertices, axis=0)
        lengths = np.linalg.norm(segments, axis=1)

        self.vertices = vertices
        self.lengths = lengths
        self.directions = segments / lengths[:, None]
        self.stations = np.concatenate(([0.0], np.cumsum(lengths)))

    @property
    def length(self) -> float:
        return float(self.stations[-1])

    def point_at(self, s: float) -> np.ndarray:
        """Position at arc length ``s`` (extrapolated outside [0, length])."""
        n = len(self.lengths)
        index = int(np.searchsorted(self.stations, s, side="right")) - 1
        index = min(max(index, 0), n - 1)
        offset = s - self.stations[index]
        return self.vertices[index] + offset * self.directions[index]

    def project(self, point: np.ndarray) -> Tuple[float, float]:
        """Station and signed lateral offset (left positive) of ``point``.

        The nearest segment wins; ties go to the earlier segment.
        """
        n = len(self.lengths)
        best = None
        for i in range(n):
            rel = point - self.vertices[i]
            t = float(rel @ self.directions[i])
            lower = -math.inf if i == 0 else 0.0
            upper = math.inf if i == n - 1 else self.lengths[i]
            t_clamped = min(max(t, lower), upper)
            foot = self.vertices[i] + t_clamped * self.directions[i]
            distance = float(np.hypot(*(point - foot)))
            if best is None or distance < best[0]:
                d = self.directions[i]
                cross = float(d[0] * rel[1] - d[1] * rel[0])
                lateral = math.copysign(distance, cross)
                best = (distance, self.stations[i] + t_clamped, lateral)
        _, station, lateral = best
        return float(station), lateral
