"""Channel geometry: unit-length domain with flat matching end sections.

The channel occupies 0 <= x <= 1 with walls y = y_bottom(x) below and
y = y_top(x) above.  Both end sections are required to be exactly the
segments {0} x (-1, 1) and {1} x (-1, 1), i.e. the walls must pass through
y = -1 and y = +1 at x = 0 and x = 1.  That makes the inlet and outlet
congruent, which is what allows a structured mesh to pair their nodes
exactly for the periodic velocity coupling.
"""

from dataclasses import dataclass, field

import numpy as np

__all__ = ["ChannelGeometry", "GeometryError"]


class GeometryError(ValueError):
    """Raised for an invalid or degenerate channel description."""


def _cosine_bump(x, amplitude, periods):
    # Phase computed modulo one full period so the bump is *exactly* zero at
    # x = 0 and x = 1 in floating point (cos(2*pi*t) with t exactly 0).
    t = np.mod(np.asarray(x, dtype=float) * periods, 1.0)
    return amplitude * (1.0 - np.cos(2.0 * np.pi * t))


@dataclass(frozen=True)
class ChannelGeometry:
    """Wall-profile description of the channel domain.

    kind:
        "straight"  - flat walls y = -1 and y = +1.
        "cosine"    - walls bulge inwards by amplitude*(1 - cos(2*pi*k*x));
                      the channel closes completely at amplitude = 0.5.
        "tabulated" - piecewise-linear walls through given sample points.
    """

    kind: str = "straight"
    amplitude: float = 0.0
    periods: int = 1
    table_x: np.ndarray = field(default=None, repr=False)
    table_bottom: np.ndarray = field(default=None, repr=False)
    table_top: np.ndarray = field(default=None, repr=False)
    length: float = 1.0

    @staticmethod
    def straight():
        return ChannelGeometry(kind="straight")

    @staticmethod
    def cosine(amplitude, periods=1):
        if periods < 1 or int(periods) != periods:
            raise GeometryError(f"periods must be a positive integer, got {periods}")
        return ChannelGeometry(kind="cosine", amplitude=float(amplitude), periods=int(periods))

    @staticmethod
    def tabulated(x, y_bottom, y_top):
        x = np.asarray(x, dtype=float)
        yb = np.asarray(y_bottom, dtype=float)
        yt = np.asarray(y_top, dtype=float)
        if x.ndim != 1 or x.size < 2 or yb.shape != x.shape or yt.shape != x.shape:
            raise GeometryError("tabulated profile needs matching 1-d arrays with >= 2 samples")
        if np.any(np.diff(x) <= 0):
            raise GeometryError("tabulated sample abscissae must be strictly increasing")
        if x[0] != 0.0 or x[-1] != 1.0:
            raise GeometryError("tabulated samples must span x = 0 to x = 1 exactly")
        geom = ChannelGeometry(kind="tabulated", table_x=x, table_bottom=yb, table_top=yt)
        geom.validate()
        return geom

    @property
    def is_straight(self):
        return self.kind == "straight" or (self.kind == "cosine" and self.amplitude == 0.0)

    def wall_bottom(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "straight":
            return np.full_like(x, -1.0)
        if self.kind == "cosine":
            return -1.0 + _cosine_bump(x, self.amplitude, self.periods)
        if self.kind == "tabulated":
            return np.interp(x, self.table_x, self.table_bottom)
        raise GeometryError(f"unknown profile kind {self.kind!r}")

    def wall_top(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "straight":
            return np.full_like(x, 1.0)
        if self.kind == "cosine":
            return 1.0 - _cosine_bump(x, self.amplitude, self.periods)
        if self.kind == "tabulated":
            return np.interp(x, self.table_x, self.table_top)
        raise GeometryError(f"unknown profile kind {self.kind!r}")

    def width(self, x):
        return self.wall_top(x) - self.wall_bottom(x)

    def validate(self, samples=513):
        """Check the section and non-degeneracy invariants.

        Raises GeometryError naming the first x where the channel closes.
        The default (odd) sample count puts a probe on x = 1/2, where
        symmetric constrictions pinch off first.
        """
        for xe in (0.0, 1.0):
            if self.wall_bottom(xe) != -1.0 or self.wall_top(xe) != 1.0:
                raise GeometryError(
                    f"end sections must be exactly (-1, 1): at x={xe} walls are "
                    f"({self.wall_bottom(xe)}, {self.wall_top(xe)})"
                )
        xs = np.linspace(0.0, 1.0, samples)
        if self.kind == "tabulated":
            xs = np.union1d(xs, self.table_x)
        w = self.width(xs)
        bad = np.nonzero(w <= 0.0)[0]
        if bad.size:
            raise GeometryError(
                f"degenerate channel: walls touch or cross at x={xs[bad[0]]:.6g} "
                f"(width {w[bad[0]]:.3g})"
            )
        return self
