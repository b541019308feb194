"""Built-in toric models."""

from __future__ import annotations

from fractions import Fraction as F

from .algebra import DP4_CLASSES, CurveClass, LatticeVector
from .geometry import FanRay, ToricModel


def _c(text: str) -> CurveClass:
    return CurveClass.parse(text, DP4_CLASSES)


def dp4() -> ToricModel:
    """Degree-4 del Pezzo: a toric model with four non-toric blowups.

    Fan rays are listed in theta order, so theta_k belongs to ``fan[k-1]``.
    The offsets move the base points of the four incoming walls (in blowup
    order E2..E5) to a generic position in which completion is finite, and
    ``endpoint`` lies in a chamber where every theta path meets exactly two
    walls.
    """
    fan = (
        FanRay(LatticeVector(-1, -1), _c("E1")),
        FanRay(LatticeVector(-1, 0), _c("H-E1")),
        FanRay(LatticeVector(1, 1), _c("H")),
        FanRay(LatticeVector(0, -1), _c("H-E1")),
    )
    blowups = (
        (LatticeVector(-1, 0), _c("E2")),
        (LatticeVector(1, 1), _c("E3")),
        (LatticeVector(1, 1), _c("E4")),
        (LatticeVector(0, -1), _c("E5")),
    )
    offsets = {
        0: (F(1, 6), F(1, 2)),
        1: (F(1, 13), F(40, 13)),
        2: (F(1, 17), F(18, 17)),
        3: (F(-11, 2), F(-13, 2)),
    }
    return ToricModel(fan, blowups, DP4_CLASSES, offsets, (F(-4), F(-19, 10)), name="dp4")


def empty() -> ToricModel:
    """The same fan with no non-toric blowups: no walls at all."""
    base = dp4()
    return ToricModel(base.fan, (), DP4_CLASSES, None, base.endpoint, name="empty")


PRESETS = {"dp4": dp4, "empty": empty}
