"""High-precision reduction of huge phase advances modulo a full turn.

Free propagation between branchings rotates the Pruefer phase by one fixed
angle per site, and the number of sites in a stretch grows geometrically,
far beyond anything a double can track.  The reducer stores the angle as a
fraction of the full circle in fixed point, with enough bits that
multiplying by the step count and keeping the fractional part loses less
than 2**-180 of a turn.  The working precision adapts to the step count,
so step counts with thousands of bits are handled; when the angle is an
exact rational multiple of pi the reduction is exact integer arithmetic.
"""

from __future__ import annotations

import math
from fractions import Fraction

import mpmath as mp

from .errors import ValidationError

_TWO_PI = 2.0 * math.pi
_MIN_BITS = 256
_GUARD_BITS = 192


class PhaseReducer:
    """Reduce steps * angle modulo 2*pi without walking the sites."""

    def __init__(
        self,
        angle: float | None = None,
        circle_fraction: Fraction | None = None,
    ) -> None:
        if (angle is None) == (circle_fraction is None):
            raise ValidationError("angle: give exactly one of angle, circle_fraction")
        if angle is not None and not math.isfinite(angle):
            raise ValidationError("angle: must be finite")
        self.circle_fraction = circle_fraction
        if circle_fraction is not None:
            self.angle = float(circle_fraction) * _TWO_PI
        else:
            self.angle = float(angle)
        self._fixed_cache: dict[int, int] = {}

    @classmethod
    def from_angle(cls, angle: float) -> PhaseReducer:
        return cls(angle=angle)

    @classmethod
    def from_pi_multiple(cls, multiple: Fraction | str | int) -> PhaseReducer:
        """Reducer for the angle multiple * pi, kept exact."""
        m = Fraction(multiple)
        return cls(circle_fraction=m / 2)

    def _bits_for(self, steps: int) -> int:
        need = steps.bit_length() + _GUARD_BITS
        return max(_MIN_BITS, ((need + 255) // 256) * 256)

    def _fixed(self, bits: int) -> int:
        """floor(frac(angle / 2pi) * 2**bits), cached per precision."""
        cached = self._fixed_cache.get(bits)
        if cached is not None:
            return cached
        with mp.workprec(bits + 64):
            if self.circle_fraction is not None:
                x = mp.mpf(self.circle_fraction.numerator) / self.circle_fraction.denominator
            else:
                x = mp.mpf(self.angle) / (2 * mp.pi)
            x = x - mp.floor(x)
            value = int(mp.floor(mp.ldexp(x, bits)))
        self._fixed_cache[bits] = value
        return value

    def reduce_fraction(self, steps: int, use_exact: bool = True) -> Fraction:
        """Fractional part of steps * angle / (2*pi) as an exact rational.

        Exact when the angle is a rational multiple of pi; otherwise the
        fixed-point value, within 2**-(bits - steps.bit_length()) of truth.
        Passing use_exact=False forces the fixed-point engine even for a
        rational angle, which is how its error bound is verified.
        """
        if steps < 0:
            raise ValidationError("steps: must be >= 0")
        if self.circle_fraction is not None and use_exact:
            f = self.circle_fraction
            return Fraction((steps * f.numerator) % f.denominator, f.denominator)
        bits = self._bits_for(steps)
        r = (steps * self._fixed(bits)) & ((1 << bits) - 1)
        return Fraction(r, 1 << bits)

    def reduce(self, steps: int) -> float:
        """steps * angle modulo 2*pi, in [0, 2*pi)."""
        value = float(self.reduce_fraction(steps)) * _TWO_PI
        return value if value < _TWO_PI else 0.0
