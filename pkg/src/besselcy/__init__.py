"""Exact differential operators and high-precision numerics linking Bessel moments to Verrill sums."""

from .annihilator import BaseEquation, bessel_k_power, sqrt_exp_power, symmetric_power
from .numerics import BigReal, QuadratureSpec, bessel_K0, bessel_moment, zeta3
from .sequences import Recurrence, solve_series, verrill_coefficients
from .theta import ThetaOperator, ThetaPoly, format_operator, mirror_at_infinity, parse_operator

__version__ = "0.1.0"
