"""Stationary solutions of -Δu = (2/|x|²) u (1 - u²): solitons, orbits, periods, relaxation."""
from .closedform import SolitonParams, energy, sample_soliton, soliton_cylinder, soliton_value
from .classify import classify_initial, classify_profile
from .errors import DomainError, NumericalFailure
from .geometry import RadialProfile, kelvin
from .orbit import PhasePoint, first_integral, integrate
from .period import period_agm, period_integral, period_ode

__version__ = "0.1.0"
