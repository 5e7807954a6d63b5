"""srmpc: data-driven HVAC scheduling.

Learns an affine room-temperature predictor by symbolic regression, models
the HVAC unit with piecewise-linear capacity/power curves, and schedules
power by receding-horizon mixed-integer quadratic optimization, evaluated
in a closed-loop building simulator against a thermostat baseline.
"""

__version__ = "0.1.0"
