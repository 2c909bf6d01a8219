"""
Copyright © 2024 trajforge developers.
"""
from .modulation import (AdapterParams, modulation_delta, apply_modulation, layer_forward,
                         gradient_check, analytic_gradient, GradientCheck, sum_of_squares,
                         sum_of_squares_grad)
from .accounting import parameter_stats, overhead_estimate
