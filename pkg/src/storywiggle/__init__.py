"""Storyline layouts that keep character lines from wiggling.

The package turns an ordered storyline instance into y-coordinates by
solving one of three objectives (wiggle count, linear or quadratic
wiggle height) with built-in LP/QP/ILP solvers, detects the wiggle-free
cases combinatorially, routes the remaining wiggles as tangent circular
arcs, and renders everything to SVG.
"""

from .instance import (Coordination, InstanceError, InstanceFormatError,
                       InstanceValidationError, LayoutMetrics, Meeting,
                       NicenessParams, OrderedStorylineInstance,
                       StorylineInstance, compute_metrics, instance_to_dict,
                       is_nice, is_valid, load_instance,
                       minimal_stack_coordination, parse_instance,
                       save_instance, validate_instance)
from .programs import (ExtractionError, LinearConstraint, ModelError,
                       OptimizationModel, Variable, VariableIndex,
                       build_lwh_program, build_qwh_program, build_wc_program,
                       extract_coordination)

__version__ = "0.1.0"

__all__ = [
    "Coordination", "InstanceError", "InstanceFormatError",
    "InstanceValidationError", "LayoutMetrics", "Meeting", "NicenessParams",
    "OrderedStorylineInstance", "StorylineInstance", "compute_metrics",
    "instance_to_dict", "is_nice", "is_valid", "load_instance",
    "minimal_stack_coordination", "parse_instance", "save_instance",
    "validate_instance",
    "ExtractionError", "LinearConstraint", "ModelError", "OptimizationModel",
    "Variable", "VariableIndex", "build_lwh_program", "build_qwh_program",
    "build_wc_program", "extract_coordination",
    "__version__",
]
