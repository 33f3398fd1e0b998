from ._core import Angle, Word, itinerary, trace_ray, run_criterion

__all__ = ["Angle", "Word", "itinerary", "trace_ray", "run_criterion"]
