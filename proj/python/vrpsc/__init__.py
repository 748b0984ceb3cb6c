"""Vehicle routing with synchronized special-service visits.

A capacitated regular fleet serves ordinary customers; an uncapacitated
special fleet must additionally visit flagged customers within a small time
band around the matching regular visit. This package wraps the C++ core:
instance transformation, the adaptive large neighborhood search, an exact
oracle for tiny instances, and an independent solution validator.
"""

from pathlib import Path

try:  # installed layout: extension lives inside the package
    from . import _vrpsc as _core
except ImportError:  # build-tree layout: extension on sys.path
    import _vrpsc as _core

Instance = _core.Instance
Solution = _core.Solution
Route = _core.Route
SearchConfig = _core.SearchConfig
SearchResult = _core.SearchResult
OperatorStat = _core.OperatorStat
VehicleClass = _core.VehicleClass
ParseError = _core.ParseError
transform = _core.transform
solve = _core.solve
solve_exact = _core.solve_exact
validate = _core.validate

__version__ = "0.1.0"

__all__ = [
    "Instance",
    "Solution",
    "Route",
    "SearchConfig",
    "SearchResult",
    "OperatorStat",
    "VehicleClass",
    "ParseError",
    "transform",
    "solve",
    "solve_exact",
    "validate",
    "load_instance",
    "load_solution",
    "transform_file",
]


def load_instance(path):
    """Read an instance file written by ``Instance.to_text`` or the CLI."""
    return Instance.from_text(Path(path).read_text())


def load_solution(instance, path):
    """Read a solution file for ``instance``."""
    return Solution.from_text(instance, Path(path).read_text())


def transform_file(path, **kwargs):
    """Parse a classic benchmark file and build a synchronized instance.

    Keyword arguments mirror :func:`transform` (``ns``, ``alpha``, ``beta``,
    ``fleet_special``, ``truncate``, ``take``). The file stem becomes the
    instance name unless ``name`` is given.
    """
    p = Path(path)
    kwargs.setdefault("name", p.stem)
    return transform(p.read_text(), **kwargs)
