"""Cell-centered finite-volume discretization of linear elasticity.

Thin python layer over the C++ core: mesh builders, the discretization and
solver driver for the built-in verification problem, and refinement studies.
"""

from ._mpsaw import (  # noqa: F401
    ConfigError,
    CurveResult,
    IoError,
    LevelResult,
    Mesh,
    NumericalError,
    Solution,
    StudyResult,
    build_cartesian,
    build_simplex,
    mesh_hash,
    perturb,
    preset_names,
    preset_text,
    read_mesh,
    run_study,
    solve_manufactured,
    write_mesh,
)

__all__ = [
    "ConfigError",
    "CurveResult",
    "IoError",
    "LevelResult",
    "Mesh",
    "NumericalError",
    "Solution",
    "StudyResult",
    "build_cartesian",
    "build_simplex",
    "mesh_hash",
    "perturb",
    "preset_names",
    "preset_text",
    "read_mesh",
    "run_study",
    "solve_manufactured",
    "write_mesh",
]

__version__ = "0.1.0"
