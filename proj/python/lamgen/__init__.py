"""Laminate model generator.

Generate a cracklet-partitioned model from a configuration, mesh it, and run
the invariant checks::

    import lamgen
    cfg = lamgen.Config.from_file("configs/three_ply.cfg")
    model = lamgen.Model.generate(cfg)
    mesh = lamgen.Mesh.build(model, yarn_size=0.5)
    assert mesh.validate(model).passed
"""

from ._lamgen import (
    Config,
    ConfigError,
    GeometryError,
    Mesh,
    Model,
    SolverError,
    ValidationReport,
    bk_toughness,
    elastic_reaction,
    fiber_damage,
    reduce_strength,
)

__all__ = [
    "Config",
    "ConfigError",
    "GeometryError",
    "Mesh",
    "Model",
    "SolverError",
    "ValidationReport",
    "bk_toughness",
    "elastic_reaction",
    "fiber_damage",
    "reduce_strength",
]
