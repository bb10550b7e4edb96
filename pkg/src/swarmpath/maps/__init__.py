"""Map generation: procedural generators, text formats, placement sampling."""

from .generators import (
    GIVE_WAY_CHAMBER_HALF_WIDTH,
    GIVE_WAY_LARGE_RADIUS,
    GIVE_WAY_SMALL_RADIUS,
    gen_batched,
    gen_caves,
    gen_hetero_give_way,
    gen_maze_grid,
    gen_random_grid,
    generate,
    largest_free_component,
    sample_placement,
)
from .parsers import (
    bundled_map_names,
    load_bundled_map,
    parse_movingai,
    parse_string_grid,
    serialize_map,
)
from .perlin import perlin, perlin_grid, permutation_table
from .types import GeneratorConfig, MapSpec, PlacementSpec, resolve_models

__all__ = [
    "GIVE_WAY_CHAMBER_HALF_WIDTH",
    "GIVE_WAY_LARGE_RADIUS",
    "GIVE_WAY_SMALL_RADIUS",
    "GeneratorConfig",
    "MapSpec",
    "PlacementSpec",
    "bundled_map_names",
    "gen_batched",
    "gen_caves",
    "gen_hetero_give_way",
    "gen_maze_grid",
    "gen_random_grid",
    "generate",
    "largest_free_component",
    "load_bundled_map",
    "parse_movingai",
    "parse_string_grid",
    "perlin",
    "perlin_grid",
    "permutation_table",
    "resolve_models",
    "sample_placement",
    "serialize_map",
]
