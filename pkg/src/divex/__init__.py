"""divex: deterministic interactive video exploration engine.

SOM-arranged feature maps over color and concept features, concept / map /
color / similarity / sketch search with per-session history, multi-user
collaboration sessions with a spectator snapshot, and a simulated
competition server that judges KIS/AVS submissions and logs feature usage.
"""

from .colorfeat import (
    PALETTE,
    color_histogram,
    cosine_distance,
    dominant_colors,
    l1_distance,
    load_concept_scores,
    spatial_color_grid,
)
from .corpus import Corpus, Keyframe, Shot, load_manifest, segment_shots, shot_view
from .images import Image, decode_ppm, encode_ppm
from .search import (
    QueryDescriptor,
    ResultSet,
    SearchHistory,
    color_filter,
    concept_search,
    map_search,
    similarity_search,
    sketch_search,
)
from .som import (
    FeatureMap,
    MapCatalog,
    SelfOrganizingMap,
    assign_keyframes,
    best_matching_unit,
    build_map_catalog,
)
from .taskserver import Judgment, Submission, Task, judge, load_tasks

__version__ = "0.1.0"

__all__ = [
    "PALETTE",
    "color_histogram",
    "cosine_distance",
    "dominant_colors",
    "l1_distance",
    "load_concept_scores",
    "spatial_color_grid",
    "Corpus",
    "Keyframe",
    "Shot",
    "load_manifest",
    "segment_shots",
    "shot_view",
    "Image",
    "decode_ppm",
    "encode_ppm",
    "QueryDescriptor",
    "ResultSet",
    "SearchHistory",
    "color_filter",
    "concept_search",
    "map_search",
    "similarity_search",
    "sketch_search",
    "FeatureMap",
    "MapCatalog",
    "SelfOrganizingMap",
    "assign_keyframes",
    "best_matching_unit",
    "build_map_catalog",
    "Judgment",
    "Submission",
    "Task",
    "judge",
    "load_tasks",
    "__version__",
]
