"""bertrand_lab: Frenet and framed-curve geometry with Bertrand-type mate
classification, construction and finite-difference verification."""

__version__ = "0.1.0"

from .bertrand import (  # noqa: E402
    MateReport,
    PairKind,
    Verdict,
    classify_bertrand,
    classify_bertrand_type,
    classify_mannheim,
    construct_mate,
    mate_curvature,
)
from .expr import CurveSpec, derivative, evaluate, parse  # noqa: E402
from .framed import (  # noqa: E402
    FramedCurvature,
    FramedCurve,
    FramedInit,
    adapted_frame,
    congruent,
    integrate_framed,
    recompute_curvature,
    singular_points,
    swap_frame,
)
from .framed_mates import FramedPairKind, classify_framed, construct_framed_mate, framed_mate_curvature  # noqa: E402
from .frenet import FrenetInit, arc_length_reparam, frenet_apparatus, integrate_frenet  # noqa: E402
from .geom import FramePair, Grid  # noqa: E402
from .tolerances import DEFAULT, Tolerances  # noqa: E402

__all__ = [
    "CurveSpec",
    "DEFAULT",
    "FramePair",
    "FramedCurvature",
    "FramedCurve",
    "FramedInit",
    "FramedPairKind",
    "FrenetInit",
    "Grid",
    "MateReport",
    "PairKind",
    "Tolerances",
    "Verdict",
    "adapted_frame",
    "arc_length_reparam",
    "classify_bertrand",
    "classify_bertrand_type",
    "classify_framed",
    "classify_mannheim",
    "congruent",
    "construct_framed_mate",
    "construct_mate",
    "derivative",
    "evaluate",
    "framed_mate_curvature",
    "frenet_apparatus",
    "integrate_framed",
    "integrate_frenet",
    "mate_curvature",
    "parse",
    "recompute_curvature",
    "singular_points",
    "swap_frame",
]
