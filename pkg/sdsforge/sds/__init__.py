"""Adapting a generator with a frozen diffusion critic.

Modules:
    settings: SDSConfig.
    gradients: Distillation and regularizer gradient seeds.
    engine: One adaptation step.
    layers: Layer selection.
    loop: The adaptation loop, evaluator and report.
"""

from .engine import (
    AdaptationState,
    NoiseDraw,
    StepMetrics,
    adaptation_step,
    draw_noise,
    guidance_scores,
    sample_timestep,
    sample_timesteps,
)
from .gradients import (
    GuidanceScores,
    directional_gradient,
    normalize,
    reconstruction_gradient,
    reconstruction_score_gradient,
    sds_gradient,
    timestep_weight,
)
from .layers import LayerRanking, select_layers
from .loop import REPORT_COLUMNS, AdaptationReport, EvaluationRow, Evaluator, adapt
from .settings import WEIGHTINGS, SDSConfig

__all__ = (
    "AdaptationReport",
    "AdaptationState",
    "EvaluationRow",
    "Evaluator",
    "GuidanceScores",
    "LayerRanking",
    "NoiseDraw",
    "REPORT_COLUMNS",
    "SDSConfig",
    "StepMetrics",
    "WEIGHTINGS",
    "adapt",
    "adaptation_step",
    "directional_gradient",
    "draw_noise",
    "guidance_scores",
    "normalize",
    "reconstruction_gradient",
    "reconstruction_score_gradient",
    "sample_timestep",
    "sample_timesteps",
    "sds_gradient",
    "select_layers",
    "timestep_weight",
)
