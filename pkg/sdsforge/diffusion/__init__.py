"""The frozen diffusion critic: schedule, denoiser, training and guidance.

Modules:
    settings: Schedule and denoiser training settings.
    schedule: The noise schedule, q_sample and the Tweedie estimate.
    denoiser: The conditional noise-prediction network.
    training: The denoising objective and training loop.
    guidance: Classifier-free guidance.
    sampling: Ancestral sampling.
"""

from .denoiser import NULL_CONDITION, Denoiser, timestep_embedding
from .guidance import Critic, cfg_score
from .sampling import ancestral_sample
from .schedule import NoiseSchedule, make_linear_schedule, q_sample, tweedie_z0
from .settings import DenoiserTrainConfig, ScheduleSettings
from .training import denoiser_loss, train_denoiser

__all__ = (
    "Critic",
    "Denoiser",
    "DenoiserTrainConfig",
    "NULL_CONDITION",
    "NoiseSchedule",
    "ScheduleSettings",
    "ancestral_sample",
    "cfg_score",
    "denoiser_loss",
    "make_linear_schedule",
    "q_sample",
    "timestep_embedding",
    "train_denoiser",
    "tweedie_z0",
)
