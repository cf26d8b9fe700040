"""The toy style-based generator, its encoder and its pretraining.

Modules:
    settings: Generator and pretraining settings.
    network: Mapping network, modulated synthesis layers and W+ codes.
    encoder: The fixed latent encoder.
    pretrain: MMD pretraining on source samples.
"""

from .encoder import LatentEncoder, encode, make_encoder
from .network import (
    StyleCodes,
    StyleGenerator,
    fingerprint,
    map_latent,
    snapshot_frozen,
    synthesize,
)
from .pretrain import initial_bandwidth, pretrain_generator
from .settings import ENCODER_MODES, GeneratorSettings, PretrainSettings

__all__ = (
    "ENCODER_MODES",
    "GeneratorSettings",
    "LatentEncoder",
    "PretrainSettings",
    "StyleCodes",
    "StyleGenerator",
    "encode",
    "fingerprint",
    "initial_bandwidth",
    "make_encoder",
    "map_latent",
    "pretrain_generator",
    "snapshot_frozen",
    "synthesize",
)
