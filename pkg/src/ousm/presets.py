"""Default experiment settings for the desk-scale benchmark."""

from dataclasses import replace

from .synthetic import SyntheticSpec
from .trainer import TrainConfig

DEFAULT_GAMMAS = (0.0, 0.05, 0.1, 0.2, 0.4)


def default_spec(seed=0):
    # 2000 train / 600 test, 3:1 imbalance. 10 dims rather than 2: in 2-D an
    # MLP cannot memorize 40% flipped labels within a desk-scale budget.
    return SyntheticSpec(n_per_class=(1500, 500), n_test=600, dims=10,
                         class_separation=5.0, hard_fraction=0.05, seed=seed)


def sweep_config(**overrides):
    """Over-parameterized MLP trained long enough that plain CE starts to memorize."""
    cfg = TrainConfig(epochs=150, batch_size=32, learning_rate=0.005, eta=1e-4,
                      alpha=0.5, beta=0.5, k_exclude=8, hidden_dims=(128, 128))
    return replace(cfg, **overrides)


def memorization_config(**overrides):
    cfg = TrainConfig(epochs=100, batch_size=32, learning_rate=0.05, eta=1e-4,
                      alpha=1.0, beta=0.0, k_exclude=0, reweight=False,
                      hidden_dims=(256, 256))
    return replace(cfg, **overrides)
