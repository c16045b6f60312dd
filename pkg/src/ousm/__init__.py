"""Noisy-label training: online uncertainty sample mining with pLOF re-weighting."""

from .dataset import LabeledDataset, load_csv, save_csv
from .errors import InvalidArgument, InvalidData, TrainingDiverged
from .lof import BACKEND as LOF_BACKEND
from .lof import LofScores, knn_neighborhoods, lof_scores, plof_normalize, score_by_class
from .model import MlpModel, backward, extract_features, forward, init_model, sgd_step
from .noise import NoiseSpec, corrupt_difficulty_ranked, corrupt_random, noise_report
from .robust_loss import batch_loss_value, combine_coefficients, ousm_mask
from .synthetic import SyntheticSpec, generate_synthetic
from .trainer import TrainConfig, TrainLog, evaluate, train

__version__ = "0.1.0"
