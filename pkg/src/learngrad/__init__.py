"""Feedforward networks trained with SGD, with input attribution from learning gradients."""

from .backprop import GradientSet, accumulate, apply_update, backprop
from .core import ActivationKind, mse_cost, relu, relu_prime, sigmoid, sigmoid_prime
from .data import (
    Dataset,
    StandardizationParams,
    apply_standardizer,
    correlation_matrix,
    fit_standardizer,
    load_csv,
    load_reference,
    stratified_split,
)
from .network import DenseLayer, ForwardTrace, LayerSpec, Network, build_network, forward, predict_class
from .saliency import (
    EvolutionRecorder,
    FeatureRanking,
    Granularity,
    aggregate_saliency,
    input_gradient,
    rank_features,
    to_saliency,
)
from .trainer import RunReport, TrainConfig, evaluate, make_batches, train

__version__ = "0.1.0"
