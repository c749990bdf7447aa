"""Learners expressed as incongruity minimization."""
from .base import Decision, LabeledDataset, LabelKind, TraceStep, error_rate, fit_constants
from .bayes import naive_bayes_delta, naive_bayes_predict
from .clustering import (Dendrogram, WithinLoss, kmeans_assign_point, kmeans_run,
                         kmeans_within_loss, linkage_cluster, linkage_merge_step)
from .knn import (ada_knn_predict, ada_threshold, erm_loss, hoeffding_knn_predict,
                  hoeffding_weight, knn_predict)
from .linear import (Basis, Schedule, kernel_transform, logistic_loss, logistic_train, min_slack,
                     normalize_to_Fprime, ridge_loss, ridge_train, sigmoid_hypothesis, svm_loss,
                     svm_misclassified, svm_train, svr_loss, svr_train, transform_dataset)
from .theories import THEORIES
from .tree import Tree, TreeConfig, tree_predict, tree_train, tree_training_error

__all__ = [
    "Basis", "Decision", "Dendrogram", "LabelKind", "LabeledDataset", "Schedule", "THEORIES",
    "TraceStep", "Tree", "TreeConfig", "WithinLoss", "ada_knn_predict", "ada_threshold",
    "erm_loss", "error_rate", "fit_constants", "hoeffding_knn_predict", "hoeffding_weight",
    "kernel_transform", "kmeans_assign_point", "kmeans_run", "kmeans_within_loss",
    "knn_predict", "linkage_cluster", "linkage_merge_step", "logistic_loss", "logistic_train",
    "min_slack", "naive_bayes_delta", "naive_bayes_predict", "normalize_to_Fprime",
    "ridge_loss", "ridge_train", "sigmoid_hypothesis", "svm_loss", "svm_misclassified",
    "svm_train", "svr_loss", "svr_train", "transform_dataset", "tree_predict", "tree_train",
    "tree_training_error",
]
