"""Experiment runner, synthetic tasks and report writers."""

from .experiments import (
    Experiment,
    ExperimentContext,
    ExperimentOutcome,
    get_experiment,
    register,
    registered_experiments,
)
from .reporting import summary_payload, write_csv, write_json, write_summary
from .runner import coerce_param, resolve_params, run
from .synthetic import (
    RelationTask,
    SyntheticTask,
    make_adversarial_task,
    make_relation_task,
    make_synthetic_task,
    one_hot,
)

__all__ = [
    "Experiment",
    "ExperimentContext",
    "ExperimentOutcome",
    "RelationTask",
    "SyntheticTask",
    "coerce_param",
    "get_experiment",
    "make_adversarial_task",
    "make_relation_task",
    "make_synthetic_task",
    "one_hot",
    "register",
    "registered_experiments",
    "resolve_params",
    "run",
    "summary_payload",
    "write_csv",
    "write_json",
    "write_summary",
]
