"""Registered experiments.

Each experiment declares its default parameters, runs its sweep (in
parallel when jobs > 1, sweep point i seeded with seed + i) and returns
long-format tables plus pass/fail checks against its acceptance thresholds.
"""

import logging
from collections.abc import Callable, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ..closed_form import (
    barlow_twins_optimal,
    selection_loss,
    simclr_optimal,
    vicreg_combined_matrix,
    vicreg_linear_optimum,
    vicreg_optimal,
    vicreg_selection,
)
from ..config import (
    CONVERGENCE_GAP_SQ,
    LANDSCAPE_POINTS,
    SMALL_GAMMA,
    LossConfig,
    OptimizerConfig,
)
from ..downstream import (
    least_squares_probe,
    minimal_probe_loss,
    probe_accuracy,
    probe_null_space,
    probe_solution_family,
    rank_bound_gap,
    span_condition,
)
from ..eigensolver import numerical_rank, svd, sym_eig
from ..exceptions import DivergenceError, UnknownExperimentError
from ..graph import build_clique_graph, build_supervised_graph, clique_labels, relation_rank
from ..graph_estimation import (
    default_frobenius_tau,
    estimate_graph,
    estimate_graph_log,
    numerical_graph_estimate,
    pairwise_distance,
)
from ..losses import simclr_estimate, vicreg_loss
from ..messages import LogMessages
from ..models.experiment import CheckResult
from ..optim.gradients import grad_vicreg, grad_vicreg_linear
from ..optim.trainer import converged, train_embedding, train_linear
from ..options import (
    ConstraintSet,
    LossKind,
    Matching,
    Metric,
    OptimizerKind,
    Regularizer,
)
from .synthetic import make_adversarial_task, make_relation_task, make_synthetic_task, one_hot

logger = logging.getLogger(__name__)

Row = dict[str, Any]


# =============================================================================
# Registry
# =============================================================================


@dataclass(frozen=True)
class ExperimentContext:
    """Resolved parameters and execution settings of one run."""

    params: dict[str, Any]
    seed: int
    jobs: int = 1

    def map(self, worker: Callable[[Any], Any], payloads: Sequence[Any]) -> list[Any]:
        """Apply a module-level worker to payloads, in order.

        Uses a process pool when jobs > 1.
        """
        if self.jobs == 1 or len(payloads) <= 1:
            return [worker(payload) for payload in payloads]
        with ProcessPoolExecutor(max_workers=self.jobs) as pool:
            return list(pool.map(worker, payloads))


@dataclass
class ExperimentOutcome:
    """Tables (name → long-format rows) and check results of a run."""

    tables: dict[str, list[Row]] = field(default_factory=dict)
    checks: list[CheckResult] = field(default_factory=list)


@dataclass(frozen=True)
class Experiment:
    """A named, parameterized experiment."""

    name: str
    description: str
    defaults: dict[str, Any]
    run: Callable[[ExperimentContext], ExperimentOutcome]


_REGISTRY: dict[str, Experiment] = {}


def register(
    name: str, description: str, **defaults: Any
) -> Callable[[Callable[[ExperimentContext], ExperimentOutcome]], Callable]:
    """Decorator registering an experiment function under `name`."""

    def decorator(
        func: Callable[[ExperimentContext], ExperimentOutcome],
    ) -> Callable[[ExperimentContext], ExperimentOutcome]:
        _REGISTRY[name] = Experiment(name, description, dict(defaults), func)
        return func

    return decorator


def get_experiment(name: str) -> Experiment:
    """Look up a registered experiment.

    Raises:
        UnknownExperimentError: If no experiment has that name
    """
    try:
        return _REGISTRY[name]
    except KeyError:
        raise UnknownExperimentError(name, _REGISTRY) from None


def registered_experiments() -> list[Experiment]:
    """All registered experiments, sorted by name."""
    return [_REGISTRY[name] for name in sorted(_REGISTRY)]


def _check(
    name: str, passed: bool, measured: Any, threshold: Any, detail: str = ""
) -> CheckResult:
    return CheckResult(name, bool(passed), measured, threshold, detail)


def _rank(z: np.ndarray, tol: float) -> int:
    return numerical_rank(svd(z).s, tol)


# =============================================================================
# vicreg-spectrum
# =============================================================================


def _spectrum_point(payload: tuple) -> Row:
    n, k, rank_g, alpha, gamma, rank_tol = payload
    g = build_clique_graph(n, rank_g)
    y = one_hot(clique_labels(n, rank_g), rank_g)
    optimum = vicreg_optimal(g, alpha, gamma, k)
    return {
        "gamma": gamma,
        "eigenvalues": optimum.spectrum.eigenvalues.tolist(),
        "rank": _rank(optimum.z_star, rank_tol),
        "accuracy": probe_accuracy(optimum.z_star, y, with_bias=True),
        "min_loss": optimum.min_loss,
    }


@register(
    "vicreg-spectrum",
    "Top-K eigenvalues, rank and probe accuracy of the VICReg optimum across gamma",
    n=256,
    k=32,
    rank_g=8,
    alpha=1.0,
    gamma_min=1e-4,
    gamma_max=10.0,
    gamma_points=25,
    rank_tol=1e-6,
    chance_draws=20,
    chance_sigmas=4.0,
)
def vicreg_spectrum(ctx: ExperimentContext) -> ExperimentOutcome:
    """Sweep γ on a clique graph and find the full-rank, fully separable band."""
    p = ctx.params
    gammas = [0.0, *np.geomspace(p["gamma_min"], p["gamma_max"], p["gamma_points"]).tolist()]
    points = ctx.map(
        _spectrum_point,
        [(p["n"], p["k"], p["rank_g"], p["alpha"], gamma, p["rank_tol"]) for gamma in gammas],
    )

    outcome = ExperimentOutcome()
    outcome.tables["sweep"] = [
        {key: point[key] for key in ("gamma", "rank", "accuracy", "min_loss")}
        for point in points
    ]
    outcome.tables["eigenvalues"] = [
        {"gamma": point["gamma"], "index": index + 1, "eigenvalue": value}
        for point in points
        for index, value in enumerate(point["eigenvalues"])
    ]

    sweet = [pt for pt in points[1:] if pt["rank"] == p["k"] and pt["accuracy"] == 1.0]
    outcome.checks.append(
        _check(
            "sweet_spot_exists",
            len(sweet) >= 1,
            len(sweet),
            ">= 1",
            detail=(
                f"gamma in [{sweet[0]['gamma']:.3g}, {sweet[-1]['gamma']:.3g}]"
                if sweet
                else "no gamma gives full rank and perfect accuracy"
            ),
        )
    )
    # γ = 0 ignores G, so its accuracy is what the probe reaches on an
    # uninformative embedding of the same shape
    rng = np.random.default_rng(ctx.seed)
    y = one_hot(clique_labels(p["n"], p["rank_g"]), p["rank_g"])
    baseline = np.array(
        [
            probe_accuracy(rng.standard_normal((p["n"], p["k"])), y, with_bias=True)
            for _ in range(p["chance_draws"])
        ]
    )
    chance_limit = float(baseline.mean() + p["chance_sigmas"] * baseline.std())
    outcome.checks.append(
        _check(
            "gamma_zero_at_chance",
            points[0]["accuracy"] <= chance_limit,
            points[0]["accuracy"],
            chance_limit,
            detail=(
                f"random embeddings: {baseline.mean():.3f} ± {baseline.std():.3f} "
                f"over {baseline.size} draws"
            ),
        )
    )
    return outcome


# =============================================================================
# vicreg-landscape
# =============================================================================


@register(
    "vicreg-landscape",
    "VICReg loss along interpolations between the top-K and shifted eigen-selections",
    n=256,
    k=16,
    rank_g=4,
    alpha=1.0,
    gamma=0.01,
    points=LANDSCAPE_POINTS,
    max_shift=4,
)
def vicreg_landscape(ctx: ExperimentContext) -> ExperimentOutcome:
    """Check the closed-form optimum and the loss landscape around it."""
    p = ctx.params
    n, k, alpha, gamma = p["n"], p["k"], p["alpha"], p["gamma"]
    g = build_clique_graph(n, p["rank_g"])
    cfg = LossConfig.analysis(alpha=alpha, gamma=gamma)
    spectrum = sym_eig(vicreg_combined_matrix(g, alpha, gamma))
    optimum = vicreg_optimal(g, alpha, gamma, k)

    loss_star = vicreg_loss(optimum.z_star, g, cfg)
    loss_err = abs(loss_star - optimum.min_loss) / max(1.0, abs(optimum.min_loss))
    grad_norm = float(np.linalg.norm(grad_vicreg(optimum.z_star, g, cfg)))

    outcome = ExperimentOutcome()
    base = vicreg_selection(spectrum, range(k), n)
    selections: list[Row] = []
    landscape: list[Row] = []
    formula_err = 0.0
    for shift in range(p["max_shift"] + 1):
        columns = range(shift, k + shift)
        z_shift = vicreg_selection(spectrum, columns, n)
        predicted = selection_loss(spectrum, columns, alpha)
        measured = vicreg_loss(z_shift, g, cfg)
        formula_err = max(formula_err, abs(measured - predicted) / max(1.0, abs(predicted)))
        selections.append({"shift": shift, "predicted_loss": predicted, "loss": measured})
        if shift == 0:
            continue
        for t in np.linspace(0.0, 1.0, p["points"]):
            z_t = (1.0 - t) * base + t * z_shift
            landscape.append({"shift": shift, "t": float(t), "loss": vicreg_loss(z_t, g, cfg)})
    outcome.tables["selections"] = selections
    outcome.tables["landscape"] = landscape

    margin = min(row["loss"] for row in selections[1:]) - selections[0]["loss"]
    outcome.checks += [
        _check("optimum_loss_matches", loss_err <= 1e-8, loss_err, 1e-8),
        _check("gradient_vanishes_at_optimum", grad_norm <= 1e-6, grad_norm, 1e-6),
        _check("selection_formula", formula_err <= 1e-8, formula_err, 1e-8),
        _check("top_selection_minimal", margin > 0, margin, "> 0"),
    ]
    return outcome


# =============================================================================
# simclr-collapse
# =============================================================================


# Frobenius variants train against the simple set: its zero-loss set needs
# zero in-clique distances, while the clamped right-stochastic estimate
# already matches D⁻¹G at any equal in-clique distances.
_SIMCLR_VARIANTS = (
    (Metric.COSINE, Regularizer.LOG, ConstraintSet.RIGHT_STOCHASTIC, Matching.CROSS_ENTROPY),
    (Metric.COSINE, Regularizer.FROBENIUS, ConstraintSet.SIMPLE, Matching.EUCLIDEAN),
    (Metric.L2, Regularizer.LOG, ConstraintSet.RIGHT_STOCHASTIC, Matching.CROSS_ENTROPY),
    (Metric.L2, Regularizer.FROBENIUS, ConstraintSet.SIMPLE, Matching.EUCLIDEAN),
)


def _simclr_run(payload: tuple) -> Row:
    (n, k, rank_g, metric, regularizer, constraint, matching, steps, learning_rate,
     final_learning_rate, decay, tau, rank_tol, seed) = payload
    g = build_clique_graph(n, rank_g)
    init_z = np.random.default_rng(seed).standard_normal((n, k))
    initial = pairwise_distance(init_z, metric)
    if regularizer == Regularizer.LOG.value:
        # temperature in units of the median initial distance
        tau = tau * float(np.median(initial[np.triu_indices(n, 1)]))
    else:
        # τ ≥ max(D) keeps every in-clique pair inside the relu
        tau = default_frobenius_tau(initial)
    cfg = LossConfig(tau=tau, metric=metric, regularizer=regularizer, constraint=constraint)
    opt = OptimizerConfig(
        kind=OptimizerKind.RMSPROP,
        learning_rate=learning_rate,
        decay=decay,
        max_steps=steps,
        seed=seed,
        record_every=max(steps, 1),
        final_learning_rate=min(final_learning_rate, learning_rate),
    )
    trajectory = train_embedding(LossKind.SIMCLR, g, init_z, cfg, opt, matching=matching)
    singular_values = trajectory.final.singular_values
    return {
        "metric": metric,
        "regularizer": regularizer,
        "constraint": constraint,
        "rank_g": rank_g,
        "rank_z": numerical_rank(singular_values, rank_tol),
        "expected": min(k, relation_rank(g)),
        "final_loss": trajectory.final.loss,
        "singular_values": singular_values.tolist(),
    }


@register(
    "simclr-collapse",
    "Rank of the SimCLR optimum and of trained SimCLR variants against rank(G)",
    n=256,
    k=64,
    ranks=[8, 16, 32],
    train=True,
    steps=1000,
    learning_rate=1e-2,
    final_learning_rate=1e-4,
    decay=0.9,
    tau=0.5,
    rank_tol=1e-6,
    trained_rank_tol=1e-3,
)
def simclr_collapse(ctx: ExperimentContext) -> ExperimentOutcome:
    """SimCLR representations collapse to rank min(K, rank(G)).

    Trained embeddings may lose one more dimension: cosine optima put the
    cliques on a centered simplex and l2 losses ignore translations.
    """
    p = ctx.params
    n, k = p["n"], p["k"]
    outcome = ExperimentOutcome()

    optimum_rows = []
    for rank_g in p["ranks"]:
        g = build_clique_graph(n, rank_g)
        optimum_rows.append(
            {
                "rank_g": rank_g,
                "k": k,
                "rank_z": _rank(simclr_optimal(g, k).z_star, p["rank_tol"]),
                "expected": min(k, relation_rank(g)),
            }
        )
    outcome.tables["optimum_rank"] = optimum_rows
    mismatched = [row["rank_g"] for row in optimum_rows if row["rank_z"] != row["expected"]]
    outcome.checks.append(
        _check("optimum_rank_matches", not mismatched, len(optimum_rows) - len(mismatched),
               len(optimum_rows))
    )

    if not p["train"]:
        return outcome
    payloads = [
        (n, k, rank_g, metric.value, regularizer.value, constraint.value, matching.value,
         p["steps"], p["learning_rate"], p["final_learning_rate"], p["decay"], p["tau"],
         p["trained_rank_tol"], ctx.seed + index)
        for index, (rank_g, (metric, regularizer, constraint, matching)) in enumerate(
            (rank_g, variant) for rank_g in p["ranks"] for variant in _SIMCLR_VARIANTS
        )
    ]
    runs = ctx.map(_simclr_run, payloads)
    outcome.tables["trained"] = [
        {key: run[key] for key in ("metric", "regularizer", "constraint", "rank_g", "rank_z", "expected",
                                   "final_loss")}
        for run in runs
    ]
    outcome.tables["trained_singular_values"] = [
        {
            "metric": run["metric"],
            "regularizer": run["regularizer"],
            "rank_g": run["rank_g"],
            "index": index + 1,
            "value": value,
        }
        for run in runs
        for index, value in enumerate(run["singular_values"])
    ]
    matched = sum(run["expected"] - 1 <= run["rank_z"] <= run["expected"] for run in runs)
    outcome.checks.append(
        _check(
            "trained_rank_matches",
            matched == len(runs),
            matched,
            len(runs),
            detail=f"rank at {p['trained_rank_tol']:g}·σ₁ within [expected − 1, expected]",
        )
    )
    return outcome


# =============================================================================
# bt-collapse
# =============================================================================


def _bt_run(payload: tuple) -> Row:
    (n, k, rank_g, init_rank, steps, learning_rate, final_learning_rate, decay,
     alpha_bt, seed) = payload
    g = build_clique_graph(n, rank_g)
    rng = np.random.default_rng(seed)
    # rank init_rank with unit-variance entries
    init_z = rng.standard_normal((n, init_rank)) @ rng.standard_normal((init_rank, k))
    init_z /= np.sqrt(init_rank)
    cfg = LossConfig(alpha_bt=alpha_bt)
    opt = OptimizerConfig(
        kind=OptimizerKind.RMSPROP,
        learning_rate=learning_rate,
        decay=decay,
        max_steps=steps,
        seed=seed,
        record_every=max(steps, 1),
        final_learning_rate=min(final_learning_rate, learning_rate),
    )
    trajectory = train_embedding(LossKind.BARLOW_TWINS, g, init_z, cfg, opt)
    singular_values = trajectory.final.singular_values
    top = float(singular_values[0]) if singular_values.size else 0.0
    tail = singular_values[rank_g:]
    return {
        "rank_g": rank_g,
        "init_rank": init_rank,
        "tail_ratio": float(tail.max()) / top if tail.size and top > 0 else 0.0,
        "final_loss": trajectory.final.loss,
        "singular_values": singular_values.tolist(),
    }


@register(
    "bt-collapse",
    "Singular values of trained BarlowTwins embeddings beyond rank(G)",
    n=512,
    k=128,
    ranks=[32, 128],
    init_ranks=[4, 8, 16, 64],
    steps=1500,
    learning_rate=1e-2,
    final_learning_rate=1e-4,
    decay=0.9,
    alpha_bt=0.0,
    sv_ratio=1e-3,
)
def bt_collapse(ctx: ExperimentContext) -> ExperimentOutcome:
    """BarlowTwins representations collapse to the rank of the graph.

    Training runs without the redundancy term by default: with more
    dimensions than cliques it is lowered by within-clique noise, which
    holds the tail singular values away from zero.
    """
    p = ctx.params
    n, k = p["n"], p["k"]
    outcome = ExperimentOutcome()

    optimum_rows = []
    for rank_g in p["ranks"]:
        z_star = barlow_twins_optimal(build_clique_graph(n, rank_g), k)
        optimum_rows.append({"rank_g": rank_g, "rank_z": _rank(z_star, 1e-6)})
    outcome.tables["optimum_rank"] = optimum_rows
    worst = max(row["rank_z"] - row["rank_g"] for row in optimum_rows)
    outcome.checks.append(_check("optimum_rank_bounded", worst <= 0, worst, "<= 0"))

    payloads = [
        (n, k, rank_g, init_rank, p["steps"], p["learning_rate"], p["final_learning_rate"],
         p["decay"], p["alpha_bt"], ctx.seed + index)
        for index, (rank_g, init_rank) in enumerate(
            (rank_g, init_rank) for rank_g in p["ranks"] for init_rank in p["init_ranks"]
        )
    ]
    runs = ctx.map(_bt_run, payloads)
    outcome.tables["trained"] = [
        {key: run[key] for key in ("rank_g", "init_rank", "tail_ratio", "final_loss")}
        for run in runs
    ]
    outcome.tables["singular_values"] = [
        {"rank_g": run["rank_g"], "init_rank": run["init_rank"], "index": i + 1, "value": v}
        for run in runs
        for i, v in enumerate(run["singular_values"])
    ]
    collapsing = [run for run in runs if run["rank_g"] < k]
    worst_ratio = max((run["tail_ratio"] for run in collapsing), default=0.0)
    outcome.checks.append(
        _check("tail_below_ratio", worst_ratio < p["sv_ratio"], worst_ratio, p["sv_ratio"])
    )
    return outcome


# =============================================================================
# convergence
# =============================================================================


def _convergence_run(payload: tuple) -> Row:
    (mode, n, dim, classes, k, gamma, optimizer, data_seed, seed, separation,
     steps, record_every, sgd_scale, rmsprop_lr, rmsprop_final_lr) = payload
    task = make_synthetic_task(n, classes, dim, data_seed, separation=separation)
    g = build_supervised_graph(task.labels, storage="sparse")
    cfg = LossConfig.analysis(alpha=1.0, gamma=gamma)
    rng = np.random.default_rng(seed)

    if mode == "embedding":
        params = rng.standard_normal((n, k))
        sgd_lr = sgd_scale * n
    else:
        # orthonormal directions scaled so the initial covariance is at most I/2
        centered = task.x - task.x.mean(axis=0)
        basis, _ = np.linalg.qr(rng.standard_normal((dim, k)))
        init_scale = float(svd(centered @ basis).s[0]) ** 2 / n
        params = basis * np.sqrt(0.5 / init_scale)
        # sgd_scale / λ_max of the input covariance
        sgd_lr = sgd_scale * n / float(svd(centered).s[0]) ** 2
    rmsprop = optimizer != "sgd"
    opt = OptimizerConfig(
        kind=optimizer,
        learning_rate=rmsprop_lr if rmsprop else sgd_lr,
        max_steps=steps,
        seed=seed,
        record_every=record_every,
        final_learning_rate=min(rmsprop_final_lr, rmsprop_lr) if rmsprop else None,
    )
    row: Row = {"mode": mode, "k": k, "gamma": gamma, "optimizer": optimizer, "seed": seed}
    try:
        if mode == "embedding":
            trajectory = train_embedding(LossKind.VICREG, g, params, cfg, opt)
        else:
            trajectory = train_linear(LossKind.VICREG, task.x, g, params, cfg, opt)
    except DivergenceError as exc:
        logger.warning(LogMessages.RUN_DIVERGED, mode, k, gamma, optimizer, seed, exc)
        return row | {
            "reference_loss": None,
            "final_gap_sq": float("inf"),
            "converged": False,
            "diverged": True,
            "points": [],
        }
    return row | {
        "reference_loss": trajectory.reference_loss,
        "final_gap_sq": trajectory.final.gap_sq,
        "converged": converged(trajectory),
        "diverged": False,
        "points": [(pt.step, pt.loss, pt.gap_sq) for pt in trajectory.points],
    }


@register(
    "convergence",
    "Gradient training of VICReg embeddings and linear weights toward the closed form",
    n=512,
    dim=64,
    classes=8,
    ks=[8, 32, 64],
    gammas=[0.0, 0.01],
    optimizers=["sgd", "rmsprop"],
    seeds=10,
    separation=1.0,
    steps=5000,
    record_every=50,
    sgd_scale=0.1,
    rmsprop_lr=1e-3,
    rmsprop_final_lr=1e-5,
    min_fraction=0.9,
)
def convergence(ctx: ExperimentContext) -> ExperimentOutcome:
    """Trained VICReg losses reach the closed-form minimum."""
    p = ctx.params
    n, dim, classes = p["n"], p["dim"], p["classes"]
    outcome = ExperimentOutcome()

    task = make_synthetic_task(n, classes, dim, ctx.seed, separation=p["separation"])
    g = build_supervised_graph(task.labels, storage="sparse")
    stationarity: list[Row] = []
    for k in p["ks"]:
        for gamma in p["gammas"]:
            cfg = LossConfig.analysis(alpha=1.0, gamma=gamma)
            z_star = vicreg_optimal(g, 1.0, gamma, k).z_star
            w_star = vicreg_linear_optimum(task.x, g, 1.0, gamma, k).w_star
            stationarity.append(
                {
                    "k": k,
                    "gamma": gamma,
                    "embedding_grad": float(np.linalg.norm(grad_vicreg(z_star, g, cfg)))
                    / (1.0 + float(np.linalg.norm(z_star))),
                    "linear_grad": float(np.linalg.norm(grad_vicreg_linear(w_star, task.x, g, cfg)))
                    / (1.0 + float(np.linalg.norm(w_star))),
                }
            )
    outcome.tables["stationarity"] = stationarity
    worst_embedding = max(row["embedding_grad"] for row in stationarity)
    worst_linear = max(row["linear_grad"] for row in stationarity)
    outcome.checks += [
        _check("embedding_optimum_stationary", worst_embedding <= 1e-6, worst_embedding, 1e-6),
        _check("linear_optimum_stationary", worst_linear <= 1e-6, worst_linear, 1e-6),
    ]

    settings = [
        (mode, k, gamma, optimizer)
        for mode in ("embedding", "linear")
        for k in p["ks"]
        for gamma in p["gammas"]
        for optimizer in p["optimizers"]
    ]
    payloads = []
    for mode, k, gamma, optimizer in settings:
        for repeat in range(p["seeds"]):
            payloads.append(
                (mode, n, dim, classes, k, gamma, optimizer, ctx.seed,
                 ctx.seed + len(payloads), p["separation"], p["steps"], p["record_every"],
                 p["sgd_scale"], p["rmsprop_lr"], p["rmsprop_final_lr"])
            )
    runs = ctx.map(_convergence_run, payloads)

    outcome.tables["runs"] = [
        {key: run[key] for key in ("mode", "k", "gamma", "optimizer", "seed",
                                   "reference_loss", "final_gap_sq", "converged", "diverged")}
        for run in runs
    ]
    outcome.tables["trajectories"] = [
        {"mode": run["mode"], "k": run["k"], "gamma": run["gamma"], "optimizer": run["optimizer"],
         "seed": run["seed"], "step": step, "loss": loss, "gap_sq": gap_sq}
        for run in runs
        for step, loss, gap_sq in run["points"]
    ]
    for mode, k, gamma, optimizer in settings:
        group = [
            run for run in runs
            if (run["mode"], run["k"], run["gamma"], run["optimizer"]) == (mode, k, gamma, optimizer)
        ]
        fraction = sum(run["converged"] for run in group) / len(group) if group else 0.0
        outcome.checks.append(
            _check(
                f"converged[{mode},k={k},gamma={gamma:g},{optimizer}]",
                fraction >= p["min_fraction"],
                fraction,
                p["min_fraction"],
                detail=(
                    f"gap_sq <= {CONVERGENCE_GAP_SQ:g}; "
                    f"{sum(run['diverged'] for run in group)} of {len(group)} diverged"
                ),
            )
        )
    return outcome


# =============================================================================
# probe-optimality
# =============================================================================


@register(
    "probe-optimality",
    "Least-squares probe identities, span condition and optimal-family checks",
    instances=200,
    n=64,
    k=8,
    c=4,
    family_draws=20,
    classes=4,
    gamma=SMALL_GAMMA,
)
def probe_optimality(ctx: ExperimentContext) -> ExperimentOutcome:
    """The minimal probe loss formula against the solved probe."""
    p = ctx.params
    n, k, c = p["n"], p["k"], p["c"]
    rng = np.random.default_rng(ctx.seed)
    outcome = ExperimentOutcome()

    rows = []
    family_err = 0.0
    for instance in range(p["instances"]):
        rank = k if instance % 2 == 0 else int(rng.integers(1, k))
        z = rng.standard_normal((n, rank)) @ rng.standard_normal((rank, k))
        y = rng.standard_normal((n, c))
        scale = 0.5 * float(np.sum(y**2))
        result = least_squares_probe(z, y)
        rel_err = abs(result.min_loss - result.achieved_loss) / scale
        rows.append(
            {
                "instance": instance,
                "rank_z": result.rank_z,
                "min_loss": result.min_loss,
                "achieved_loss": result.achieved_loss,
                "rel_err": rel_err,
            }
        )
        if result.rank_z < k and instance < 2 * p["family_draws"]:
            null_dim = probe_null_space(z).shape[1]
            w = probe_solution_family(z, y, rng.standard_normal((null_dim, n)))
            loss = 0.5 * float(np.sum((y - z @ w) ** 2))
            family_err = max(family_err, abs(loss - result.min_loss) / scale)
    outcome.tables["instances"] = rows
    worst = max(row["rel_err"] for row in rows)

    z = rng.standard_normal((n, k))
    aligned_y = z @ rng.standard_normal((k, c))
    basis = svd(z).u
    orthogonal_y = rng.standard_normal((n, c))
    orthogonal_y -= basis @ (basis.T @ orthogonal_y)
    span_rows = []
    for case, y in (("aligned", aligned_y), ("orthogonal", orthogonal_y)):
        check = span_condition(z, y)
        span_rows.append(
            {
                "case": case,
                "holds": check.holds,
                "max_angle": check.max_angle,
                "min_loss": minimal_probe_loss(z, y),
                "half_norm_sq": 0.5 * float(np.sum(y**2)),
            }
        )
    outcome.tables["span"] = span_rows
    aligned, orthogonal = span_rows
    span_ok = (
        aligned["holds"]
        and aligned["min_loss"] <= 1e-10 * aligned["half_norm_sq"]
        and not orthogonal["holds"]
        and abs(orthogonal["min_loss"] - orthogonal["half_norm_sq"])
        <= 1e-8 * orthogonal["half_norm_sq"]
    )

    task = make_relation_task(n, p["classes"], k)
    method_rows = [
        {"method": "simclr", "probe_loss": minimal_probe_loss(
            simclr_optimal(task.graph, k).z_star, task.y, with_bias=True)},
        {"method": "vicreg", "probe_loss": minimal_probe_loss(
            vicreg_optimal(task.graph, 1.0, p["gamma"], k).z_star, task.y, with_bias=True)},
        {"method": "barlow_twins", "probe_loss": minimal_probe_loss(
            barlow_twins_optimal(task.graph, k), task.y, with_bias=True)},
    ]
    outcome.tables["methods"] = method_rows
    worst_method = max(row["probe_loss"] for row in method_rows)

    outcome.checks += [
        _check("min_loss_matches_probe", worst <= 1e-8, worst, 1e-8),
        _check("solution_family_optimal", family_err <= 1e-8, family_err, 1e-8),
        _check("span_iff_zero_loss", span_ok, [row["holds"] for row in span_rows], [True, False]),
        _check("supervised_optima_separable", worst_method <= 1e-6, worst_method, 1e-6),
    ]
    return outcome


# =============================================================================
# rank-bounds
# =============================================================================


@register(
    "rank-bounds",
    "SimCLR vs VICReg probe-loss gap against its rank-based bounds",
    n=64,
    target_rank=2,
    aligned_classes=4,
    aligned_k=8,
    gamma=SMALL_GAMMA,
    upper_fraction=0.95,
    aligned_tol=1e-6,
)
def rank_bounds(ctx: ExperimentContext) -> ExperimentOutcome:
    """Adversarial graphs hit the upper bound; aligned graphs close the gap."""
    p = ctx.params
    adversarial = make_adversarial_task(p["n"], p["target_rank"])
    aligned = make_relation_task(p["n"], p["aligned_classes"], p["aligned_k"])

    rows = []
    gaps = {}
    for case, task in (("adversarial", adversarial), ("aligned", aligned)):
        bounds = rank_bound_gap(task.graph, task.y, task.k, gamma=p["gamma"])
        gaps[case] = bounds
        rows.append(
            {
                "case": case,
                "k": bounds.k,
                "relation_rank": bounds.relation_rank,
                "target_rank": bounds.target_rank,
                "lower": bounds.lower,
                "upper": bounds.upper,
                "simclr_loss": bounds.simclr_loss,
                "vicreg_loss": bounds.vicreg_loss,
                "gap": bounds.gap,
            }
        )
    outcome = ExperimentOutcome(tables={"bounds": rows})

    adv = gaps["adversarial"]
    slack = 1e-8 * max(1.0, adv.upper)
    outcome.checks += [
        _check(
            "adversarial_within_bounds",
            adv.lower - slack <= adv.gap <= adv.upper + slack,
            adv.gap,
            [adv.lower, adv.upper],
        ),
        _check(
            "adversarial_near_upper",
            adv.gap >= p["upper_fraction"] * adv.upper,
            adv.gap / adv.upper if adv.upper else 0.0,
            p["upper_fraction"],
        ),
        _check(
            "aligned_gap_vanishes",
            abs(gaps["aligned"].gap) <= p["aligned_tol"],
            gaps["aligned"].gap,
            p["aligned_tol"],
        ),
    ]
    return outcome


# =============================================================================
# graph-estimate-check
# =============================================================================


@register(
    "graph-estimate-check",
    "Closed-form graph estimates against the softmax estimate and a numerical oracle",
    n=16,
    k=4,
    tau=0.5,
    trials=20,
    oracle_n=3,
    softmax_tol=1e-12,
    oracle_tol=1e-6,
)
def graph_estimate_check(ctx: ExperimentContext) -> ExperimentOutcome:
    """Entropic right-stochastic estimate is the softmax; all match the oracle."""
    p = ctx.params
    rng = np.random.default_rng(ctx.seed)
    z = rng.standard_normal((p["n"], p["k"]))
    closed = estimate_graph_log(
        pairwise_distance(z, Metric.COSINE), p["tau"], ConstraintSet.RIGHT_STOCHASTIC
    )
    softmax_err = float(np.max(np.abs(closed - simclr_estimate(z, p["tau"], Metric.COSINE))))

    rows = []
    for trial in range(p["trials"]):
        d = pairwise_distance(rng.standard_normal((p["oracle_n"], 2)), Metric.L2_SQUARED)
        for regularizer in Regularizer:
            tau = p["tau"] if regularizer is Regularizer.LOG else default_frobenius_tau(d)
            for constraint in ConstraintSet:
                estimate = estimate_graph(d, tau, regularizer, constraint)
                oracle = numerical_graph_estimate(d, tau, regularizer, constraint)
                rows.append(
                    {
                        "trial": trial,
                        "regularizer": regularizer.value,
                        "constraint": constraint.value,
                        "max_abs_err": float(np.max(np.abs(estimate - oracle))),
                    }
                )
    worst = max(row["max_abs_err"] for row in rows)
    outcome = ExperimentOutcome(
        tables={"softmax": [{"n": p["n"], "tau": p["tau"], "max_abs_err": softmax_err}],
                "oracle": rows}
    )
    outcome.checks += [
        _check("softmax_identity", softmax_err <= p["softmax_tol"], softmax_err, p["softmax_tol"]),
        _check("oracle_agreement", worst <= p["oracle_tol"], worst, p["oracle_tol"]),
    ]
    return outcome
