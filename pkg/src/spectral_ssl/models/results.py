"""Probe results, rank bounds and training trajectories."""

from collections.abc import Iterator
from dataclasses import dataclass, field
from typing import Any, NamedTuple

import numpy as np
from numpy.typing import NDArray

from ..exceptions import ValidationError
from ..options import LossKind


@dataclass(frozen=True, eq=False)
class ProbeResult:
    """Minimum-norm least-squares probe.

    Attributes:
        w_star: K×C weights (the M = 0 member of the optimal family)
        min_loss: Minimal achievable ½||Y − ZW||²
        achieved_loss: ½||Y − Z·w_star||²
        rank_z: Numerical rank of Z
    """

    w_star: NDArray[np.float64]
    min_loss: float
    achieved_loss: float
    rank_z: int


class SpanCheck(NamedTuple):
    """Outcome of the span condition col(Û_y) ⊆ col(Û_z)."""

    holds: bool
    max_angle: float


@dataclass(frozen=True)
class RankBoundGap:
    """Probe-loss gap between SimCLR and VICReg optima with its bounds.

    Losses are unhalved ||Y − ZW||². Unpacks as (lower, upper).
    """

    lower: float
    upper: float
    simclr_loss: float
    vicreg_loss: float
    relation_rank: int
    target_rank: int
    k: int

    @property
    def gap(self) -> float:
        """SimCLR probe loss minus VICReg probe loss."""
        return self.simclr_loss - self.vicreg_loss

    @property
    def target_rank_exceeds_k(self) -> bool:
        """Whether rank(Y) > K, outside the bound's assumptions."""
        return self.target_rank > self.k

    def __iter__(self) -> Iterator[float]:
        yield self.lower
        yield self.upper


@dataclass(frozen=True, eq=False)
class TrajectoryPoint:
    """One recorded training step."""

    step: int
    loss: float
    gap_sq: float | None = None
    singular_values: NDArray[np.float64] | None = None


@dataclass(eq=False)
class Trajectory:
    """Recorded loss curve of a training run.

    Attributes:
        loss_kind: Objective that was trained
        reference_loss: Closed-form optimal loss, when one exists
        points: Recorded steps, strictly increasing
    """

    loss_kind: LossKind
    reference_loss: float | None = None
    points: list[TrajectoryPoint] = field(default_factory=list)

    def record(
        self,
        step: int,
        loss: float,
        singular_values: NDArray[np.float64] | None = None,
    ) -> TrajectoryPoint:
        """Append a point, computing the squared gap to the reference.

        Raises:
            ValidationError: If step does not increase
        """
        if self.points and step <= self.points[-1].step:
            raise ValidationError(
                f"Trajectory steps must increase: {step} after {self.points[-1].step}"
            )
        gap_sq = None
        if self.reference_loss is not None:
            gap_sq = (loss - self.reference_loss) ** 2
        point = TrajectoryPoint(step, float(loss), gap_sq, singular_values)
        self.points.append(point)
        return point

    @property
    def steps(self) -> list[int]:
        """Recorded step indices."""
        return [p.step for p in self.points]

    @property
    def losses(self) -> list[float]:
        """Recorded losses."""
        return [p.loss for p in self.points]

    @property
    def final(self) -> TrajectoryPoint:
        """Last recorded point.

        Raises:
            ValidationError: If nothing was recorded
        """
        if not self.points:
            raise ValidationError("Trajectory is empty.")
        return self.points[-1]

    def to_rows(self) -> list[dict[str, Any]]:
        """Flatten to CSV rows with columns step, loss, gap_sq, sv_1..sv_K."""
        width = max(
            (len(p.singular_values) for p in self.points if p.singular_values is not None),
            default=0,
        )
        rows = []
        for point in self.points:
            row: dict[str, Any] = {
                "step": point.step,
                "loss": point.loss,
                "gap_sq": point.gap_sq,
            }
            values = point.singular_values
            for index in range(width):
                has_value = values is not None and index < len(values)
                row[f"sv_{index + 1}"] = float(values[index]) if has_value else None
            rows.append(row)
        return rows
