"""Centralized message strings for spectral-ssl.

Error texts raised by the library and log templates emitted by it live here
so wording stays consistent across modules.
"""

# =============================================================================
# Error Messages
# =============================================================================


class ErrorMessages:
    """Error message templates."""

    NOT_FINITE = "{name} contains NaN or infinite entries."
    NOT_MATRIX = "{name} must be a 2-D array, got {ndim} dimension(s)."
    NOT_SQUARE = "{name} must be square, got shape {shape}."
    NOT_SYMMETRIC = "{name} is not symmetric (max asymmetry {asymmetry:.3e})."
    NEGATIVE_WEIGHTS = "Relation graph weights must be nonnegative."
    NONZERO_DIAGONAL = "Relation graph must have a zero diagonal."
    ROW_MISMATCH = "{left} has {left_rows} rows but {right} has {right_rows}."
    DIMENSION_RANGE = "{name} must satisfy {low} <= {name} <= {high}, got {value}."
    NOT_POSITIVE = "{name} must be positive, got {value}."
    NOT_SPD = "Matrix B is not symmetric positive definite."
    SINGULAR = "{name} is singular even after a ridge of {ridge:.3e}."
    ZERO_TRACE = "{name} is identically zero; no ridge can make it invertible."
    ZERO_NORM_ROW = "Row {row} has zero norm; cosine distance is undefined."
    NOT_BINARY = "pair_expand requires a binary relation graph."
    BAD_EDGE = "Edge {edge} is invalid: {reason}."
    BAD_PARAM = "Parameter '{key}' is not accepted by experiment '{name}'."

    @classmethod
    def dimension_range(cls, name: str, value: int, low: int, high: int) -> str:
        """Format a dimension range error.

        Args:
            name: Name of the argument
            value: Value supplied
            low: Inclusive lower bound
            high: Inclusive upper bound

        Returns:
            Formatted error message
        """
        return cls.DIMENSION_RANGE.format(name=name, value=value, low=low, high=high)


# =============================================================================
# Log Messages
# =============================================================================


class LogMessages:
    """Log message templates (%-style, formatted lazily by logging)."""

    RIDGE_APPLIED = "%s is singular; adding ridge %.3e"
    DENSE_FALLBACK = "Problem of size %d too small for block solver; using dense eig"
    LOBPCG_START = "LOBPCG on n=%d, k=%d, block=%d, preconditioner=%s"
    LOBPCG_NOT_CONVERGED = "LOBPCG did not converge: max residual %.3e (tol %.1e)"
    SOLVER_WARNING = "Eigensolver warning: %s"
    TARGET_RANK_EXCEEDS_K = "rank(Y)=%d exceeds K=%d; rank bounds assume rank(Y) <= K"
    TRAINING_START = "Training %s for %d steps with %s (lr=%.3g)"
    TRAINING_DONE = "Training %s finished: final loss %.6g"
    RUN_DIVERGED = "Run %s (k=%d, gamma=%g, %s, seed=%d) diverged: %s"
    EXPERIMENT_START = "Running experiment '%s' (seed=%d, jobs=%d)"
    EXPERIMENT_DONE = "Experiment '%s' finished: %d/%d checks passed"
    CHECK_FAILED = "Check '%s' failed: measured %s, threshold %s"
    REPORT_WRITTEN = "Wrote %s"
