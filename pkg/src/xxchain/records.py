"""Result container for one simulated trajectory."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .quantum_core import DensityDiagnostics


@dataclass
class RunRecord:
    spec: object
    noise: object
    schedule: object
    config: object
    times: np.ndarray
    concurrence: np.ndarray
    trace_error: np.ndarray
    purity: np.ndarray
    measurement_events: list = field(default_factory=list)  # (t, prob_empty)
    cumulative_success: float = 1.0
    zeno_warning: bool = False
    checks: list = field(default_factory=list)  # (t, DensityDiagnostics)

    def __post_init__(self):
        for name in ("times", "concurrence", "trace_error", "purity"):
            setattr(self, name, np.asarray(getattr(self, name), dtype=float))
        if self.times.size > 1 and np.any(np.diff(self.times) <= 0):
            raise ValueError("sample times must be strictly increasing")

    @property
    def samples(self):
        """``(t, concurrence, trace_error, purity)`` tuples in time order."""
        return list(zip(self.times.tolist(), self.concurrence.tolist(),
                        self.trace_error.tolist(), self.purity.tolist()))

    @property
    def max_concurrence(self):
        return float(self.concurrence.max()) if self.concurrence.size else 0.0

    @property
    def t_of_max(self):
        return float(self.times[int(np.argmax(self.concurrence))]) if self.times.size else 0.0

    @property
    def max_trace_error(self):
        return float(np.abs(self.trace_error).max()) if self.trace_error.size else 0.0

    def worst_checks(self):
        """Worst trace error, Hermiticity error and smallest eigenvalue over all full-state checks."""
        if not self.checks:
            return None
        return DensityDiagnostics(
            trace_error=max(abs(c.trace_error) for _, c in self.checks),
            hermiticity_error=max(c.hermiticity_error for _, c in self.checks),
            min_eigenvalue=min(c.min_eigenvalue for _, c in self.checks),
            purity=min(c.purity for _, c in self.checks),
        )

    def summary(self):
        return {
            "max_concurrence": self.max_concurrence,
            "t_of_max": self.t_of_max,
            "cumulative_success": self.cumulative_success,
            "zeno_warning": self.zeno_warning,
            "n_measurements": len(self.measurement_events),
            "max_trace_error": self.max_trace_error,
        }

    def to_dict(self):
        worst = self.worst_checks()
        return {
            "spec": self.spec.to_dict(),
            "noise": self.noise.to_dict(),
            "schedule": self.schedule.to_dict(),
            "integrator": self.config.to_dict(),
            "summary": self.summary(),
            "measurement_events": [[float(t), float(p)] for t, p in self.measurement_events],
            "checks": [
                {"t": float(t), "trace_error": c.trace_error, "hermiticity_error": c.hermiticity_error,
                 "min_eigenvalue": c.min_eigenvalue, "purity": c.purity}
                for t, c in self.checks
            ],
            "worst_check": None if worst is None else worst.__dict__,
        }
