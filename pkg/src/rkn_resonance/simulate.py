"""Time-domain runs of the model oscillator under a periodic step pattern."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateTrajectoryError
from .tableau import RknTableau
from .transition import StepPattern, step_sequence, transition_batch

__all__ = ["Trajectory", "integrate", "measured_growth"]


@dataclass
class Trajectory:
    """States ``y_n = (x_n, x'_n)`` for ``n = 0..n_steps``.

    ``steps[n]`` is the step taken from ``times[n]`` to ``times[n+1]``.
    """

    times: np.ndarray
    steps: np.ndarray
    states: np.ndarray
    amplitudes: np.ndarray

    def __len__(self):
        return self.states.shape[0]


def integrate(tab: RknTableau, pat: StepPattern, y0, n_steps: int) -> Trajectory:
    """Apply ``y_{n+1} = R(h_n) y_n`` with the step sequence of ``pat`` cycled."""
    if n_steps < 1:
        raise ValueError("n_steps must be at least 1")
    mats = transition_batch(tab, step_sequence(pat))
    seq = step_sequence(pat)
    states = np.empty((n_steps + 1, 2))
    states[0] = np.asarray(y0, dtype=float)
    y = states[0]
    for n in range(n_steps):
        y = mats[n % pat.p] @ y
        states[n + 1] = y
    steps = seq[np.arange(n_steps) % pat.p]
    times = np.concatenate([[0.0], np.cumsum(steps)])
    amplitudes = np.hypot(states[:, 0], states[:, 1])
    return Trajectory(times=times, steps=steps, states=states, amplitudes=amplitudes)


def measured_growth(traj: Trajectory, p: int) -> float:
    """Per-step growth from a least-squares fit of log amplitude against step index.

    The first ``p`` states are discarded.
    """
    if len(traj) < 3 * p:
        raise DegenerateTrajectoryError(f"need at least {3 * p} states, have {len(traj)}")
    amp = traj.amplitudes[p:]
    if np.any(amp == 0) or not np.all(np.isfinite(amp)):
        raise DegenerateTrajectoryError("zero or non-finite amplitude in trajectory")
    n = np.arange(p, p + amp.size, dtype=float)
    slope = np.polyfit(n, np.log(amp), 1)[0]
    return float(np.exp(slope))
