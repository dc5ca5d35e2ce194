"""
Frame potential minimisation over products of unit spheres.

Each restart draws n standard-normal unit vectors and runs tangent-projected
gradient descent with Armijo backtracking, renormalising after every step.
Restarts use independent streams spawned from the master seed, so results do
not depend on how restarts are scheduled across processes.
"""
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
import logging
from pathlib import Path
import time
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
import pandas as pd
from tqdm import tqdm

from designlab.algebra.hilbert import AngleSpectrum, Configuration, FieldTag, gram
from designlab.algebra.quat import qmul
from designlab.analytics.designs import DesignReport, verify
from designlab.analytics.moments import c_t
from designlab.analytics.polyspace import RealCoords, random_unit_vectors
from designlab.exceptions import DomainError
from designlab.models.requests import SearchOptions
from designlab.settings import get_settings

logger = logging.getLogger(__name__)

ARMIJO_SHRINK = 0.5
ARMIJO_C = 1e-4
MAX_BACKTRACKS = 60


# =============================================================================
# OBJECTIVE
# =============================================================================

def _potential_and_gradient(
    vectors: np.ndarray,
    t: int,
    weights: Optional[np.ndarray] = None,
) -> Tuple[float, np.ndarray]:
    """
    Potential sum_{j,k} w_j w_k |<v_j,v_k>|^{2t} and its Euclidean gradient,
    grad_a = 4t w_a sum_k w_k g_ak^{t-1} v_k <v_k, v_a>, shape (n, d, 4).
    """
    n = vectors.shape[0]
    w = np.ones(n) if weights is None else weights
    inner = gram(vectors)
    angles = np.sum(inner ** 2, axis=-1)
    value = float(w @ (angles ** t) @ w)
    coupling = (w[:, None] * angles ** (t - 1))  # [k, a]
    # terms[k, a, b] = v_k[b] <v_k, v_a>
    terms = qmul(vectors[:, None, :, :], inner[:, :, None, :])
    grad = 4.0 * t * w[:, None, None] * np.einsum("ka,kabq->abq", coupling, terms)
    return value, grad


def potential_gradient(cfg: Configuration, t: int) -> List[RealCoords]:
    """Gradient of the weighted potential with respect to each vector's real coordinates."""
    if t < 1:
        raise DomainError(f"t must be >= 1, got {t}")
    _, grad = _potential_and_gradient(np.array(cfg.vectors), t, cfg.weights)
    m = cfg.field.m
    return [RealCoords(g[:, :m].reshape(-1), cfg.field) for g in grad]


def _tangent(vectors: np.ndarray, grad: np.ndarray) -> np.ndarray:
    """Project each gradient block onto the tangent space of its unit sphere."""
    radial = np.sum(grad * vectors, axis=(1, 2))
    return grad - radial[:, None, None] * vectors


def _normalize(vectors: np.ndarray) -> np.ndarray:
    return vectors / np.sqrt(np.sum(vectors ** 2, axis=(1, 2)))[:, None, None]


# =============================================================================
# RESULTS
# =============================================================================

@dataclass
class RestartOutcome:
    """Result from a single restart."""
    restart_index: int
    vectors: np.ndarray
    potential: float
    trajectory: List[Tuple[int, float]]
    converged: bool
    iterations: int
    stop_reason: str
    execution_time_seconds: float = 0.0


@dataclass
class SearchResult:
    """Best configuration over all restarts, with its verification report."""
    best: Configuration
    report: DesignReport
    trajectory: List[Tuple[int, float]]
    restart_index: int
    converged: bool
    restarts: List[RestartOutcome] = field(default_factory=list)
    execution_time_seconds: float = 0.0

    @property
    def potential(self) -> float:
        return self.report.potential

    def to_dict(self) -> Dict[str, Any]:
        return {
            "restart_index": self.restart_index,
            "converged": self.converged,
            "iterations": len(self.trajectory),
            "execution_time_seconds": self.execution_time_seconds,
            "restart_potentials": [outcome.potential for outcome in self.restarts],
            "report": self.report.to_dict(),
            "configuration": self.best.to_dict(),
        }


# =============================================================================
# DESCENT
# =============================================================================

def _descend(opts: SearchOptions, restart_index: int, seed: np.random.SeedSequence) -> RestartOutcome:
    """Riemannian gradient descent from one random start."""
    start = time.perf_counter()
    field_tag = FieldTag.parse(opts.field)
    rng = np.random.default_rng(seed)
    vectors = random_unit_vectors(field_tag, opts.dim, opts.n, rng)
    bound = c_t(field_tag, opts.dim, opts.t) * opts.n * opts.n

    step = 1.0 / (opts.t * opts.n)
    value, grad = _potential_and_gradient(vectors, opts.t)
    trajectory = [(0, value)]
    converged = False
    stop_reason = "max_iters"
    iteration = 0

    for iteration in range(1, opts.max_iters + 1):
        direction = _tangent(vectors, grad)
        slope = float(np.sum(direction ** 2))
        if np.sqrt(slope) <= opts.grad_tol:
            converged, stop_reason = True, "grad_tol"
            break
        if (value - bound) / bound <= opts.target_gap:
            converged, stop_reason = True, "target_gap"
            break

        accepted = False
        for _ in range(MAX_BACKTRACKS):
            candidate = _normalize(vectors - step * direction)
            cand_value, cand_grad = _potential_and_gradient(candidate, opts.t)
            if cand_value <= value - ARMIJO_C * step * slope:
                accepted = True
                break
            step *= ARMIJO_SHRINK
        if not accepted:
            stop_reason = "line_search"
            converged = np.sqrt(slope) <= 1e3 * opts.grad_tol
            break

        vectors, value, grad = candidate, cand_value, cand_grad
        trajectory.append((iteration, value))
        step *= 2.0

    elapsed = time.perf_counter() - start
    logger.debug(
        f"Restart {restart_index}: potential={value:.12g} after {iteration} iterations ({stop_reason})"
    )
    return RestartOutcome(
        restart_index=restart_index,
        vectors=vectors,
        potential=value,
        trajectory=trajectory,
        converged=converged,
        iterations=iteration,
        stop_reason=stop_reason,
        execution_time_seconds=elapsed,
    )


def _descend_job(args: Tuple[SearchOptions, int, np.random.SeedSequence]) -> RestartOutcome:
    return _descend(*args)


class FramePotentialSearch:
    """
    Multi-start search for (t,t)-designs.

    Restarts are independent; the best one is chosen by (potential,
    restart_index) so the outcome does not depend on completion order.
    """

    def __init__(self, options: SearchOptions, show_progress: Optional[bool] = None):
        """
        Args:
            options: Search parameters
            show_progress: tqdm bar over restarts (defaults to settings.show_progress)
        """
        self.options = options
        settings = get_settings()
        self.show_progress = settings.show_progress if show_progress is None else show_progress
        self.search_tol = settings.search_tol
        self.seeds = np.random.SeedSequence(options.seed).spawn(options.restarts)

        logger.info(
            f"FramePotentialSearch initialized: {options.field.value}^{options.dim}, n={options.n}, "
            f"t={options.t}, restarts={options.restarts}, seed={options.seed}"
        )

    def run(self) -> SearchResult:
        start_time = time.perf_counter()
        outcomes = self._run_restarts()
        best = min(outcomes, key=lambda o: (o.potential, o.restart_index))

        cfg = Configuration(self.options.field, self.options.dim, best.vectors)
        report = verify(cfg, self.options.t, tol=self.search_tol)
        execution_time = time.perf_counter() - start_time

        logger.info(
            f"Search complete: best potential {best.potential:.12g} from restart {best.restart_index} "
            f"in {execution_time:.2f}s (design={report.is_design})"
        )
        if not best.converged:
            logger.warning(f"Best restart {best.restart_index} stopped without converging ({best.stop_reason})")

        return SearchResult(
            best=cfg,
            report=report,
            trajectory=best.trajectory,
            restart_index=best.restart_index,
            converged=best.converged,
            restarts=outcomes,
            execution_time_seconds=execution_time,
        )

    def _run_restarts(self) -> List[RestartOutcome]:
        jobs = [(self.options, index, seed) for index, seed in enumerate(self.seeds)]
        outcomes: List[RestartOutcome] = []
        with tqdm(total=len(jobs), desc="restarts", disable=not self.show_progress) as progress:
            if self.options.workers > 1:
                with ProcessPoolExecutor(max_workers=self.options.workers) as pool:
                    for outcome in pool.map(_descend_job, jobs):
                        outcomes.append(outcome)
                        progress.update(1)
            else:
                for job in jobs:
                    outcomes.append(_descend_job(job))
                    progress.update(1)
        outcomes.sort(key=lambda o: o.restart_index)
        return outcomes


def minimize(opts: SearchOptions, show_progress: Optional[bool] = None) -> SearchResult:
    """Run the multi-start search described by opts."""
    return FramePotentialSearch(opts, show_progress=show_progress).run()


# =============================================================================
# POST-PROCESSING
# =============================================================================

def rationalize(x: float, max_den: int = 64, tol: float = 1e-6) -> Optional[Tuple[int, int]]:
    """Best rational approximation p/q with q <= max_den, if within tol of x."""
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"x must lie in [0, 1], got {x}")
    approx = Fraction(x).limit_denominator(max_den)
    if abs(x - approx) < tol:
        return approx.numerator, approx.denominator
    return None


def rationalize_spectrum(
    spectrum: AngleSpectrum,
    max_den: int = 64,
    tol: float = 1e-6,
) -> List[Tuple[float, int, Optional[Tuple[int, int]]]]:
    """(angle, multiplicity, rational form or None) for each cluster."""
    return [
        (value, count, rationalize(min(max(value, 0.0), 1.0), max_den, tol))
        for value, count in spectrum.clusters
    ]


def write_trajectory_csv(result: SearchResult, path: Union[str, Path]) -> Path:
    """Write the best restart's (iteration, potential) pairs as CSV."""
    path = Path(path)
    frame = pd.DataFrame(result.trajectory, columns=["iteration", "potential"])
    frame.to_csv(path, index=False, lineterminator="\n", float_format="%.17g")
    logger.info(f"Wrote {len(frame)} trajectory rows to {path}")
    return path
