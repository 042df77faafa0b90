"""mmvlab: joint sparse recovery for the multiple measurement vector problem.

Recover a row-sparse X from Y = A X (+ noise) when all columns of X share
one support. The package provides:

- instance generation with controlled sparsity, rank, conditioning and SNR
  (:mod:`mmvlab.instances`);
- the subspace-penalized learning solver (:mod:`mmvlab.spl`) and the
  sparse-Bayesian baseline (:mod:`mmvlab.msbl`);
- subspace/greedy baselines MUSIC, S-OMP and SA-MUSIC (:mod:`mmvlab.greedy`);
- exhaustive oracles for small instances (:mod:`mmvlab.oracle`);
- a Monte-Carlo benchmark harness with figure presets and a CLI
  (:mod:`mmvlab.bench`).
"""

from . import bench, greedy, instances, linops, msbl, oracle, spl, subspace
from .common import SolveResult, default_lambda
from .instances import ProblemInstance, SignalSpec, make_instance
from .linops import RankTolerance
from .subspace import RankPolicy, SubspaceEstimate, estimate_subspace

__version__ = "0.1.0"

__all__ = [
    "bench",
    "greedy",
    "instances",
    "linops",
    "msbl",
    "oracle",
    "spl",
    "subspace",
    "SolveResult",
    "default_lambda",
    "ProblemInstance",
    "SignalSpec",
    "make_instance",
    "RankTolerance",
    "RankPolicy",
    "SubspaceEstimate",
    "estimate_subspace",
    "__version__",
]
