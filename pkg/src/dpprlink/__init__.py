"""Link prediction by diffusion distance between personalized PageRank signals."""

from .baselines import KatzConfig, adamic_adar, common_neighbors, katz_score
from .datasets import load_dataset
from .diffusion import DiffusionTrace, diffuse_trace, heat_kernel_dense
from .dppr import (PairScore, SolverConfig, dppr_distance, dppr_score, dppr_score_pairs,
                   rank_pairs)
from .evaluation import Protocol, aupr, holdout_split, run_benchmark, summarize, sweep
from .generators import BaParams, LfrParams, generate_ba, generate_lfr
from .graph import Graph, degree, laplacian_apply, parse_edgelist, serialize_edgelist, walk_apply
from .linsolve import CgConfig, cg_solve, dense_resolvent_solve, resolvent_apply
from .ppr import PprConfig, PprVector, ppr_batch, ppr_solve

__version__ = "0.1.0"
