"""Growth series, tournament automata and opposite series of hyperbolic
vertex-transitive graphs, computed exactly and checked against BFS."""

from .backends import (BackendConfig, BackendError, CayleyOracle, ExplicitOracle, FreeProductOracle,
                       GraphOracle, QuasiTreeOracle, make_oracle)
from .graph_core import (Ball, ball_automorphism_count, build_ball, dead_end_census, estimate_delta)
from .ratfun import NoFit, RatFun, dominant_real_root, exp_poly_decompose, polar_part_at_zero, \
    rational_from_recurrence, series_expand
from .rewrite import Presentation, RewriteSystem, check_local_confluence, kb_complete, normalize
from .subgraph import FiniteGraph, count_induced_embeddings, enumerate_copies_by_depth
from .tournament import (AutomatonParams, Tournament, TournamentAutomaton, TypeCollision, build_automaton,
                         fit_automaton, initial_tournament, parent_count, predict_sphere_counts, transition)

__version__ = "0.1.0"
