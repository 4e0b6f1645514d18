"""Travelling Thief Problem solver built around the Cosolver2B local search."""

from .construction import (ScoreVariant, best_initial_plan, elimination_pass, initial_tour,
                           insertion_pass, parse_tour)
from .cosolver import (SolveResult, SolverConfig, brute_force_oracle, cosolver2b, ea_baseline,
                       krp_optimize, rls_baseline, tskp_optimize)
from .errors import (ExternalTourInvalid, InfeasiblePlan, InstanceFormatError, InstanceTooLarge,
                     StalePreview, TTPError)
from .evaluation import (DeltaPreview, EvalState, commit, delta_bitflip, delta_two_opt,
                         evaluate_full, travel_cost, velocity)
from .instance import (City, Instance, Item, distance, format_instance, group_items_by_city,
                       load_instance, parse_instance, random_instance)
from .neighborhoods import (CandidateGraph, delaunay_candidates, enumerate_bitflips,
                            enumerate_two_opt, knn_candidates)

__version__ = "0.1.0"
