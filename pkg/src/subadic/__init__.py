"""Analysis of one-sided substitution subshifts and their adic representations."""
from .errors import BudgetExceeded, GateError, InternalInconsistency, InvalidInput, SubadicError
from .words import (LanguageTable, LimitWord, Substitution, Word, classify, fixed_point, fixed_seeds,
                    language, load_substitution, parse_substitution, prefix_graph, suffix_graph)
from .recognition import Decoder, desubstitute, recognizability_check
from .branchpoints import branch_points, common_suffix_S, preimage_count, quasi_invertibility, suffix_trace
from .star import star_decomposition, tau_star, verify_star_identities
from .returns import induce, return_words, tower_partition
from .bratteli import OrderedBratteli, conjugacy_check, from_substitution, successor, vershik_orbit
from .codings import LocalRule, apply_code, injectivity_check, perron_construct, rank_one
from .pipeline import pipeline

__version__ = "0.1.0"
