"""Exact computation of self-directed mistake bounds and related measures."""

from . import kernel
from .core import (ActiveSet, ConceptClass, LabeledExample, VersionSpace, canonical_key,
                   forced_point_reduction, realizable_labels, restrict)
from .dimensions import (DimReport, SearchBudget, full_report, labelling_game_value, m_best,
                         m_best_class, m_sd, m_sd_class, m_worst, online_bound, fixed_order_bound,
                         teaching_dim, vc_dim)
from .errors import BudgetExceeded, ProtocolError, UnsupportedError
from .simulate import (Transcript, optimal_adversary_answer, play_labelling_game, run_episode,
                       sd_soa_step)
from .agnostic import (ExpertPool, RegretReport, SampleMultiset, lower_bound_instance, mw_predict,
                       mw_update, project, run_agnostic)

BACKEND = kernel.BACKEND

__all__ = [
    "ActiveSet", "ConceptClass", "LabeledExample", "VersionSpace", "canonical_key",
    "forced_point_reduction", "realizable_labels", "restrict",
    "DimReport", "SearchBudget", "full_report", "labelling_game_value", "m_best", "m_best_class",
    "m_sd", "m_sd_class", "m_worst", "online_bound", "fixed_order_bound", "teaching_dim", "vc_dim",
    "BudgetExceeded", "ProtocolError", "UnsupportedError",
    "Transcript", "optimal_adversary_answer", "play_labelling_game", "run_episode", "sd_soa_step",
    "ExpertPool", "RegretReport", "SampleMultiset", "lower_bound_instance", "mw_predict",
    "mw_update", "project", "run_agnostic", "BACKEND",
]
