"""Gini's gamma, Spearman's footrule and Spearman's rho for zero-inflated continuous pairs."""

__version__ = "0.1.0"

from .closedforms import (BoundsSet, bounds, frechet_truth, gamma_bounds, phi_bounds,
                          q_constants, rho_bounds)
from .concordance import (ConditionalPi, brute_force_Q, brute_force_Q_se, estimate_pis,
                          q_via_cdf_expectation)
from .errors import (CSVParseError, DegenerateMarginError, ExperimentError,
                     InvalidInputError, TieError)
from .estimators import (ConcordanceReport, estimate_bounds, estimate_measures,
                         estimate_q_jm, estimate_q_jw, estimate_rho)
from .margins import (CellMasses, PairedSample, RegionPartition, ZeroInflatedMargin,
                      cell_masses, fit_margin, partition_regions)
from .samplers import CouplingSpec, sample, sample_partner
from .simulation import (ExperimentSpec, ExperimentSummary, run_experiment,
                         summarize_bounds, summarize_to_table)
