"""Gene-regulatory structure and predictive feature subsets from expression matrices."""

__version__ = "0.1.0"

from .core import (Edge, ErrorReport, ExpressionMatrix, GeneId, Network, RegressionFit,
                   network_violations, validate_matrix, zero_variance_genes)
from .graphs import (compare_models, evaluate_network, find_cycles, learn_bayesian, learn_coexpression,
                     learn_dependency)
from .select import SelectionResult, StrategyConfig, filter_candidates, run_ensemble, sbe, sfs
from .stats import (CorrelationMatrix, LoocvError, correlation_matrix, fit_mlr, fit_simple_lr,
                    loocv_error, pearson_correlation, predict)
