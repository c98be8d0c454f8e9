"""Frolov lattice cubature for functions with bounded mixed derivatives."""
from .analysis import (CellCount, ConvergenceRecord, MultiplierParams, PoissonCheck,
                       cell_count, convergence_study, fit_order, multiplier,
                       poisson_check, read_csv, write_csv)
from .core import (FrolovPolynomial, Kind, RootSet, evaluate_poly, find_roots,
                   polylog_negative_order, rational_root_sanity)
from .cubature import (CubatureRule, Mode, PeriodizationMap, build_rule, error_constant,
                       integrate, periodize, theoretical_bound)
from .errors import (BudgetExceeded, DomainError, FrolovError, InsufficientData,
                     NonFiniteValue, RootCountMismatch, SingularMatrix,
                     UnsupportedFunction, ZeroVector)
from .lattice import (FrolovBasis, NodeSet, build_basis, check_product_integrality,
                      count_dual_in_box, dual_point, enumerate_nodes, node_count_deviation)
from .testfunctions import TestFunction, bump, parse_selector, sine_power, trig_mode

__version__ = "0.1.0"
