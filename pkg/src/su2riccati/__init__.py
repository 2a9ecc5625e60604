"""Exactly solvable two-level (SU(2)) problems and their Riccati equations.

Build a case from :mod:`su2riccati.catalog` or from a generator with
:mod:`su2riccati.generator`, then check it against the independent
integrators in :mod:`su2riccati.oracle`.
"""
from .catalog import CASES, CaseBundle, CaseError, build_case, build_custom, list_cases
from .exprdsl import (DomainError, ExprError, ExprSyntaxError, UnboundParameterError,
                      UnknownFunctionError, differentiate, evaluate, parse, to_string)
from .generator import GeneratorX, PhaseSingularityError, ThetaRecipe, XRecipe, theta_from_generator
from .oracle import IntegratorConfig, IntegratorError, integrate_riccati, integrate_su2
from .quad import Grid, QuadratureError, cumulative, integrate
from .riccati import (GeneralIntegral, PoleError, RiccatiDRE, associate, cross_ratio,
                      riccati_residual, u_from_entries)
from .su2core import (ClosedFormEntries, EntryTrace, Hamiltonian, PropagatorEntries,
                      schrodinger_residual, unitarity_defect)
from .timefunc import TimeFunction

__version__ = "0.1.0"
