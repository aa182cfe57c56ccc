"""
Core module for decentralized state estimation and opacity verification.
"""

from .automaton import Nfa, ObservableReach, observable_reach, project, step, unobservable_reach

from .protocol import (
    ObservationArchitecture,
    Run,
    SiState,
    Site,
    ThresholdStrategy,
    absorb,
    is_critical,
    replay,
    validate,
)

from .css import CssState, CssStructure, build_css, build_feasible_css, build_ss, size_bounds

from .estimators import (
    Coordinator,
    IObserver,
    Observer,
    build_do_observer,
    build_initial_estimator,
    build_reversed_observer,
    run_observer,
)

from .opacity import SecretSpec, Verdict, verify_csso, verify_iso_via_estimator, verify_iso_via_reversed

from .models import ModelFile, load_model

__all__ = [
    "Nfa",
    "ObservableReach",
    "observable_reach",
    "project",
    "step",
    "unobservable_reach",
    "ObservationArchitecture",
    "Run",
    "SiState",
    "Site",
    "ThresholdStrategy",
    "absorb",
    "is_critical",
    "replay",
    "validate",
    "CssState",
    "CssStructure",
    "build_css",
    "build_feasible_css",
    "build_ss",
    "size_bounds",
    "Coordinator",
    "IObserver",
    "Observer",
    "build_do_observer",
    "build_initial_estimator",
    "build_reversed_observer",
    "run_observer",
    "SecretSpec",
    "Verdict",
    "verify_csso",
    "verify_iso_via_estimator",
    "verify_iso_via_reversed",
    "ModelFile",
    "load_model",
]
