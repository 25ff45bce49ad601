"""chancefit: binary-choice elicitation of the utility of a chance.

The package fits a two-parameter probability-of-choice model to a
subject's yes/no answers over sure-chance-versus-gamble offers, converts
the fits into indifference offsets and a utility curve over [0, 1], and
wraps the whole loop in a batch CLI and a small HTTP service for live
sessions.
"""

from .choice_model import (
    ChoiceParams,
    GamblePoint,
    RiskDisposition,
    choice_prob,
    choice_prob_linear,
    choice_prob_offset,
    choice_prob_penultimate,
    risk_disposition,
    solve_omega,
    utility_from_omega,
)
from .consistency import (
    TripletGamble,
    UtilityPoint,
    isotonic_adjust,
    nl_triplet_fit,
)
from .elicitation import (
    EstimationSettings,
    GambleSpec,
    Session,
    compute_session_utilities,
    create_session,
    next_gamble,
    record_choice,
)
from .estimation import (
    ChoiceDataset,
    ChoiceObservation,
    FitResult,
    GammaPrior,
    GridSpec,
    PosteriorGrid,
    estimate_utility,
    fit_mle,
    log_likelihood,
    posterior_grid,
    solve_omega_bayes,
)
from .simulator import RecoveryReport, SyntheticSubject, recovery_experiment, simulate_choices
from .utility_forms import (
    Action,
    DecisionProblem,
    ReliabilityContext,
    SaturationWarning,
    archetypal_utility,
    best_action,
    cost_disutility,
    expected_utility,
    omnibus_utility,
    survivability,
)

__all__ = [
    "Action",
    "ChoiceDataset",
    "ChoiceObservation",
    "ChoiceParams",
    "DecisionProblem",
    "EstimationSettings",
    "FitResult",
    "GamblePoint",
    "GambleSpec",
    "GammaPrior",
    "GridSpec",
    "PosteriorGrid",
    "RecoveryReport",
    "ReliabilityContext",
    "RiskDisposition",
    "SaturationWarning",
    "Session",
    "SyntheticSubject",
    "TripletGamble",
    "UtilityPoint",
    "archetypal_utility",
    "best_action",
    "choice_prob",
    "choice_prob_linear",
    "choice_prob_offset",
    "choice_prob_penultimate",
    "compute_session_utilities",
    "cost_disutility",
    "create_session",
    "estimate_utility",
    "expected_utility",
    "fit_mle",
    "isotonic_adjust",
    "log_likelihood",
    "next_gamble",
    "nl_triplet_fit",
    "omnibus_utility",
    "posterior_grid",
    "record_choice",
    "recovery_experiment",
    "risk_disposition",
    "simulate_choices",
    "solve_omega",
    "solve_omega_bayes",
    "survivability",
    "utility_from_omega",
]

__version__ = "0.1.0"
