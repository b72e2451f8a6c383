"""amseq: arithmetic-mean sequence calculus.

Log-domain numerics for nonincreasing null sequences, the mean/ratio/
concavity calculus and its inversion, closed-form step-sequence means at
big-integer indices, two inductive counterexample constructions, and a
finite-horizon verification harness with a CLI front end.
"""

from .numerics import (
    AmseqError,
    ConstructionError,
    DegenerateCancellation,
    FiniteRankError,
    HarmonicEngine,
    HorizonExceeded,
    LogReal,
    PowerSumEngine,
    SummableError,
    default_harmonic,
    log_add,
    log_ratio,
    log_sub,
)
from .seqcore import (
    ConcavitySeq,
    HeadTailSeq,
    IterLogSeq,
    LogPowerSeq,
    MeanSeq,
    PowerSeq,
    RatioSeq,
    Seq,
    StepView,
    am,
    am_pow,
    ampliation,
    concavity_ratio,
    domination_profile,
    dominates_pointwise,
    ratio_of_regularity,
    seq_from_json,
    seq_to_json,
)
from .stepseq import StepSeq, extend_step, step_am2_at, step_am_at
from .regularity import (
    AdmissibilityVerdict,
    HatSeq,
    NotAmImage,
    NotConcavitySequence,
    NotRatioSequence,
    check_ratio_admissibility,
    concavity_to_ratio,
    exp_delta2_profile,
    hat,
    invert_am,
    nu,
    ratio_to_concavity,
    regularity_profile,
    seq_from_concavity,
    seq_from_ratio,
)
from .counterexamples import (
    Example6Params,
    OmegaHalfParams,
    build_example6,
    build_omega_half,
    load_golden_example6,
    load_golden_omega_half,
    stage_condition_search,
)
from .verify import CheckReport, run_suite

__version__ = "0.1.0"
