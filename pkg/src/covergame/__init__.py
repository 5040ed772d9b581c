"""Exact analysis of information signaling in multi-agent maximum coverage games."""

from covergame.errors import (
    CapExceeded,
    InvariantError,
    ParameterError,
    ParseError,
    UndefinedRatio,
)
from covergame.model import (
    CoverageGame,
    SignalingPolicy,
    UtilityRule,
    ValueDistribution,
    make_fg,
    make_fmc,
    interpolate_rules,
    posterior_mean,
    potential,
    utility,
    welfare,
)
from covergame.equilibrium import (
    BayesNashSet,
    NashSet,
    best_response_dynamics,
    enumerate_bne,
    enumerate_nash,
    verify_bne,
)
from covergame.metrics import (
    MetricReport,
    analyze,
    check_voi_bounds,
    hull_infimum_estimate,
    poa_pos,
    voi,
    w_star,
)
from covergame.instances import (
    InstanceBundle,
    gen_gairing_tight,
    gen_random,
    gen_voim_tight,
    gen_voip_tight,
)

__version__ = "0.1.0"
