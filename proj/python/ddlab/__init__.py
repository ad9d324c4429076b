"""Python front end to the ddlab C++ core."""

import json

from ._ddlab import (
    ChannelCaseConfig,
    ConfigError,
    Path,
    PathSet,
    SingularSystemError,
    build_H_dt,
    case_config,
    fD_closed_form,
    layered_idft,
    lpr,
    mmse_solve,
    otfs_precoder,
    ratio_profile,
    recommend_domain,
    sample_paths,
    spr,
    to_domain,
    unitary_dft,
)
from . import _ddlab


def scenario(**overrides):
    """Default scenario dict with the given keys replaced."""
    sc = json.loads(_ddlab.scenario_defaults())
    sc.update(overrides)
    return sc


def run_ber(sc):
    """BER sweep for a scenario dict; returns the CSV text."""
    return _ddlab.run_ber_csv(json.dumps(sc))


def run_sparsity(sc, lc_grid):
    """LPR/SPR sweep for a scenario dict; returns the CSV text."""
    return _ddlab.run_sparsity_csv(json.dumps(sc), list(lc_grid))
