"""Conditional updates of local (lambda) and global (tau) scales."""
from __future__ import annotations

from .bridge import (
    TiltedStableParams,
    sample_bridge_local,
    sample_bridge_local_slice,
    sample_laplace_local,
)
from .global_scale import (
    sample_tau_bridge_collapsed,
    sample_tau_conditional,
    sample_truncated_gamma,
)
from .horseshoe import (
    HorseshoeEnvelope,
    horseshoe_acceptance_closed_form,
    horseshoe_acceptance_rate,
    horseshoe_proposal_trial,
    sample_horseshoe_eta,
    sample_horseshoe_local,
)
from .oracles import (
    bridge_limit_tv,
    bridge_local_small_lambda_slope,
    lemma_neg_moment_bound,
    local_scale_cdf,
    local_scale_neg_moment,
    local_scale_tail_prob,
)
from .slice import slice_sample

__all__ = [
    "HorseshoeEnvelope", "TiltedStableParams",
    "sample_horseshoe_eta", "sample_horseshoe_local", "horseshoe_acceptance_rate",
    "horseshoe_acceptance_closed_form", "horseshoe_proposal_trial",
    "sample_bridge_local", "sample_bridge_local_slice", "sample_laplace_local",
    "sample_tau_bridge_collapsed", "sample_tau_conditional", "sample_truncated_gamma",
    "local_scale_tail_prob", "local_scale_neg_moment", "local_scale_cdf",
    "lemma_neg_moment_bound", "bridge_limit_tv", "bridge_local_small_lambda_slope",
    "slice_sample",
]
