"""Tax-evasion dynamics: exact single-taxpayer process, closed-form
analytics, taxpayer networks, and seeded experiment runners."""

from .analytic import (
    DriftReport,
    drift,
    drift_value,
    expected_compliance_time,
    naive_network_compliance_time,
    noncompliance_measure,
    optimal_tax_rate,
)
from .graphs import Graph, from_edge_list, load_edge_list, neighborhood, parse_edge_list, star, torus
from .network import (
    NetworkConfig,
    NetworkRun,
    NetworkState,
    decide_evade_network,
    evasion_probability,
    initial_network_state,
    neighborhood_avg_k,
    neighborhood_profit,
    run_network,
    step_network,
)
from .streams import StreamKey, bernoulli_stream, beta_2_3_sample, generator, uniform_stream
from .taxpayer import (
    StepOutcome,
    TaxpayerParams,
    TaxpayerState,
    apply_step,
    decide_evade,
    first_compliance_time,
    initial_state,
    last_evasion_time,
    run_single,
    step,
)

__version__ = "0.1.0"
