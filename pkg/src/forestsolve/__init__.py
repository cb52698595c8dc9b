"""Tree and forest solvers for resistive networks and reversible Markov
chains, with an exact enumeration route, a Monte Carlo sampling route and
a linear-algebra oracle for cross-checking."""

from .network import (
    Branch,
    ContractionMap,
    FixedVoltages,
    InjectedCurrents,
    Network,
    build_network,
    contract,
    load_network,
    network_from_json,
    total_conductance_at,
)
from .enumeration import (
    Forest,
    Orchard,
    Tree,
    enumerate_orchards,
    enumerate_separating_forests,
    enumerate_spanning_trees,
    forest_weight_sum,
    tree_weight_sum,
)
from .oracle import (
    CurrentMatrix,
    VoltageVector,
    branch_currents,
    expected_visits,
    fundamental_hitting,
    solve_dirichlet,
    solve_injected,
    solve_mixed,
    tree_sum_determinant,
)
from .sampler import (
    BranchSampler,
    ForestSampler,
    SamplerConfig,
    TreeSampler,
    make_rng,
    sample_branch,
    sample_separating_forest,
    sample_spanning_tree,
)
from .theorems import (
    EstimateReport,
    consistent_current_matrix,
    equivalent_conductance,
    iv_estimate,
    iv_exact,
    ji_estimate,
    ji_exact,
    tree_current_distribution,
    tree_voltage_vector,
    vj_estimate,
    vj_exact,
    vv_estimate,
    vv_exact,
)
from .markov import (
    Chain,
    FlowMatrix,
    VisitCountReport,
    absorption_estimate,
    absorption_probability,
    equilibrium_flow,
    equilibrium_flow_electrical,
    expected_hitting_time,
    flow_matrix,
    hitting_time_via_conductances,
    to_markov_chain,
    visit_count_identity_check,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
