"""Parameterized local search solvers for (weighted) Vertex Cover.

Given a graph, a vertex cover S, a swap budget k and a required improvement
d, every solver answers whether some vertex set W with |W| <= k exists such
that S symmetric-difference W is a vertex cover lighter by at least d, and
returns such a W when one exists.
"""

from .graph import (EMPTY_SWAP, Graph, GraphError, Instance, Mode, SolveReport,
                    Swap, applied_cover, best_swap, complete_graph,
                    connected_components_of_swap, cycle_graph, improvement,
                    is_valid_swap, path_graph, star_graph)
from .oracle import (OracleGuardError, OracleResult, oracle_all_valid,
                     oracle_constrained, oracle_solve)
from .swaps import (ExclusionInstance, PreconditionError, SwapInstance,
                    apply_parity_reduction, exclusion_instance, extension,
                    make_swap_instance, small_subset_bound, solve_hindex_le_1,
                    solve_k_le_2, solve_kd_le_4)
from .degree import (compute_swap_family_unweighted, compute_swap_family_weighted,
                     enumerate_connected_swaps, solve_glsvc_by_degree,
                     solve_glswvc_by_degree, solve_lswvc_by_degree)
from .hindex import HIndexDecomposition, compute_h_index, solve_glswvc_by_hindex
from .treewidth import (NiceTreeDecomposition, TdError,
                        heuristic_tree_decomposition, load_tree_decomposition,
                        solve_glsvc_tw, solve_max_improvement_tw)
from .modular import (KnapInstance, ModularDecomposition, compute_delta_md,
                      compute_modular_decomposition, solve_glsvc_delta_md,
                      solve_glsvc_mw, solve_glswvc_mw, solve_knap_ls)
from .split import (NiceSplitDecomposition, compute_split_decomposition,
                    solve_glsvc_sw, solve_glswvc_sw)

__all__ = [name for name in dir() if not name.startswith("_")]
