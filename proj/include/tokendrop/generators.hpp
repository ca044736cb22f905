#pragma once

#include <cstdint>

#include "tokendrop/instances.hpp"

namespace tokendrop {

// Random layered DAG with `levels + 1` layers of `nodes_per_level` nodes.
// Edges connect adjacent layers only, node degrees stay <= max_degree, and
// both densities are fractions in [0, 1]. Pure function of the seed.
TokenDropInstance gen_layered_dag(int levels, int max_degree, int nodes_per_level,
                                  double edge_density, double token_density,
                                  std::uint64_t seed);

// Perfect d-regular tree of depth k: the root has d children, every internal
// node has total degree d, every leaf sits at distance k from the root.
RegularTree gen_perfect_regular_tree(int degree, int depth);

// d-regular simple graph on n nodes via the configuration model, rejecting
// non-simple pairings (retry budget 100). Requires n*d even and d < n.
UndirectedGraph gen_random_regular(int n, int d, std::uint64_t seed);

// Random bipartite instance: customer degrees in [1, max_customer_degree],
// server degrees <= max_server_degree. Servers get ids 0..num_servers-1,
// customers follow.
AssignmentInstance gen_bipartite_assignment(int num_customers, int num_servers,
                                            int max_customer_degree,
                                            int max_server_degree,
                                            std::uint64_t seed);

// Bipartite view of an assignment instance: customers and servers as nodes,
// one edge per adjacency. Used by the matching reductions and benchmarks.
UndirectedGraph assignment_to_bipartite(const AssignmentInstance& instance);

}  // namespace tokendrop
