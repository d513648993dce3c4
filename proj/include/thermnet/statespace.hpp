#pragma once

#include <string>
#include <vector>

#include "thermnet/circuit.hpp"

namespace thermnet {

/// Node classification and the conduction/source blocks reordered with the
/// massless nodes first. The permutation is stable: both class lists keep
/// ascending global node order.
struct Partition {
    std::vector<Index> massless;    // global node ids with capacity exactly 0
    std::vector<Index> capacitive;  // global node ids with capacity > 0
    Matrix k11, k12, k21, k22;      // conduction blocks (massless first)
    Matrix kb1, kb2;                // source-coupling blocks
    Vector capacitive_diagonal;     // C_C
    IntVector temp_source_flags;    // per branch
    IntVector flow_source_flags;    // per node (original order)
};

/// The reduced model theta_C' = A theta_C + B u, y = C theta_C + D u.
///
/// Input ordering in u: values of flagged temperature-source branches (branch
/// order), then flagged massless-node flows, then flagged capacitive-node
/// flows. Output rows are ordered by ascending global node id.
struct StateSpace {
    Matrix a;  // states x states, 1/s
    Matrix b;  // states x inputs
    Matrix c;  // outputs x states
    Matrix d;  // outputs x inputs

    std::vector<Index> state_nodes;             // global ids of capacitive nodes
    std::vector<Index> input_branches;          // flagged temperature-source branches
    std::vector<Index> input_massless_nodes;    // flagged massless flow nodes
    std::vector<Index> input_capacitive_nodes;  // flagged capacitive flow nodes
    std::vector<Index> output_nodes;            // flagged output nodes, ascending

    std::vector<std::string> state_labels;
    std::vector<std::string> input_labels;
    std::vector<std::string> output_labels;

    Index state_count() const { return a.rows(); }
    Index input_count() const { return b.cols(); }
    Index output_count() const { return c.rows(); }
};

/// Splits the nodes by exact-zero capacity and extracts the permuted blocks.
Partition partition_capacities(const DaeSystem& dae);

/// Eliminates the massless nodes and builds the state-space quadruple.
/// The circuit supplies output flags and labels. Throws SingularSystemError
/// if the massless block is not invertible and NoStatesError if every node
/// is massless.
StateSpace extract_state_space(const DaeSystem& dae, const ThermalCircuit& circuit);

/// Recovers the massless temperatures for a given capacitive state and
/// source values.
Vector reconstruct_massless(const Partition& partition, const Vector& theta_capacitive,
                            const SourceValues& sources);

/// Maps SourceValues onto the state-space input vector u
/// (flagged branches, then flagged massless nodes, then flagged capacitive
/// nodes).
Vector build_input_vector(const StateSpace& ss, const SourceValues& sources,
                          const IntVector& temp_source_flags, const IntVector& flow_source_flags);

}  // namespace thermnet
