#pragma once

#include <span>
#include <string>
#include <vector>

#include "thermnet/circuit.hpp"

namespace thermnet {

/// (circuit index, local node index) pair naming one node of one elementary
/// circuit.
struct NodeRef {
    Index circuit = 0;
    Index node = 0;

    bool operator==(const NodeRef&) const = default;
};

/// One node identification: the two referenced local nodes become the same
/// global node.
struct Connection {
    NodeRef a;
    NodeRef b;

    bool operator==(const Connection&) const = default;
};

/// The set of node identifications driving an assembly. Merging two distinct
/// nodes of the same circuit (directly or through the transitive closure) is
/// rejected unless explicitly permitted.
struct ConnectionSet {
    std::vector<Connection> pairs;
    bool allow_intra_circuit_merge = false;
};

/// Global numbering produced by plan_assembly. Branch numbering concatenates
/// circuits in order; node numbering is first-appearance order scanning
/// circuits in order, skipping nodes already merged into an earlier class.
struct AssemblyPlan {
    Index global_nodes = 0;
    Index global_branches = 0;
    std::vector<std::vector<Index>> node_map;    // [circuit][local node] -> global node
    std::vector<std::vector<Index>> branch_map;  // [circuit][local branch] -> global branch
    std::vector<std::vector<NodeRef>> merge_classes;  // per global node, members in scan order
};

/// The 0/1 matrix A_d mapping assembled stacked variables [q; theta] to the
/// disassembled stack [q_1; theta_1; q_2; theta_2; ...]: u_d = A_d u.
struct DisassemblyMatrix {
    IntMatrix matrix;  // rows = disassembled variables, cols = assembled variables
    Index assembled_branches = 0;
    Index assembled_nodes = 0;
};

/// Computes the global numbering for a set of circuits under the given node
/// identifications. Throws IndexError for out-of-range references and
/// MergeError when two nodes of one circuit would merge without permission.
AssemblyPlan plan_assembly(std::span<const ThermalCircuit> circuits,
                           const ConnectionSet& connections);

/// Builds A_d for a plan. Row order stacks each circuit's branch variables
/// then its node variables, circuits in order.
DisassemblyMatrix build_disassembly_matrix(const AssemblyPlan& plan,
                                           std::span<const ThermalCircuit> circuits);

/// Merges the elementary circuits into one global circuit:
/// branch rows stack with columns remapped, conductances and temperature
/// flags stack, capacities of merged nodes add, flow and output flags OR,
/// merged node labels join with '+'. Throws MergeError if a branch would
/// end up with both endpoints on one global node.
ThermalCircuit assemble(std::span<const ThermalCircuit> circuits, const ConnectionSet& connections);

}  // namespace thermnet
