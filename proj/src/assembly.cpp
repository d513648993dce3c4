#include "thermnet/assembly.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace thermnet {

namespace {

void check_in_range(const NodeRef& ref, std::span<const ThermalCircuit> circuits) {
    if (ref.circuit < 0 || ref.circuit >= static_cast<Index>(circuits.size()))
        throw IndexError("connection references circuit " + std::to_string(ref.circuit) +
                         " but only " + std::to_string(circuits.size()) + " circuits were given");
    const auto& tc = circuits[static_cast<std::size_t>(ref.circuit)];
    if (ref.node < 0 || ref.node >= tc.node_count())
        throw IndexError("connection references node " + std::to_string(ref.node) +
                         " of circuit " + std::to_string(ref.circuit) + " which has " +
                         std::to_string(tc.node_count()) + " nodes");
}

}  // namespace

AssemblyPlan plan_assembly(std::span<const ThermalCircuit> circuits,
                           const ConnectionSet& connections) {
    // Flatten (circuit, local node) onto one index range for union-find.
    std::vector<Index> offsets;
    offsets.reserve(circuits.size() + 1);
    Index total_nodes = 0;
    Index total_branches = 0;
    for (const auto& tc : circuits) {
        offsets.push_back(total_nodes);
        total_nodes += tc.node_count();
        total_branches += tc.branch_count();
    }
    offsets.push_back(total_nodes);

    std::vector<Index> parent(static_cast<std::size_t>(total_nodes));
    std::iota(parent.begin(), parent.end(), Index{0});
    auto find = [&](Index x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    };

    for (const auto& conn : connections.pairs) {
        check_in_range(conn.a, circuits);
        check_in_range(conn.b, circuits);
        const Index fa = find(offsets[static_cast<std::size_t>(conn.a.circuit)] + conn.a.node);
        const Index fb = find(offsets[static_cast<std::size_t>(conn.b.circuit)] + conn.b.node);
        if (fa != fb) parent[static_cast<std::size_t>(std::max(fa, fb))] = std::min(fa, fb);
    }

    auto unflatten = [&](Index flat) {
        const auto it = std::upper_bound(offsets.begin(), offsets.end(), flat);
        const Index circuit = static_cast<Index>(it - offsets.begin()) - 1;
        return NodeRef{circuit, flat - offsets[static_cast<std::size_t>(circuit)]};
    };

    // Reject classes holding two distinct nodes of one circuit unless allowed.
    if (!connections.allow_intra_circuit_merge) {
        std::map<std::pair<Index, Index>, Index> seen;  // (root, circuit) -> first local node
        for (Index flat = 0; flat < total_nodes; ++flat) {
            const NodeRef ref = unflatten(flat);
            const auto key = std::make_pair(find(flat), ref.circuit);
            const auto [it, inserted] = seen.emplace(key, ref.node);
            if (!inserted)
                throw MergeError("connections merge two nodes of circuit " +
                                 std::to_string(ref.circuit) + " (local nodes " +
                                 std::to_string(it->second) + " and " + std::to_string(ref.node) +
                                 "); set allow_intra_circuit_merge to permit this");
        }
    }

    AssemblyPlan plan;
    plan.global_branches = total_branches;
    plan.node_map.resize(circuits.size());
    plan.branch_map.resize(circuits.size());

    // First-appearance global node numbering.
    std::vector<Index> global_of_root(static_cast<std::size_t>(total_nodes), -1);
    Index next_global = 0;
    Index next_branch = 0;
    for (std::size_t c = 0; c < circuits.size(); ++c) {
        const auto& tc = circuits[c];
        plan.node_map[c].resize(static_cast<std::size_t>(tc.node_count()));
        for (Index k = 0; k < tc.node_count(); ++k) {
            const Index root = find(offsets[c] + k);
            Index& global = global_of_root[static_cast<std::size_t>(root)];
            if (global < 0) {
                global = next_global++;
                plan.merge_classes.emplace_back();
            }
            plan.node_map[c][static_cast<std::size_t>(k)] = global;
            plan.merge_classes[static_cast<std::size_t>(global)].push_back(
                {static_cast<Index>(c), k});
        }
        plan.branch_map[c].resize(static_cast<std::size_t>(tc.branch_count()));
        for (Index i = 0; i < tc.branch_count(); ++i)
            plan.branch_map[c][static_cast<std::size_t>(i)] = next_branch++;
    }
    plan.global_nodes = next_global;
    return plan;
}

DisassemblyMatrix build_disassembly_matrix(const AssemblyPlan& plan,
                                           std::span<const ThermalCircuit> circuits) {
    Index rows = 0;
    for (const auto& tc : circuits) rows += tc.branch_count() + tc.node_count();
    const Index cols = plan.global_branches + plan.global_nodes;

    DisassemblyMatrix dis;
    dis.assembled_branches = plan.global_branches;
    dis.assembled_nodes = plan.global_nodes;
    dis.matrix = IntMatrix::Zero(rows, cols);

    Index row = 0;
    for (std::size_t c = 0; c < circuits.size(); ++c) {
        const auto& tc = circuits[c];
        for (Index i = 0; i < tc.branch_count(); ++i)
            dis.matrix(row++, plan.branch_map[c][static_cast<std::size_t>(i)]) = 1;
        for (Index k = 0; k < tc.node_count(); ++k)
            dis.matrix(row++,
                       plan.global_branches + plan.node_map[c][static_cast<std::size_t>(k)]) = 1;
    }
    return dis;
}

ThermalCircuit assemble(std::span<const ThermalCircuit> circuits,
                        const ConnectionSet& connections) {
    const AssemblyPlan plan = plan_assembly(circuits, connections);

    ThermalCircuit out;
    out.incidence = IntMatrix::Zero(plan.global_branches, plan.global_nodes);
    out.conductances = Vector::Zero(plan.global_branches);
    out.capacities = Vector::Zero(plan.global_nodes);
    out.temp_source_flags = IntVector::Zero(plan.global_branches);
    out.flow_source_flags = IntVector::Zero(plan.global_nodes);
    out.output_flags = IntVector::Zero(plan.global_nodes);
    out.branch_labels.resize(static_cast<std::size_t>(plan.global_branches));
    out.node_labels.resize(static_cast<std::size_t>(plan.global_nodes));

    for (std::size_t c = 0; c < circuits.size(); ++c) {
        const auto& tc = circuits[c];
        for (Index i = 0; i < tc.branch_count(); ++i) {
            const Index gi = plan.branch_map[c][static_cast<std::size_t>(i)];
            for (Index k = 0; k < tc.node_count(); ++k) {
                const int a = tc.incidence(i, k);
                if (a == 0) continue;
                const Index gk = plan.node_map[c][static_cast<std::size_t>(k)];
                if (out.incidence(gi, gk) != 0)
                    throw MergeError(
                        "merging creates a self-loop: branch " + std::to_string(i) +
                        " of circuit " + std::to_string(c) +
                        " would have both endpoints on global node " + std::to_string(gk));
                out.incidence(gi, gk) = a;
            }
            out.conductances[gi] = tc.conductances[i];
            out.temp_source_flags[gi] = tc.temp_source_flags[i];
            out.branch_labels[static_cast<std::size_t>(gi)] =
                i < static_cast<Index>(tc.branch_labels.size())
                    ? tc.branch_labels[static_cast<std::size_t>(i)]
                    : "b" + std::to_string(gi);
        }
        for (Index k = 0; k < tc.node_count(); ++k) {
            const Index gk = plan.node_map[c][static_cast<std::size_t>(k)];
            out.capacities[gk] += tc.capacities[k];
            out.flow_source_flags[gk] |= tc.flow_source_flags[k];
            out.output_flags[gk] |= tc.output_flags[k];
        }
    }

    for (Index g = 0; g < plan.global_nodes; ++g) {
        std::string label;
        for (const auto& member : plan.merge_classes[static_cast<std::size_t>(g)]) {
            const auto& tc = circuits[static_cast<std::size_t>(member.circuit)];
            const std::string part =
                member.node < static_cast<Index>(tc.node_labels.size())
                    ? tc.node_labels[static_cast<std::size_t>(member.node)]
                    : "n" + std::to_string(g);
            if (!label.empty()) label += "+";
            label += part;
        }
        out.node_labels[static_cast<std::size_t>(g)] = label;
    }
    return out;
}

}  // namespace thermnet
