#include "thermnet/circuit.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace thermnet {

ThermalCircuit ThermalCircuit::with_shape(Index branches, Index nodes) {
    ThermalCircuit tc;
    tc.incidence = IntMatrix::Zero(branches, nodes);
    tc.conductances = Vector::Ones(branches);
    tc.capacities = Vector::Zero(nodes);
    tc.temp_source_flags = IntVector::Zero(branches);
    tc.flow_source_flags = IntVector::Zero(nodes);
    tc.output_flags = IntVector::Zero(nodes);
    tc.branch_labels.reserve(static_cast<std::size_t>(branches));
    for (Index i = 0; i < branches; ++i) tc.branch_labels.push_back("b" + std::to_string(i));
    tc.node_labels.reserve(static_cast<std::size_t>(nodes));
    for (Index j = 0; j < nodes; ++j) tc.node_labels.push_back("n" + std::to_string(j));
    return tc;
}

bool ThermalCircuit::operator==(const ThermalCircuit& other) const {
    return incidence == other.incidence && conductances == other.conductances &&
           capacities == other.capacities && temp_source_flags == other.temp_source_flags &&
           flow_source_flags == other.flow_source_flags && output_flags == other.output_flags &&
           branch_labels == other.branch_labels && node_labels == other.node_labels;
}

const char* to_string(ViolationKind kind) {
    switch (kind) {
        case ViolationKind::DimensionMismatch: return "dimension-mismatch";
        case ViolationKind::IncidenceEntryRange: return "incidence-entry-range";
        case ViolationKind::IncidenceRowDegree: return "incidence-row-degree";
        case ViolationKind::IncidenceRowSigns: return "incidence-row-signs";
        case ViolationKind::ConductanceNotPositive: return "conductance-not-positive";
        case ViolationKind::CapacityNegative: return "capacity-negative";
        case ViolationKind::FlagNotBinary: return "flag-not-binary";
        case ViolationKind::LabelCountMismatch: return "label-count-mismatch";
        case ViolationKind::FloatingMasslessNode: return "floating-massless-node";
        case ViolationKind::UnreachableNode: return "unreachable-node";
        case ViolationKind::UnanchoredMasslessComponent: return "unanchored-massless-component";
        case ViolationKind::NoReferenceComponent: return "no-reference-component";
    }
    return "unknown";
}

bool ValidationReport::has_errors() const {
    return std::any_of(violations.begin(), violations.end(),
                       [](const Violation& v) { return v.severity == Severity::Error; });
}

std::string ValidationReport::summary() const {
    std::ostringstream out;
    for (const auto& v : violations) {
        out << (v.severity == Severity::Error ? "error" : "warning") << " [" << to_string(v.kind)
            << "]";
        if (v.index >= 0) out << " at index " << v.index;
        out << ": " << v.message << "\n";
    }
    return out.str();
}

namespace {

void sort_report(ValidationReport& report) {
    std::sort(report.violations.begin(), report.violations.end(),
              [](const Violation& a, const Violation& b) {
                  if (a.kind != b.kind) return a.kind < b.kind;
                  if (a.index != b.index) return a.index < b.index;
                  return a.message < b.message;
              });
}

void add(ValidationReport& report, ViolationKind kind, Index index, Severity severity,
         std::string message) {
    report.violations.push_back({kind, index, severity, std::move(message)});
}

/// Union-find over node indices.
class DisjointSets {
public:
    explicit DisjointSets(Index n) : parent_(static_cast<std::size_t>(n)) {
        std::iota(parent_.begin(), parent_.end(), Index{0});
    }

    Index find(Index x) {
        while (parent_[static_cast<std::size_t>(x)] != x) {
            parent_[static_cast<std::size_t>(x)] =
                parent_[static_cast<std::size_t>(parent_[static_cast<std::size_t>(x)])];
            x = parent_[static_cast<std::size_t>(x)];
        }
        return x;
    }

    void unite(Index a, Index b) {
        a = find(a);
        b = find(b);
        if (a != b) parent_[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
    }

private:
    std::vector<Index> parent_;
};

}  // namespace

ValidationReport validate(const ThermalCircuit& circuit) {
    ValidationReport report;
    const Index nb = circuit.branch_count();
    const Index nn = circuit.node_count();

    if (circuit.conductances.size() != nb)
        add(report, ViolationKind::DimensionMismatch, -1, Severity::Error,
            "conductances has " + std::to_string(circuit.conductances.size()) +
                " entries, expected " + std::to_string(nb));
    if (circuit.temp_source_flags.size() != nb)
        add(report, ViolationKind::DimensionMismatch, -1, Severity::Error,
            "temp_source_flags has " + std::to_string(circuit.temp_source_flags.size()) +
                " entries, expected " + std::to_string(nb));
    if (circuit.capacities.size() != nn)
        add(report, ViolationKind::DimensionMismatch, -1, Severity::Error,
            "capacities has " + std::to_string(circuit.capacities.size()) + " entries, expected " +
                std::to_string(nn));
    if (circuit.flow_source_flags.size() != nn)
        add(report, ViolationKind::DimensionMismatch, -1, Severity::Error,
            "flow_source_flags has " + std::to_string(circuit.flow_source_flags.size()) +
                " entries, expected " + std::to_string(nn));
    if (circuit.output_flags.size() != nn)
        add(report, ViolationKind::DimensionMismatch, -1, Severity::Error,
            "output_flags has " + std::to_string(circuit.output_flags.size()) +
                " entries, expected " + std::to_string(nn));
    if (!circuit.branch_labels.empty() &&
        circuit.branch_labels.size() != static_cast<std::size_t>(nb))
        add(report, ViolationKind::LabelCountMismatch, -1, Severity::Error,
            "branch_labels count does not match branch count");
    if (!circuit.node_labels.empty() && circuit.node_labels.size() != static_cast<std::size_t>(nn))
        add(report, ViolationKind::LabelCountMismatch, -1, Severity::Error,
            "node_labels count does not match node count");

    for (Index i = 0; i < nb; ++i) {
        Index nonzeros = 0;
        int positives = 0;
        int negatives = 0;
        bool range_ok = true;
        for (Index j = 0; j < nn; ++j) {
            const int a = circuit.incidence(i, j);
            if (a == 0) continue;
            if (a != 1 && a != -1) {
                range_ok = false;
                continue;
            }
            ++nonzeros;
            if (a > 0) ++positives;
            else ++negatives;
        }
        if (!range_ok)
            add(report, ViolationKind::IncidenceEntryRange, i, Severity::Error,
                "incidence entries must be -1, 0 or +1");
        if (nonzeros == 0 || nonzeros > 2)
            add(report, ViolationKind::IncidenceRowDegree, i, Severity::Error,
                "branch row must have one nonzero (reference branch) or two");
        else if (nonzeros == 2 && (positives != 1 || negatives != 1))
            add(report, ViolationKind::IncidenceRowSigns, i, Severity::Error,
                "two-node branch must leave one node (-1) and enter another (+1)");
    }

    for (Index i = 0; i < std::min(nb, circuit.conductances.size()); ++i)
        if (!(circuit.conductances[i] > 0.0))
            add(report, ViolationKind::ConductanceNotPositive, i, Severity::Error,
                "conductance must be strictly positive, got " +
                    std::to_string(circuit.conductances[i]));
    for (Index j = 0; j < std::min(nn, circuit.capacities.size()); ++j)
        if (circuit.capacities[j] < 0.0)
            add(report, ViolationKind::CapacityNegative, j, Severity::Error,
                "capacity must be non-negative, got " + std::to_string(circuit.capacities[j]));

    auto check_flags = [&](const IntVector& flags, Index expected, const char* what) {
        for (Index k = 0; k < std::min(expected, flags.size()); ++k)
            if (flags[k] != 0 && flags[k] != 1)
                add(report, ViolationKind::FlagNotBinary, k, Severity::Error,
                    std::string(what) + " flag must be 0 or 1");
    };
    check_flags(circuit.temp_source_flags, nb, "temperature-source");
    check_flags(circuit.flow_source_flags, nn, "flow-source");
    check_flags(circuit.output_flags, nn, "output");

    sort_report(report);
    return report;
}

ValidationReport check_well_posed(const ThermalCircuit& circuit) {
    ValidationReport report;
    const Index nb = circuit.branch_count();
    const Index nn = circuit.node_count();

    std::vector<int> degree(static_cast<std::size_t>(nn), 0);
    std::vector<bool> touches_reference(static_cast<std::size_t>(nn), false);
    DisjointSets components(nn);

    for (Index i = 0; i < nb; ++i) {
        Index first = -1;
        Index second = -1;
        for (Index j = 0; j < nn; ++j) {
            if (circuit.incidence(i, j) == 0) continue;
            ++degree[static_cast<std::size_t>(j)];
            if (first < 0) first = j;
            else second = j;
        }
        if (first >= 0 && second < 0) touches_reference[static_cast<std::size_t>(first)] = true;
        if (first >= 0 && second >= 0) components.unite(first, second);
    }

    for (Index j = 0; j < nn; ++j) {
        if (degree[static_cast<std::size_t>(j)] > 0) continue;
        if (circuit.capacities[j] == 0.0)
            add(report, ViolationKind::FloatingMasslessNode, j, Severity::Error,
                "massless node has no incident branch; its temperature is undetermined");
        else
            add(report, ViolationKind::UnreachableNode, j, Severity::Warning,
                "node has capacity but no incident branch; it never exchanges heat");
    }

    // Component-level checks, over nodes that have at least one branch.
    std::vector<Index> roots;
    for (Index j = 0; j < nn; ++j) {
        if (degree[static_cast<std::size_t>(j)] == 0) continue;
        const Index r = components.find(j);
        if (std::find(roots.begin(), roots.end(), r) == roots.end()) roots.push_back(r);
    }
    for (Index root : roots) {
        bool has_reference = false;
        bool has_capacity = false;
        Index lowest = -1;
        for (Index j = 0; j < nn; ++j) {
            if (degree[static_cast<std::size_t>(j)] == 0 || components.find(j) != root) continue;
            if (lowest < 0) lowest = j;
            if (touches_reference[static_cast<std::size_t>(j)]) has_reference = true;
            if (circuit.capacities[j] > 0.0) has_capacity = true;
        }
        if (!has_reference && !has_capacity)
            add(report, ViolationKind::UnanchoredMasslessComponent, lowest, Severity::Error,
                "component has no reference branch and no capacity; the conduction "
                "matrix is singular on it");
        else if (!has_reference)
            add(report, ViolationKind::NoReferenceComponent, lowest, Severity::Warning,
                "component has no branch to the reference environment; steady state "
                "is not solvable for it");
    }

    sort_report(report);
    return report;
}

KktSystem build_kkt(const ThermalCircuit& circuit) {
    const Index nb = circuit.branch_count();
    const Index nn = circuit.node_count();
    KktSystem sys;
    sys.branches = nb;
    sys.nodes = nn;
    sys.temp_source_flags = circuit.temp_source_flags;
    sys.flow_source_flags = circuit.flow_source_flags;
    sys.matrix = Matrix::Zero(nb + nn, nb + nn);

    const Matrix a = circuit.incidence.cast<double>();
    sys.matrix.topLeftCorner(nb, nb) = circuit.conductances.cwiseInverse().asDiagonal();
    sys.matrix.topRightCorner(nb, nn) = a;
    sys.matrix.bottomLeftCorner(nn, nb) = -a.transpose();
    sys.matrix.bottomRightCorner(nn, nn) = circuit.capacities.asDiagonal();
    return sys;
}

DaeSystem build_dae(const ThermalCircuit& circuit) {
    DaeSystem dae;
    const Matrix a = circuit.incidence.cast<double>();
    dae.source_coupling = a.transpose() * circuit.conductances.asDiagonal();
    dae.conduction = -(dae.source_coupling * a);
    dae.capacities = circuit.capacities;
    dae.flow_source_flags = circuit.flow_source_flags;
    dae.temp_source_flags = circuit.temp_source_flags;
    return dae;
}

Vector expand_branch_temps(const IntVector& temp_source_flags, const Vector& branch_temps) {
    Vector full = Vector::Zero(temp_source_flags.size());
    Index next = 0;
    for (Index i = 0; i < temp_source_flags.size(); ++i) {
        if (temp_source_flags[i] == 0) continue;
        if (next >= branch_temps.size())
            throw IndexError("too few branch temperature values for the flagged branches");
        full[i] = branch_temps[next++];
    }
    if (next != branch_temps.size())
        throw IndexError("too many branch temperature values for the flagged branches");
    return full;
}

Vector expand_node_flows(const IntVector& flow_source_flags, const Vector& node_flows) {
    Vector full = Vector::Zero(flow_source_flags.size());
    Index next = 0;
    for (Index j = 0; j < flow_source_flags.size(); ++j) {
        if (flow_source_flags[j] == 0) continue;
        if (next >= node_flows.size())
            throw IndexError("too few node flow values for the flagged nodes");
        full[j] = node_flows[next++];
    }
    if (next != node_flows.size())
        throw IndexError("too many node flow values for the flagged nodes");
    return full;
}

}  // namespace thermnet
