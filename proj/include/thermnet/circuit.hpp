#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "thermnet/errors.hpp"

namespace thermnet {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IntMatrix = Eigen::MatrixXi;
using IntVector = Eigen::VectorXi;
using Index = Eigen::Index;

/// A thermal circuit: a weighted directed graph whose branches carry heat
/// flow through conductances (and optional imposed-temperature sources) and
/// whose nodes carry temperatures, capacities and optional injected-flow
/// sources.
///
/// Conventions:
///   - incidence(i, j) = +1 if branch i enters node j, -1 if it leaves it.
///   - A row with a single nonzero entry is a branch to the reference
///     environment (either orientation is legal).
///   - conductances are W/K, capacities J/K.
struct ThermalCircuit {
    IntMatrix incidence;          // branches x nodes, entries in {-1, 0, +1}
    Vector conductances;          // per branch, strictly positive
    Vector capacities;            // per node, >= 0
    IntVector temp_source_flags;  // per branch, 0/1
    IntVector flow_source_flags;  // per node, 0/1
    IntVector output_flags;       // per node, 0/1
    std::vector<std::string> branch_labels;
    std::vector<std::string> node_labels;

    Index branch_count() const { return incidence.rows(); }
    Index node_count() const { return incidence.cols(); }

    /// Default-initialized arrays for a circuit of the given shape
    /// (zero capacities, no flags, labels "b0...", "n0...").
    static ThermalCircuit with_shape(Index branches, Index nodes);

    bool operator==(const ThermalCircuit& other) const;
};

/// Source magnitudes for one evaluation instant. Circuits carry only 0/1
/// indicator flags; the magnitudes are supplied separately so one circuit
/// can be driven by many input scenarios.
struct SourceValues {
    Vector branch_temps;  // one per flagged branch, in branch order, degC
    Vector node_flows;    // one per flagged node, in node order, W

    static SourceValues zero(Index flagged_branches, Index flagged_nodes) {
        return {Vector::Zero(flagged_branches), Vector::Zero(flagged_nodes)};
    }
};

/// The block system [[G^-1, A], [-A^T, C]] [q; theta] = [b; f].
/// The lower-right capacity block is stored as data only; it is never used
/// dynamically.
struct KktSystem {
    Matrix matrix;  // (branches + nodes) square
    Index branches = 0;
    Index nodes = 0;
    IntVector temp_source_flags;  // rhs structure, branch part
    IntVector flow_source_flags;  // rhs structure, node part

    auto conductance_inverse_block() const { return matrix.topLeftCorner(branches, branches); }
    auto incidence_block() const { return matrix.topRightCorner(branches, nodes); }
    auto neg_incidence_transpose_block() const { return matrix.bottomLeftCorner(nodes, branches); }
    auto capacity_block() const { return matrix.bottomRightCorner(nodes, nodes); }
};

/// The differential-algebraic form C theta' = conduction * theta
///                                           + source_coupling * b + f.
struct DaeSystem {
    Matrix conduction;            // -A^T G A, node x node, W/K
    Matrix source_coupling;       // A^T G, node x branch, W/K
    Vector capacities;            // node diagonal, J/K
    IntVector flow_source_flags;  // per node
    IntVector temp_source_flags;  // per branch, carried for source expansion

    Index node_count() const { return conduction.rows(); }
    Index branch_count() const { return source_coupling.cols(); }
};

enum class ViolationKind {
    DimensionMismatch,
    IncidenceEntryRange,
    IncidenceRowDegree,
    IncidenceRowSigns,
    ConductanceNotPositive,
    CapacityNegative,
    FlagNotBinary,
    LabelCountMismatch,
    FloatingMasslessNode,
    UnreachableNode,
    UnanchoredMasslessComponent,
    NoReferenceComponent,
};

enum class Severity { Warning, Error };

const char* to_string(ViolationKind kind);

struct Violation {
    ViolationKind kind;
    Index index;  // offending branch/node index, or -1 for container-level
    Severity severity;
    std::string message;
};

/// Violations are data, not failures: an empty report means the circuit
/// satisfies every structural invariant checked by the producing operation.
struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }
    bool has_errors() const;
    std::string summary() const;
};

/// Checks the structural invariants of the circuit arrays (dimensions,
/// incidence pattern, sign constraints, flag values). Deterministic
/// ordering by (kind, index).
ValidationReport validate(const ThermalCircuit& circuit);

/// Checks solvability beyond per-array structure:
///   - massless node with no incident branch            -> error
///   - capacitive node with no incident branch          -> warning
///   - component with no reference branch, no capacity  -> error
///   - component with capacity but no reference branch  -> warning
/// No errors  <=>  the massless block of A^T G A is invertible.
ValidationReport check_well_posed(const ThermalCircuit& circuit);

/// Builds the KKT block system from a validated circuit.
KktSystem build_kkt(const ThermalCircuit& circuit);

/// Builds the DAE form from a validated circuit.
DaeSystem build_dae(const ThermalCircuit& circuit);

/// Expands flagged-only source magnitudes into full per-branch / per-node
/// vectors (zeros in unflagged positions).
Vector expand_branch_temps(const IntVector& temp_source_flags, const Vector& branch_temps);
Vector expand_node_flows(const IntVector& flow_source_flags, const Vector& node_flows);

}  // namespace thermnet
