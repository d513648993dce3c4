#include "thermnet/statespace.hpp"

#include <Eigen/LU>

#include <algorithm>

namespace thermnet {

namespace {

Matrix select_rows(const Matrix& m, const std::vector<Index>& rows) {
    Matrix out(static_cast<Index>(rows.size()), m.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) out.row(static_cast<Index>(r)) = m.row(rows[r]);
    return out;
}

Matrix select_cols(const Matrix& m, const std::vector<Index>& cols) {
    Matrix out(m.rows(), static_cast<Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) out.col(static_cast<Index>(c)) = m.col(cols[c]);
    return out;
}

Matrix select_block(const Matrix& m, const std::vector<Index>& rows,
                    const std::vector<Index>& cols) {
    return select_cols(select_rows(m, rows), cols);
}

std::string label_or(const std::vector<std::string>& labels, Index i, const char* prefix) {
    if (i < static_cast<Index>(labels.size())) return labels[static_cast<std::size_t>(i)];
    return std::string(prefix) + std::to_string(i);
}

}  // namespace

Partition partition_capacities(const DaeSystem& dae) {
    Partition p;
    for (Index j = 0; j < dae.node_count(); ++j) {
        // Exact-zero test: near-zero capacities stay as (stiff) states.
        if (dae.capacities[j] == 0.0) p.massless.push_back(j);
        else p.capacitive.push_back(j);
    }
    p.k11 = select_block(dae.conduction, p.massless, p.massless);
    p.k12 = select_block(dae.conduction, p.massless, p.capacitive);
    p.k21 = select_block(dae.conduction, p.capacitive, p.massless);
    p.k22 = select_block(dae.conduction, p.capacitive, p.capacitive);
    p.kb1 = select_rows(dae.source_coupling, p.massless);
    p.kb2 = select_rows(dae.source_coupling, p.capacitive);
    p.capacitive_diagonal.resize(static_cast<Index>(p.capacitive.size()));
    for (std::size_t j = 0; j < p.capacitive.size(); ++j)
        p.capacitive_diagonal[static_cast<Index>(j)] = dae.capacities[p.capacitive[j]];
    p.temp_source_flags = dae.temp_source_flags;
    p.flow_source_flags = dae.flow_source_flags;
    return p;
}

StateSpace extract_state_space(const DaeSystem& dae, const ThermalCircuit& circuit) {
    const Partition p = partition_capacities(dae);
    const Index n0 = static_cast<Index>(p.massless.size());
    const Index nc = static_cast<Index>(p.capacitive.size());
    if (nc == 0)
        throw NoStatesError("every node is massless; there is no state to extract");

    // Eliminate the massless block by direct solves against K11 (factor once).
    Matrix x12 = Matrix::Zero(0, nc);                  // K11^-1 K12
    Matrix xb1 = Matrix::Zero(0, dae.branch_count());  // K11^-1 Kb1
    Matrix x11 = Matrix::Zero(0, 0);                   // K11^-1
    if (n0 > 0) {
        Eigen::FullPivLU<Matrix> lu(p.k11);
        if (!lu.isInvertible())
            throw SingularSystemError(
                "massless block of the conduction matrix is singular; the massless "
                "subnetwork is not resistively anchored");
        x12 = lu.solve(p.k12);
        xb1 = lu.solve(p.kb1);
        x11 = lu.solve(Matrix::Identity(n0, n0));
    }

    const Vector inv_cc = p.capacitive_diagonal.cwiseInverse();

    StateSpace ss;
    ss.state_nodes = p.capacitive;
    ss.a = inv_cc.asDiagonal() * (p.k22 - p.k21 * x12);

    // Full input blocks before restriction to flagged columns:
    //   branch temperatures, massless flows, capacitive flows.
    const Matrix bb_full = inv_cc.asDiagonal() * (p.kb2 - p.k21 * xb1);
    const Matrix bf0_full = inv_cc.asDiagonal() * (-(p.k21 * x11));
    const Matrix bfc_full = Matrix(inv_cc.asDiagonal());

    std::vector<Index> branch_cols, massless_cols, capacitive_cols;
    for (Index i = 0; i < dae.branch_count(); ++i)
        if (dae.temp_source_flags[i] != 0) {
            ss.input_branches.push_back(i);
            branch_cols.push_back(i);
        }
    for (Index j = 0; j < n0; ++j)
        if (dae.flow_source_flags[p.massless[static_cast<std::size_t>(j)]] != 0) {
            ss.input_massless_nodes.push_back(p.massless[static_cast<std::size_t>(j)]);
            massless_cols.push_back(j);
        }
    for (Index j = 0; j < nc; ++j)
        if (dae.flow_source_flags[p.capacitive[static_cast<std::size_t>(j)]] != 0) {
            ss.input_capacitive_nodes.push_back(p.capacitive[static_cast<std::size_t>(j)]);
            capacitive_cols.push_back(j);
        }

    const Index n_b = static_cast<Index>(branch_cols.size());
    const Index n_f0 = static_cast<Index>(massless_cols.size());
    const Index n_fc = static_cast<Index>(capacitive_cols.size());
    const Index nu = n_b + n_f0 + n_fc;
    ss.b.resize(nc, nu);
    ss.b.leftCols(n_b) = select_cols(bb_full, branch_cols);
    ss.b.middleCols(n_b, n_f0) = select_cols(bf0_full, massless_cols);
    ss.b.rightCols(n_fc) = select_cols(bfc_full, capacitive_cols);

    // Output rows by ascending global node id. Capacitive outputs select the
    // state directly; massless outputs come from the algebraic reconstruction,
    // so they carry feed-through.
    const Matrix c0_full = -x12;  // massless x states
    Matrix d0_full(n0, nu);       // massless x inputs
    d0_full.leftCols(n_b) = -select_cols(xb1, branch_cols);
    d0_full.middleCols(n_b, n_f0) = -select_cols(x11, massless_cols);
    d0_full.rightCols(n_fc).setZero();

    std::vector<Index> massless_pos(static_cast<std::size_t>(dae.node_count()), -1);
    std::vector<Index> capacitive_pos(static_cast<std::size_t>(dae.node_count()), -1);
    for (Index j = 0; j < n0; ++j)
        massless_pos[static_cast<std::size_t>(p.massless[static_cast<std::size_t>(j)])] = j;
    for (Index j = 0; j < nc; ++j)
        capacitive_pos[static_cast<std::size_t>(p.capacitive[static_cast<std::size_t>(j)])] = j;

    for (Index node = 0; node < dae.node_count(); ++node)
        if (circuit.output_flags[node] != 0) ss.output_nodes.push_back(node);

    const Index ny = static_cast<Index>(ss.output_nodes.size());
    ss.c = Matrix::Zero(ny, nc);
    ss.d = Matrix::Zero(ny, nu);
    for (Index r = 0; r < ny; ++r) {
        const Index node = ss.output_nodes[static_cast<std::size_t>(r)];
        if (const Index cp = capacitive_pos[static_cast<std::size_t>(node)]; cp >= 0) {
            ss.c(r, cp) = 1.0;
        } else {
            const Index mp = massless_pos[static_cast<std::size_t>(node)];
            ss.c.row(r) = c0_full.row(mp);
            ss.d.row(r) = d0_full.row(mp);
        }
    }

    for (Index node : ss.state_nodes)
        ss.state_labels.push_back(label_or(circuit.node_labels, node, "n"));
    for (Index i : ss.input_branches)
        ss.input_labels.push_back(label_or(circuit.branch_labels, i, "b"));
    for (Index node : ss.input_massless_nodes)
        ss.input_labels.push_back(label_or(circuit.node_labels, node, "n"));
    for (Index node : ss.input_capacitive_nodes)
        ss.input_labels.push_back(label_or(circuit.node_labels, node, "n"));
    for (Index node : ss.output_nodes)
        ss.output_labels.push_back(label_or(circuit.node_labels, node, "n"));
    return ss;
}

Vector reconstruct_massless(const Partition& partition, const Vector& theta_capacitive,
                            const SourceValues& sources) {
    const Index n0 = static_cast<Index>(partition.massless.size());
    if (n0 == 0) return Vector::Zero(0);
    if (theta_capacitive.size() != static_cast<Index>(partition.capacitive.size()))
        throw IndexError("capacitive temperature vector length does not match the partition");

    const Vector b_full = expand_branch_temps(partition.temp_source_flags, sources.branch_temps);
    const Vector f_full = expand_node_flows(partition.flow_source_flags, sources.node_flows);
    Vector f0(n0);
    for (Index j = 0; j < n0; ++j) f0[j] = f_full[partition.massless[static_cast<std::size_t>(j)]];

    Eigen::FullPivLU<Matrix> lu(partition.k11);
    if (!lu.isInvertible())
        throw SingularSystemError(
            "massless block of the conduction matrix is singular; the massless "
            "subnetwork is not resistively anchored");
    return -lu.solve((partition.k12 * theta_capacitive + partition.kb1 * b_full + f0).eval());
}

Vector build_input_vector(const StateSpace& ss, const SourceValues& sources,
                          const IntVector& temp_source_flags,
                          const IntVector& flow_source_flags) {
    const Vector b_full = expand_branch_temps(temp_source_flags, sources.branch_temps);
    const Vector f_full = expand_node_flows(flow_source_flags, sources.node_flows);
    Vector u(ss.input_count());
    Index k = 0;
    for (Index i : ss.input_branches) u[k++] = b_full[i];
    for (Index node : ss.input_massless_nodes) u[k++] = f_full[node];
    for (Index node : ss.input_capacitive_nodes) u[k++] = f_full[node];
    return u;
}

}  // namespace thermnet
