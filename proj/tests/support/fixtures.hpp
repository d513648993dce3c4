#pragma once

// Shared fixtures and generators for the test suites.

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "thermnet/assembly.hpp"
#include "thermnet/circuit.hpp"
#include "thermnet/simulate.hpp"

namespace thermnet::testing {

/// TC1 of the three-circuit assembly fixture: two branches, two nodes,
/// a temperature source on the reference branch, capacity on node 1.
///   A1 = [[1, 0], [-1, 1]]
inline ThermalCircuit fixture_tc1(double g11 = 5.0, double g12 = 2.5, double c11 = 20.0) {
    ThermalCircuit tc = ThermalCircuit::with_shape(2, 2);
    tc.incidence << 1, 0, -1, 1;
    tc.conductances << g11, g12;
    tc.capacities << c11, 0.0;
    tc.temp_source_flags << 1, 0;
    tc.flow_source_flags << 1, 0;
    tc.branch_labels = {"g11", "g12"};
    tc.node_labels = {"tc1_n1", "tc1_n2"};
    return tc;
}

/// TC2: one branch between two nodes, capacity on its second node.
///   A2 = [-1, 1]
inline ThermalCircuit fixture_tc2(double g21 = 4.0, double half_c = 15.0) {
    ThermalCircuit tc = ThermalCircuit::with_shape(1, 2);
    tc.incidence << -1, 1;
    tc.conductances << g21;
    tc.capacities << 0.0, half_c;
    tc.flow_source_flags << 0, 1;
    tc.branch_labels = {"g21"};
    tc.node_labels = {"tc2_n1", "tc2_n2"};
    return tc;
}

/// TC3: two reference branches into one node, one temperature source, the
/// other half of the shared capacity.
///   A3 = [[1], [1]]
inline ThermalCircuit fixture_tc3(double g31 = 3.0, double g32 = 1.5, double half_c = 15.0) {
    ThermalCircuit tc = ThermalCircuit::with_shape(2, 1);
    tc.incidence << 1, 1;
    tc.conductances << g31, g32;
    tc.capacities << half_c;
    tc.temp_source_flags << 1, 0;
    tc.flow_source_flags << 1;
    tc.output_flags << 1;
    tc.branch_labels = {"gv", "gc"};
    tc.node_labels = {"tc3_n1"};
    return tc;
}

/// Node identifications of the fixture: (tc1, n2) = (tc2, n1) and
/// (tc2, n2) = (tc3, n1).
inline ConnectionSet fixture_connections() {
    ConnectionSet set;
    set.pairs.push_back({{0, 1}, {1, 0}});
    set.pairs.push_back({{1, 1}, {2, 0}});
    return set;
}

inline std::vector<ThermalCircuit> fixture_circuits() {
    return {fixture_tc1(), fixture_tc2(), fixture_tc3()};
}

/// Two-branch chain: ref -(g1, temperature source)-> n0 (massless)
/// -(g2)-> n1 (capacity c2). The canonical massless-elimination example.
inline ThermalCircuit chain_circuit(double g1 = 2.0, double g2 = 3.0, double c2 = 500.0,
                                    bool output_on_massless = false) {
    ThermalCircuit tc = ThermalCircuit::with_shape(2, 2);
    tc.incidence << 1, 0, -1, 1;
    tc.conductances << g1, g2;
    tc.capacities << 0.0, c2;
    tc.temp_source_flags << 1, 0;
    if (output_on_massless) tc.output_flags << 1, 0;
    else tc.output_flags << 0, 1;
    return tc;
}

/// Single RC: ref -(g, temperature source)-> node with capacity c,
/// flow source and output flags set.
inline ThermalCircuit single_rc(double g = 1.0, double c = 100.0) {
    ThermalCircuit tc = ThermalCircuit::with_shape(1, 1);
    tc.incidence << 1;
    tc.conductances << g;
    tc.capacities << c;
    tc.temp_source_flags << 1;
    tc.flow_source_flags << 1;
    tc.output_flags << 1;
    return tc;
}

struct RandomCircuitOptions {
    Index max_nodes = 12;
    Index max_branches = 20;
    double min_conductance = 0.5;
    double max_conductance = 5.0;
    double min_capacity = 5.0e3;
    double max_capacity = 5.0e4;
    double massless_probability = 0.4;
    double temp_flag_probability = 0.4;
    double flow_flag_probability = 0.4;
    double output_flag_probability = 0.5;
    bool reference_sources_only = false;  // temp flags only on ref-entering branches
};

/// Well-posed random circuit: a reference-anchored spanning tree plus random
/// extra branches, a random massless subset (at least one capacitive node).
inline ThermalCircuit random_circuit(std::mt19937& rng,
                                     const RandomCircuitOptions& opt = {}) {
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::uniform_int_distribution<Index> node_count_dist(1, opt.max_nodes);
    const Index nn = node_count_dist(rng);

    struct Branch {
        Index from = -1;  // -1 is the reference environment
        Index to = 0;
    };
    std::vector<Branch> branches;
    branches.push_back({-1, 0});  // anchor the first node to the reference
    for (Index j = 1; j < nn; ++j) {
        std::uniform_int_distribution<Index> earlier(0, j - 1);
        branches.push_back({earlier(rng), j});
    }
    const Index max_extra = opt.max_branches - static_cast<Index>(branches.size());
    if (max_extra > 0) {
        std::uniform_int_distribution<Index> extra_dist(0, max_extra);
        const Index extra = extra_dist(rng);
        std::uniform_int_distribution<Index> any_node(0, nn - 1);
        for (Index e = 0; e < extra; ++e) {
            const Index a = any_node(rng);
            if (uniform(rng) < 0.2) {
                branches.push_back({-1, a});
            } else {
                Index b = any_node(rng);
                if (b == a) {
                    branches.push_back({-1, a});
                } else {
                    branches.push_back({a, b});
                }
            }
        }
    }

    const Index nb = static_cast<Index>(branches.size());
    ThermalCircuit tc = ThermalCircuit::with_shape(nb, nn);
    std::uniform_real_distribution<double> g_dist(opt.min_conductance, opt.max_conductance);
    std::uniform_real_distribution<double> c_dist(opt.min_capacity, opt.max_capacity);

    for (Index i = 0; i < nb; ++i) {
        if (branches[static_cast<std::size_t>(i)].from >= 0)
            tc.incidence(i, branches[static_cast<std::size_t>(i)].from) = -1;
        tc.incidence(i, branches[static_cast<std::size_t>(i)].to) = 1;
        tc.conductances[i] = g_dist(rng);
        const bool is_reference = branches[static_cast<std::size_t>(i)].from < 0;
        if ((is_reference || !opt.reference_sources_only) &&
            uniform(rng) < opt.temp_flag_probability)
            tc.temp_source_flags[i] = 1;
    }

    Index capacitive = 0;
    for (Index j = 0; j < nn; ++j) {
        if (uniform(rng) >= opt.massless_probability) {
            tc.capacities[j] = c_dist(rng);
            ++capacitive;
        }
        if (uniform(rng) < opt.flow_flag_probability) tc.flow_source_flags[j] = 1;
        if (uniform(rng) < opt.output_flag_probability) tc.output_flags[j] = 1;
    }
    if (capacitive == 0) {
        tc.capacities[nn - 1] = c_dist(rng);  // keep at least one state
    }
    return tc;
}

/// Random piecewise-constant channels named after the flagged branch/node
/// labels of the circuit, switching every `segment` samples.
inline TimeSeries random_sources_series(std::mt19937& rng, const ThermalCircuit& circuit,
                                        double step, Index samples, Index segment = 50,
                                        double temp_scale = 10.0, double flow_scale = 50.0) {
    std::uniform_real_distribution<double> temp_dist(-temp_scale, temp_scale);
    std::uniform_real_distribution<double> flow_dist(-flow_scale, flow_scale);
    TimeSeries series;
    series.step = step;
    auto piecewise = [&](auto& dist) {
        Vector v(samples);
        double level = dist(rng);
        for (Index k = 0; k < samples; ++k) {
            if (k % segment == 0) level = dist(rng);
            v[k] = level;
        }
        return v;
    };
    for (Index i = 0; i < circuit.branch_count(); ++i)
        if (circuit.temp_source_flags[i] != 0) {
            series.names.push_back(circuit.branch_labels[static_cast<std::size_t>(i)]);
            series.channels.push_back(piecewise(temp_dist));
        }
    for (Index j = 0; j < circuit.node_count(); ++j)
        if (circuit.flow_source_flags[j] != 0) {
            series.names.push_back(circuit.node_labels[static_cast<std::size_t>(j)]);
            series.channels.push_back(piecewise(flow_dist));
        }
    // Keep the time grid expressible even for source-free circuits.
    series.names.push_back("unused_zero");
    series.channels.push_back(Vector::Zero(samples));
    return series;
}

/// Classical Jacobi rotation eigensolver for symmetric matrices; written out
/// here so eigenvalue checks do not lean on the library paths under test.
/// Returns the eigenvalues in ascending order.
inline Vector jacobi_eigenvalues(Matrix m, int max_sweeps = 100) {
    const Index n = m.rows();
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (Index p = 0; p < n; ++p)
            for (Index q = p + 1; q < n; ++q) off += m(p, q) * m(p, q);
        if (off < 1e-28 * std::max(1.0, m.squaredNorm())) break;
        for (Index p = 0; p < n; ++p) {
            for (Index q = p + 1; q < n; ++q) {
                if (m(p, q) == 0.0) continue;
                const double theta = (m(q, q) - m(p, p)) / (2.0 * m(p, q));
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (Index k = 0; k < n; ++k) {
                    const double mkp = m(k, p);
                    const double mkq = m(k, q);
                    m(k, p) = c * mkp - s * mkq;
                    m(k, q) = s * mkp + c * mkq;
                }
                for (Index k = 0; k < n; ++k) {
                    const double mpk = m(p, k);
                    const double mqk = m(q, k);
                    m(p, k) = c * mpk - s * mqk;
                    m(q, k) = s * mpk + c * mqk;
                }
            }
        }
    }
    std::vector<double> diag(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) diag[static_cast<std::size_t>(i)] = m(i, i);
    std::sort(diag.begin(), diag.end());
    return Eigen::Map<Vector>(diag.data(), n);
}

/// Similarity transform making the state matrix symmetric:
/// S = C^{1/2} A C^{-1/2} with C the capacitive diagonal.
inline Matrix symmetrized_state_matrix(const Matrix& a, const Vector& capacities) {
    const Vector half = capacities.cwiseSqrt();
    return half.asDiagonal() * a * half.cwiseInverse().asDiagonal();
}

/// Gershgorin bound on the fastest state-space eigenvalue, computed from the
/// DAE arrays only (independent of the extraction path): the eliminated
/// system is dominated by the capacitive block of the conduction matrix in
/// the capacity-weighted norm.
inline double eigenvalue_magnitude_bound(const DaeSystem& dae) {
    double bound = 0.0;
    for (Index i = 0; i < dae.node_count(); ++i) {
        if (dae.capacities[i] == 0.0) continue;
        double row = 0.0;
        for (Index j = 0; j < dae.node_count(); ++j) {
            if (dae.capacities[j] == 0.0) continue;
            row += std::abs(dae.conduction(i, j)) /
                   std::sqrt(dae.capacities[i] * dae.capacities[j]);
        }
        bound = std::max(bound, row);
    }
    return bound;
}

}  // namespace thermnet::testing
