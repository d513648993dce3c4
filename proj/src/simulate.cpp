#include "thermnet/simulate.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace thermnet {

Index TimeSeries::channel_index(const std::string& name) const {
    const auto it = std::find(names.begin(), names.end(), name);
    return it == names.end() ? -1 : static_cast<Index>(it - names.begin());
}

const Vector& TimeSeries::channel(const std::string& name) const {
    const Index idx = channel_index(name);
    if (idx < 0) throw InputBindingError("missing input channel '" + name + "'");
    return channels[static_cast<std::size_t>(idx)];
}

const char* to_string(Method method) {
    switch (method) {
        case Method::ExplicitEuler: return "explicit-euler";
        case Method::ImplicitEuler: return "implicit-euler";
        case Method::ExactZoh: return "exact-zoh";
    }
    return "unknown";
}

Method method_from_string(const std::string& name) {
    if (name == "explicit-euler") return Method::ExplicitEuler;
    if (name == "implicit-euler") return Method::ImplicitEuler;
    if (name == "exact-zoh") return Method::ExactZoh;
    throw Error("unknown integration method '" + name +
                "' (expected explicit-euler, implicit-euler or exact-zoh)");
}

Vector steady_state(const DaeSystem& dae, const SourceValues& sources) {
    const Vector b_full = expand_branch_temps(dae.temp_source_flags, sources.branch_temps);
    const Vector f_full = expand_node_flows(dae.flow_source_flags, sources.node_flows);
    Eigen::FullPivLU<Matrix> lu(-dae.conduction);
    if (!lu.isInvertible())
        throw SingularSystemError(
            "conduction matrix is singular; some component has no branch to the "
            "reference environment");
    return lu.solve((dae.source_coupling * b_full + f_full).eval());
}

EigenReport eigen_report(const StateSpace& ss) {
    EigenReport report;
    const Index n = ss.state_count();
    Eigen::EigenSolver<Matrix> solver(ss.a);
    std::vector<double> reals(static_cast<std::size_t>(n));
    report.max_imaginary = 0.0;
    for (Index i = 0; i < n; ++i) {
        reals[static_cast<std::size_t>(i)] = solver.eigenvalues()[i].real();
        report.max_imaginary = std::max(report.max_imaginary,
                                        std::abs(solver.eigenvalues()[i].imag()));
    }
    std::sort(reals.begin(), reals.end());
    report.eigenvalues = Eigen::Map<Vector>(reals.data(), n);
    report.time_constants.resize(n);
    for (Index i = 0; i < n; ++i)
        report.time_constants[i] = report.eigenvalues[i] < 0.0
                                       ? -1.0 / report.eigenvalues[i]
                                       : std::numeric_limits<double>::infinity();
    report.dominant_time_constant = n > 0 ? report.time_constants.maxCoeff() : 0.0;
    const double max_mag = n > 0 ? report.eigenvalues.cwiseAbs().maxCoeff() : 0.0;
    const double min_mag = n > 0 ? report.eigenvalues.cwiseAbs().minCoeff() : 0.0;
    report.stiffness_ratio = min_mag > 0.0 ? max_mag / min_mag : 1.0;
    return report;
}

double stability_limit(const StateSpace& ss) {
    const EigenReport report = eigen_report(ss);
    const double max_mag =
        report.eigenvalues.size() > 0 ? report.eigenvalues.cwiseAbs().maxCoeff() : 0.0;
    return max_mag > 0.0 ? 2.0 / max_mag : std::numeric_limits<double>::infinity();
}

namespace {

/// Input samples resolved against the state-space input labels, resampled
/// onto the simulation grid (rows = sim steps, cols = inputs).
Matrix resample_inputs(const StateSpace& ss, const TimeSeries& inputs, double sim_step,
                       Index sim_samples, bool interpolate) {
    const Index nu = ss.input_count();
    Matrix u(sim_samples, nu);
    const Index n_in = inputs.sample_count();
    for (Index col = 0; col < nu; ++col) {
        const Vector& chan = inputs.channel(ss.input_labels[static_cast<std::size_t>(col)]);
        for (Index j = 0; j < sim_samples; ++j) {
            const double t = double(j) * sim_step;
            if (n_in == 1) {
                u(j, col) = chan[0];
            } else if (interpolate) {
                const double s = std::clamp(t / inputs.step, 0.0, double(n_in - 1));
                const Index i0 = std::min(static_cast<Index>(s), n_in - 2);
                const double w = s - double(i0);
                u(j, col) = (1.0 - w) * chan[i0] + w * chan[i0 + 1];
            } else {
                const Index i0 = std::min(
                    static_cast<Index>(std::floor(t / inputs.step + 1e-9)), n_in - 1);
                u(j, col) = chan[i0];
            }
        }
    }
    return u;
}

Vector steady_initial_state(const StateSpace& ss, const Vector& u0) {
    Eigen::FullPivLU<Matrix> lu(ss.a);
    if (!lu.isInvertible())
        throw SingularSystemError(
            "state matrix is singular; cannot initialize from steady state, supply "
            "an explicit initial state");
    return -lu.solve((ss.b * u0).eval());
}

}  // namespace

Trajectory integrate(const StateSpace& ss, const TimeSeries& inputs,
                     const IntegratorConfig& config) {
    if (config.step <= 0.0) throw Error("integration step must be positive");
    if (inputs.sample_count() == 0) throw InputBindingError("input series has no samples");
    if (inputs.sample_count() == 1)
        throw InputBindingError(
            "single-sample input series has no duration; provide at least two samples");

    const double duration = inputs.duration();
    const Index sim_samples =
        static_cast<Index>(std::floor(duration / config.step + 1e-9)) + 1;
    const Matrix u = resample_inputs(ss, inputs, config.step, sim_samples,
                                     config.interpolate_inputs);

    const Index n = ss.state_count();
    Vector theta;
    if (config.initial_state.size() == 0) {
        theta = steady_initial_state(ss, u.row(0).transpose());
    } else {
        if (config.initial_state.size() != n)
            throw IndexError("initial state has " + std::to_string(config.initial_state.size()) +
                             " entries, expected " + std::to_string(n));
        theta = config.initial_state;
    }

    if (config.method == Method::ExplicitEuler && !config.allow_unstable) {
        const double limit = stability_limit(ss);
        if (config.step >= limit)
            throw StabilityError("explicit Euler step " + std::to_string(config.step) +
                                 " s exceeds the stability limit " + std::to_string(limit) +
                                 " s; reduce the step or allow instability explicitly");
    }

    // One-time preparation per method.
    Matrix ad, bd;  // exact-ZOH discrete pair
    Eigen::PartialPivLU<Matrix> implicit_lu;
    const Index nu = ss.input_count();
    if (config.method == Method::ExactZoh) {
        Matrix augmented = Matrix::Zero(n + nu, n + nu);
        augmented.topLeftCorner(n, n) = ss.a * config.step;
        augmented.topRightCorner(n, nu) = ss.b * config.step;
        const Matrix discrete = augmented.exp();
        ad = discrete.topLeftCorner(n, n);
        bd = discrete.topRightCorner(n, nu);
    } else if (config.method == Method::ImplicitEuler) {
        implicit_lu.compute(Matrix::Identity(n, n) - config.step * ss.a);
    }

    Trajectory traj;
    traj.time.resize(sim_samples);
    traj.output_names = ss.output_labels;
    traj.outputs.resize(sim_samples, ss.output_count());
    if (config.record_states) {
        traj.state_names = ss.state_labels;
        traj.states.resize(sim_samples, n);
    }

    for (Index k = 0; k < sim_samples; ++k) {
        traj.time[k] = inputs.start_time + double(k) * config.step;
        const Vector uk = u.row(k).transpose();
        traj.outputs.row(k) = (ss.c * theta + ss.d * uk).transpose();
        if (config.record_states) traj.states.row(k) = theta.transpose();
        if (k + 1 == sim_samples) break;
        switch (config.method) {
            case Method::ExactZoh:
                theta = ad * theta + bd * uk;
                break;
            case Method::ImplicitEuler:
                theta = implicit_lu.solve((theta + config.step * (ss.b * uk)).eval());
                break;
            case Method::ExplicitEuler:
                theta = theta + config.step * (ss.a * theta + ss.b * uk);
                break;
        }
    }
    return traj;
}

Trajectory dae_reference_solve(const DaeSystem& dae, const ThermalCircuit& circuit,
                               const TimeSeries& inputs, const Vector& theta0, int substeps) {
    if (substeps < 1) throw Error("substep count must be at least 1");
    if (inputs.sample_count() < 2)
        throw InputBindingError("reference solve needs at least two input samples");
    const Index nn = dae.node_count();
    const Index nb = dae.branch_count();
    if (theta0.size() != nn)
        throw IndexError("initial temperature vector length does not match node count");

    // Channel lookup per flagged source, by label.
    std::vector<const Vector*> branch_chan(static_cast<std::size_t>(nb), nullptr);
    std::vector<const Vector*> node_chan(static_cast<std::size_t>(nn), nullptr);
    for (Index i = 0; i < nb; ++i)
        if (dae.temp_source_flags[i] != 0)
            branch_chan[static_cast<std::size_t>(i)] =
                &inputs.channel(circuit.branch_labels[static_cast<std::size_t>(i)]);
    for (Index j = 0; j < nn; ++j)
        if (dae.flow_source_flags[j] != 0)
            node_chan[static_cast<std::size_t>(j)] =
                &inputs.channel(circuit.node_labels[static_cast<std::size_t>(j)]);

    std::vector<Index> massless, capacitive;
    for (Index j = 0; j < nn; ++j)
        (dae.capacities[j] == 0.0 ? massless : capacitive).push_back(j);
    const Index n0 = static_cast<Index>(massless.size());

    // Algebraic solve on the massless rows:  K_mm theta_m = -(K_mc theta_c + s_m).
    Matrix k_mm(n0, n0), k_mc(n0, nn - n0);
    for (Index r = 0; r < n0; ++r) {
        for (Index c = 0; c < n0; ++c)
            k_mm(r, c) = dae.conduction(massless[static_cast<std::size_t>(r)],
                                        massless[static_cast<std::size_t>(c)]);
        for (Index c = 0; c < nn - n0; ++c)
            k_mc(r, c) = dae.conduction(massless[static_cast<std::size_t>(r)],
                                        capacitive[static_cast<std::size_t>(c)]);
    }
    std::optional<Eigen::FullPivLU<Matrix>> lu_mm;
    if (n0 > 0) {
        lu_mm.emplace(k_mm);
        if (!lu_mm->isInvertible())
            throw SingularSystemError(
                "massless rows of the DAE are singular; the massless subnetwork is not "
                "resistively anchored");
    }

    // Implicit-Euler micro-step matrix (C/h - K), constant across the run.
    const double h = inputs.step / double(substeps);
    Matrix step_matrix = -dae.conduction;
    step_matrix += (dae.capacities / h).asDiagonal();
    Eigen::FullPivLU<Matrix> lu_step(step_matrix);
    if (!lu_step.isInvertible())
        throw SingularSystemError("DAE step matrix is singular; the circuit is not well-posed");

    const Index samples = inputs.sample_count();
    Trajectory traj;
    traj.time.resize(samples);
    traj.state_names = circuit.node_labels;
    traj.states.resize(samples, nn);
    std::vector<Index> output_nodes;
    for (Index j = 0; j < nn; ++j)
        if (circuit.output_flags[j] != 0) {
            output_nodes.push_back(j);
            traj.output_names.push_back(circuit.node_labels[static_cast<std::size_t>(j)]);
        }
    traj.outputs.resize(samples, static_cast<Index>(output_nodes.size()));

    Vector theta = theta0;
    Vector b_full = Vector::Zero(nb);
    Vector f_full = Vector::Zero(nn);
    const Vector cap_over_h = dae.capacities / h;

    for (Index k = 0; k < samples; ++k) {
        for (Index i = 0; i < nb; ++i)
            if (branch_chan[static_cast<std::size_t>(i)])
                b_full[i] = (*branch_chan[static_cast<std::size_t>(i)])[k];
        for (Index j = 0; j < nn; ++j)
            if (node_chan[static_cast<std::size_t>(j)])
                f_full[j] = (*node_chan[static_cast<std::size_t>(j)])[k];
        const Vector source = dae.source_coupling * b_full + f_full;

        // Make the massless rows consistent with the input now in effect.
        if (n0 > 0) {
            Vector rhs(n0);
            for (Index r = 0; r < n0; ++r) {
                const Index node = massless[static_cast<std::size_t>(r)];
                double coupled = source[node];
                for (Index c = 0; c < nn - n0; ++c)
                    coupled += k_mc(r, c) * theta[capacitive[static_cast<std::size_t>(c)]];
                rhs[r] = -coupled;
            }
            const Vector theta_m = lu_mm->solve(rhs);
            for (Index r = 0; r < n0; ++r) theta[massless[static_cast<std::size_t>(r)]] = theta_m[r];
        }

        traj.time[k] = inputs.start_time + double(k) * inputs.step;
        traj.states.row(k) = theta.transpose();
        for (std::size_t c = 0; c < output_nodes.size(); ++c)
            traj.outputs(k, static_cast<Index>(c)) = theta[output_nodes[c]];

        if (k + 1 == samples) break;
        for (int s = 0; s < substeps; ++s)
            theta = lu_step.solve((cap_over_h.cwiseProduct(theta) + source).eval());
    }
    return traj;
}

}  // namespace thermnet
