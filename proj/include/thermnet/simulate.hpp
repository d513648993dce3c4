#pragma once

#include <string>
#include <vector>

#include "thermnet/circuit.hpp"
#include "thermnet/statespace.hpp"

namespace thermnet {

/// Uniformly sampled named input channels. Temperatures are degC, flows W,
/// times seconds. A single-sample series is a valid constant-input series;
/// its step is reported as 0.
struct TimeSeries {
    double start_time = 0.0;
    double step = 0.0;  // seconds, > 0 for multi-sample series
    std::vector<std::string> names;
    std::vector<Vector> channels;

    Index sample_count() const { return channels.empty() ? 0 : channels.front().size(); }
    double duration() const { return sample_count() > 1 ? step * double(sample_count() - 1) : 0.0; }

    Index channel_index(const std::string& name) const;  // -1 if absent
    const Vector& channel(const std::string& name) const;  // throws InputBindingError
};

/// Simulated node temperatures on a uniform grid.
struct Trajectory {
    Vector time;  // seconds
    std::vector<std::string> output_names;
    Matrix outputs;  // samples x outputs, degC
    std::vector<std::string> state_names;
    Matrix states;  // samples x states (empty unless requested)
};

enum class Method { ExplicitEuler, ImplicitEuler, ExactZoh };

const char* to_string(Method method);
Method method_from_string(const std::string& name);  // throws Error on unknown name

struct IntegratorConfig {
    Method method = Method::ExactZoh;
    double step = 600.0;   // seconds
    Vector initial_state;  // empty: steady state under the first input sample
    bool allow_unstable = false;     // permit explicit Euler past the limit
    bool interpolate_inputs = false; // linear interpolation instead of hold
    bool record_states = false;
};

/// Solves the steady-state temperatures A^T G A theta = A^T G b + f.
/// Throws SingularSystemError when some component has no reference branch.
Vector steady_state(const DaeSystem& dae, const SourceValues& sources);

/// Largest stable explicit-Euler step, 2 / max|eig(A)|.
double stability_limit(const StateSpace& ss);

/// Integrates the state-space model against the named input channels.
/// Channels are matched to the state-space input labels by name; inputs
/// sampled coarser than the simulation step are held (zero-order hold)
/// unless interpolation is enabled.
Trajectory integrate(const StateSpace& ss, const TimeSeries& inputs,
                     const IntegratorConfig& config);

struct EigenReport {
    Vector eigenvalues;     // 1/s, ascending (most negative first)
    Vector time_constants;  // s, -1/eigenvalue
    double dominant_time_constant = 0.0;
    double stiffness_ratio = 1.0;  // max|eig| / min|eig|
    double max_imaginary = 0.0;    // diagnostics; ~0 for well-posed circuits
};

EigenReport eigen_report(const StateSpace& ss);

/// Brute-force reference solver on the DAE itself: per input step the
/// massless rows are solved algebraically and the capacitive rows advance by
/// implicit Euler with `substeps` micro-steps (64 is the normative test
/// oracle). Channels are matched to flagged branch / node labels by name.
/// theta0 holds initial temperatures for all nodes; massless entries are
/// overwritten by the algebraic solve.
Trajectory dae_reference_solve(const DaeSystem& dae, const ThermalCircuit& circuit,
                               const TimeSeries& inputs, const Vector& theta0, int substeps = 64);

}  // namespace thermnet
