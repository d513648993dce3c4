#pragma once

#include <vector>

#include "thermnet/circuit.hpp"

namespace thermnet {

// Fixed physical constants (pinned for reproducibility).
inline constexpr double kAirDensity = 1.2;           // kg/m^3
inline constexpr double kAirSpecificHeat = 1006.0;   // J/(kg K)
inline constexpr double kStefanBoltzmann = 5.67e-8;  // W/(m^2 K^4)

// Conventional design film coefficients, overridable per element.
inline constexpr double kDefaultOutsideFilm = 25.0;  // W/(m^2 K)
inline constexpr double kDefaultInsideFilm = 7.7;    // W/(m^2 K)

struct Material {
    double conductivity = 0.0;   // W/(m K)
    double density = 0.0;        // kg/m^3
    double specific_heat = 0.0;  // J/(kg K)
};

struct LayerSpec {
    Material material;
    double thickness = 0.0;  // m
    int slices = 1;          // mesh count per layer
};

/// Multi-layer opaque element, layers ordered outside -> inside.
struct WallSpec {
    std::vector<LayerSpec> layers;
    double area = 0.0;  // m^2
    double outside_film = kDefaultOutsideFilm;
    double inside_film = kDefaultInsideFilm;
    double absorptance = 0.6;  // shortwave
    double emissivity = 0.9;   // longwave
};

struct TransmittanceSample {
    double incidence_deg = 0.0;
    double transmittance = 0.0;
};

struct WindowSpec {
    double overall_area = 0.0;  // m^2, drives conduction
    double glass_area = 0.0;    // m^2, drives solar transmission
    double u_value = 0.0;       // W/(m^2 K), assembly transmittance
    std::vector<TransmittanceSample> transmittance;  // sorted by incidence angle
    double outside_film = kDefaultOutsideFilm;
    double inside_film = kDefaultInsideFilm;
};

/// Air exchange, either a direct volumetric flow or an air-change rate
/// against a zone volume.
struct AirflowSpec {
    double flow_m3_per_h = 0.0;  // used when > 0
    double air_changes_per_h = 0.0;
    double zone_volume = 0.0;  // m^3, required with air_changes_per_h
    double density = kAirDensity;
    double specific_heat = kAirSpecificHeat;
};

/// Discretizes the wall into the film / half-slice resistance chain with one
/// capacity node mid-slice. The outer film branch carries a temperature-
/// source flag (label "film_out"); the outer and inner surface nodes carry
/// flow-source flags ("out_surface": absorbed solar, "in_surface": radiative
/// interior gains). The chain ends at the massless terminal node "inside",
/// meant to merge with a zone air node.
ThermalCircuit wall_circuit(const WallSpec& spec);

/// Massless chain outside film -> U*S glazing -> inside film, with the
/// outdoor temperature-source flag on the film branch and terminal node
/// "inside".
ThermalCircuit window_circuit(const WindowSpec& spec);

/// Sensible-heat conductance rho * cp * Vdot of the airflow, W/K.
double airflow_conductance(const AirflowSpec& spec);

/// Single-branch circuit (conductance = airflow_conductance) from a flagged
/// supply-temperature branch to the terminal node "inside".
ThermalCircuit airflow_circuit(const AirflowSpec& spec);

/// One "air" node with capacity rho * cp * volume, flow-source and output
/// flags set.
ThermalCircuit zone_air_circuit(double volume);

struct HeaterSplit {
    double convective = 0.0;  // W, to the air node
    double radiative = 0.0;   // W, to interior surfaces by area weights
};

/// 70 % convection / 30 % radiation split of the heater power.
HeaterSplit heater_split(double power);

/// Distributes a total flow over surfaces proportionally to their areas.
std::vector<double> distribute_by_area(double total, const std::vector<double>& areas);

/// Shortwave gain absorbed at the outside surface: absorptance * E * area.
double solar_gain(const WallSpec& spec, double irradiance);

/// Shortwave gain transmitted through the glazing:
/// tau(incidence) * E * glass_area. The transmittance curve interpolates
/// linearly; below the first sample it holds the first value, past the last
/// sample it holds the last, and at or beyond 90 degrees it is zero.
double solar_gain(const WindowSpec& spec, double irradiance, double incidence_deg);

/// Linearized long-wave exchange conductance between two gray parallel
/// surfaces: 4 * eps_eff * sigma * Tmean^3 * area with
/// eps_eff = 1 / (1/eps1 + 1/eps2 - 1).
double radiative_link(double emissivity1, double emissivity2, double area, double mean_temp_k);

/// Series U-value of the wall including both films, W/(m^2 K).
double wall_u_value(const WallSpec& spec);

}  // namespace thermnet
