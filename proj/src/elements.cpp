#include "thermnet/elements.hpp"

#include <algorithm>
#include <cmath>

namespace thermnet {

namespace {

void require(bool condition, const char* message) {
    if (!condition) throw Error(message);
}

}  // namespace

ThermalCircuit wall_circuit(const WallSpec& spec) {
    require(!spec.layers.empty(), "wall needs at least one layer");
    require(spec.area > 0.0, "wall area must be positive");
    require(spec.outside_film > 0.0 && spec.inside_film > 0.0,
            "film coefficients must be positive");
    require(spec.absorptance >= 0.0 && spec.absorptance <= 1.0, "absorptance must be in [0, 1]");
    require(spec.emissivity >= 0.0 && spec.emissivity <= 1.0, "emissivity must be in [0, 1]");

    Index total_slices = 0;
    for (const auto& layer : spec.layers) {
        require(layer.thickness > 0.0, "layer thickness must be positive");
        require(layer.slices >= 1, "layer needs at least one slice");
        require(layer.material.conductivity > 0.0 && layer.material.density > 0.0 &&
                    layer.material.specific_heat > 0.0,
                "material properties must be positive");
        total_slices += layer.slices;
    }

    // Chain: ref -(film_out)- out_surface -(half)- m1 -(half)- j1 - ... -
    //        mN -(half)- in_surface -(film_in)- inside
    const Index nodes = 2 * total_slices + 2;
    const Index branches = 2 * total_slices + 2;
    ThermalCircuit tc = ThermalCircuit::with_shape(branches, nodes);

    const Index out_surface = 0;
    const Index in_surface = nodes - 2;
    const Index inside = nodes - 1;
    tc.node_labels[static_cast<std::size_t>(out_surface)] = "out_surface";
    tc.node_labels[static_cast<std::size_t>(in_surface)] = "in_surface";
    tc.node_labels[static_cast<std::size_t>(inside)] = "inside";

    Index branch = 0;
    Index prev = out_surface;
    tc.incidence(branch, out_surface) = 1;  // enters from the reference environment
    tc.conductances[branch] = spec.outside_film * spec.area;
    tc.temp_source_flags[branch] = 1;
    tc.branch_labels[static_cast<std::size_t>(branch)] = "film_out";
    ++branch;

    Index slice_index = 0;
    Index next_node = 1;
    for (const auto& layer : spec.layers) {
        const double d = layer.thickness / double(layer.slices);
        const double half_conductance = 2.0 * layer.material.conductivity * spec.area / d;
        const double slice_capacity =
            layer.material.density * layer.material.specific_heat * d * spec.area;
        for (int s = 0; s < layer.slices; ++s) {
            ++slice_index;
            const Index mid = next_node++;
            tc.node_labels[static_cast<std::size_t>(mid)] = "m" + std::to_string(slice_index);
            tc.capacities[mid] = slice_capacity;

            tc.incidence(branch, prev) = -1;
            tc.incidence(branch, mid) = 1;
            tc.conductances[branch] = half_conductance;
            tc.branch_labels[static_cast<std::size_t>(branch)] =
                "r" + std::to_string(slice_index) + "a";
            ++branch;

            const bool last_slice = slice_index == total_slices;
            const Index junction = last_slice ? in_surface : next_node++;
            if (!last_slice)
                tc.node_labels[static_cast<std::size_t>(junction)] =
                    "j" + std::to_string(slice_index);
            tc.incidence(branch, mid) = -1;
            tc.incidence(branch, junction) = 1;
            tc.conductances[branch] = half_conductance;
            tc.branch_labels[static_cast<std::size_t>(branch)] =
                "r" + std::to_string(slice_index) + "b";
            ++branch;
            prev = junction;
        }
    }

    tc.incidence(branch, in_surface) = -1;
    tc.incidence(branch, inside) = 1;
    tc.conductances[branch] = spec.inside_film * spec.area;
    tc.branch_labels[static_cast<std::size_t>(branch)] = "film_in";

    tc.flow_source_flags[out_surface] = 1;  // absorbed solar
    tc.flow_source_flags[in_surface] = 1;   // radiative interior gains
    return tc;
}

ThermalCircuit window_circuit(const WindowSpec& spec) {
    require(spec.overall_area > 0.0, "window overall area must be positive");
    require(spec.glass_area > 0.0 && spec.glass_area <= spec.overall_area,
            "glass area must be positive and no larger than the overall area");
    require(spec.u_value > 0.0, "window U-value must be positive");
    require(spec.outside_film > 0.0 && spec.inside_film > 0.0,
            "film coefficients must be positive");
    for (const auto& sample : spec.transmittance)
        require(sample.transmittance >= 0.0 && sample.transmittance <= 1.0,
                "transmittance must be in [0, 1]");

    ThermalCircuit tc = ThermalCircuit::with_shape(3, 3);
    tc.node_labels = {"out_surface", "in_surface", "inside"};
    tc.branch_labels = {"film_out", "glazing", "film_in"};

    tc.incidence(0, 0) = 1;  // from the reference environment
    tc.conductances[0] = spec.outside_film * spec.overall_area;
    tc.temp_source_flags[0] = 1;

    tc.incidence(1, 0) = -1;
    tc.incidence(1, 1) = 1;
    tc.conductances[1] = spec.u_value * spec.overall_area;

    tc.incidence(2, 1) = -1;
    tc.incidence(2, 2) = 1;
    tc.conductances[2] = spec.inside_film * spec.overall_area;
    return tc;
}

double airflow_conductance(const AirflowSpec& spec) {
    require(spec.flow_m3_per_h >= 0.0 && spec.air_changes_per_h >= 0.0,
            "airflow must be non-negative");
    double flow_m3_per_s = spec.flow_m3_per_h / 3600.0;
    if (spec.flow_m3_per_h == 0.0 && spec.air_changes_per_h > 0.0) {
        require(spec.zone_volume > 0.0, "air-change rate needs a zone volume");
        flow_m3_per_s = spec.air_changes_per_h * spec.zone_volume / 3600.0;
    }
    return spec.density * spec.specific_heat * flow_m3_per_s;
}

ThermalCircuit airflow_circuit(const AirflowSpec& spec) {
    const double conductance = airflow_conductance(spec);
    require(conductance > 0.0, "airflow circuit needs a positive flow");
    ThermalCircuit tc = ThermalCircuit::with_shape(1, 1);
    tc.node_labels = {"inside"};
    tc.branch_labels = {"flow"};
    tc.incidence(0, 0) = 1;
    tc.conductances[0] = conductance;
    tc.temp_source_flags[0] = 1;
    return tc;
}

ThermalCircuit zone_air_circuit(double volume) {
    require(volume > 0.0, "zone volume must be positive");
    ThermalCircuit tc = ThermalCircuit::with_shape(0, 1);
    tc.node_labels = {"air"};
    tc.capacities[0] = kAirDensity * kAirSpecificHeat * volume;
    tc.flow_source_flags[0] = 1;
    tc.output_flags[0] = 1;
    return tc;
}

HeaterSplit heater_split(double power) {
    require(power >= 0.0, "heater power must be non-negative");
    const double convective = 0.7 * power;
    return {convective, power - convective};
}

std::vector<double> distribute_by_area(double total, const std::vector<double>& areas) {
    double sum = 0.0;
    for (double a : areas) {
        require(a >= 0.0, "areas must be non-negative");
        sum += a;
    }
    std::vector<double> shares(areas.size(), 0.0);
    if (sum <= 0.0) return shares;
    for (std::size_t i = 0; i < areas.size(); ++i) shares[i] = total * areas[i] / sum;
    return shares;
}

double solar_gain(const WallSpec& spec, double irradiance) {
    require(irradiance >= 0.0, "irradiance must be non-negative");
    return spec.absorptance * irradiance * spec.area;
}

double solar_gain(const WindowSpec& spec, double irradiance, double incidence_deg) {
    require(irradiance >= 0.0, "irradiance must be non-negative");
    if (incidence_deg >= 90.0 || spec.transmittance.empty()) return 0.0;
    const double angle = std::max(incidence_deg, 0.0);

    const auto& table = spec.transmittance;
    double tau;
    if (angle <= table.front().incidence_deg) {
        tau = table.front().transmittance;
    } else if (angle >= table.back().incidence_deg) {
        tau = table.back().transmittance;
    } else {
        std::size_t hi = 1;
        while (table[hi].incidence_deg < angle) ++hi;
        const auto& lo_s = table[hi - 1];
        const auto& hi_s = table[hi];
        const double w = (angle - lo_s.incidence_deg) / (hi_s.incidence_deg - lo_s.incidence_deg);
        tau = (1.0 - w) * lo_s.transmittance + w * hi_s.transmittance;
    }
    return tau * irradiance * spec.glass_area;
}

double radiative_link(double emissivity1, double emissivity2, double area, double mean_temp_k) {
    require(emissivity1 > 0.0 && emissivity1 <= 1.0 && emissivity2 > 0.0 && emissivity2 <= 1.0,
            "emissivity must be in (0, 1]");
    require(area > 0.0, "exchange area must be positive");
    require(mean_temp_k > 0.0, "mean temperature must be positive kelvin");
    const double eps_eff = 1.0 / (1.0 / emissivity1 + 1.0 / emissivity2 - 1.0);
    return 4.0 * eps_eff * kStefanBoltzmann * std::pow(mean_temp_k, 3) * area;
}

double wall_u_value(const WallSpec& spec) {
    double resistance = 1.0 / spec.outside_film + 1.0 / spec.inside_film;
    for (const auto& layer : spec.layers)
        resistance += layer.thickness / layer.material.conductivity;
    return 1.0 / resistance;
}

}  // namespace thermnet
