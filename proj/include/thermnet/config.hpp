#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "thermnet/assembly.hpp"
#include "thermnet/circuit.hpp"
#include "thermnet/elements.hpp"

namespace thermnet {

struct SourceLoc {
    std::string file;
    int line = 0;
    int column = 0;
};

/// "element.label" reference into an element's nodes or branches.
struct TargetRef {
    std::string element;
    std::string label;
    SourceLoc loc;

    std::string text() const { return element + "." + label; }
    bool operator==(const TargetRef& other) const {
        return element == other.element && label == other.label;
    }
};

struct MaterialDecl {
    std::string name;
    Material material;
    SourceLoc loc;

    bool operator==(const MaterialDecl& o) const {
        return name == o.name && material.conductivity == o.material.conductivity &&
               material.density == o.material.density &&
               material.specific_heat == o.material.specific_heat;
    }
};

struct LayerDecl {
    std::string material;
    double thickness = 0.0;
    int slices = 1;
    SourceLoc loc;

    bool operator==(const LayerDecl& o) const {
        return material == o.material && thickness == o.thickness && slices == o.slices;
    }
};

struct WallTypeDecl {
    std::string name;
    double absorptance = 0.6;
    double emissivity = 0.9;
    std::vector<LayerDecl> layers;
    SourceLoc loc;

    bool operator==(const WallTypeDecl& o) const {
        return name == o.name && absorptance == o.absorptance && emissivity == o.emissivity &&
               layers == o.layers;
    }
};

struct WindowTypeDecl {
    std::string name;
    double overall_area = 0.0;
    double glass_area = 0.0;
    std::vector<TransmittanceSample> transmittance;
    SourceLoc loc;

    bool operator==(const WindowTypeDecl& o) const {
        if (name != o.name || overall_area != o.overall_area || glass_area != o.glass_area ||
            transmittance.size() != o.transmittance.size())
            return false;
        for (std::size_t i = 0; i < transmittance.size(); ++i)
            if (transmittance[i].incidence_deg != o.transmittance[i].incidence_deg ||
                transmittance[i].transmittance != o.transmittance[i].transmittance)
                return false;
        return true;
    }
};

struct WallDecl {
    std::string name;
    std::string type;
    double area = 0.0;
    std::optional<double> outside_film;
    std::optional<double> inside_film;
    std::optional<double> absorptance;
    std::optional<double> emissivity;
    std::optional<int> slices;  // overrides every layer's mesh count
    SourceLoc loc;

    bool operator==(const WallDecl& o) const {
        return name == o.name && type == o.type && area == o.area &&
               outside_film == o.outside_film && inside_film == o.inside_film &&
               absorptance == o.absorptance && emissivity == o.emissivity && slices == o.slices;
    }
};

struct WindowDecl {
    std::string name;
    std::string type;
    double u_value = 0.0;
    std::optional<double> outside_film;
    std::optional<double> inside_film;
    SourceLoc loc;

    bool operator==(const WindowDecl& o) const {
        return name == o.name && type == o.type && u_value == o.u_value &&
               outside_film == o.outside_film && inside_film == o.inside_film;
    }
};

struct ZoneDecl {
    std::string name;
    double volume = 0.0;
    SourceLoc loc;

    bool operator==(const ZoneDecl& o) const { return name == o.name && volume == o.volume; }
};

struct AirflowDecl {
    std::string name;
    std::optional<double> flow_m3_per_h;
    std::optional<double> air_changes_per_h;
    std::optional<double> zone_volume;
    SourceLoc loc;

    bool operator==(const AirflowDecl& o) const {
        return name == o.name && flow_m3_per_h == o.flow_m3_per_h &&
               air_changes_per_h == o.air_changes_per_h && zone_volume == o.zone_volume;
    }
};

struct RawNodeDecl {
    std::string name;
    double capacity = 0.0;
    bool flow_source = false;
    bool output = false;
    SourceLoc loc;

    bool operator==(const RawNodeDecl& o) const {
        return name == o.name && capacity == o.capacity && flow_source == o.flow_source &&
               output == o.output;
    }
};

struct RawBranchDecl {
    std::string name;
    std::string from;  // node name or "ref"
    std::string to;
    double conductance = 0.0;
    bool temp_source = false;
    SourceLoc loc;

    bool operator==(const RawBranchDecl& o) const {
        return name == o.name && from == o.from && to == o.to &&
               conductance == o.conductance && temp_source == o.temp_source;
    }
};

struct RawCircuitDecl {
    std::string name;
    std::vector<RawNodeDecl> nodes;
    std::vector<RawBranchDecl> branches;
    SourceLoc loc;

    bool operator==(const RawCircuitDecl& o) const {
        return name == o.name && nodes == o.nodes && branches == o.branches;
    }
};

using ElementDecl = std::variant<WallDecl, WindowDecl, ZoneDecl, AirflowDecl, RawCircuitDecl>;

struct ConnectDecl {
    TargetRef a;
    TargetRef b;

    bool operator==(const ConnectDecl&) const = default;
};

struct BindDecl {
    std::string channel;
    TargetRef target;
    double scale = 1.0;

    bool operator==(const BindDecl& o) const {
        return channel == o.channel && target == o.target && scale == o.scale;
    }
};

struct OutputDecl {
    TargetRef target;

    bool operator==(const OutputDecl&) const = default;
};

/// Parsed building description: declarations in source order. Elements keep
/// their interleaved order because it fixes the global numbering of the
/// assembled circuit.
struct BuildingDescription {
    std::vector<MaterialDecl> materials;
    std::vector<WallTypeDecl> wall_types;
    std::vector<WindowTypeDecl> window_types;
    std::vector<ElementDecl> elements;
    std::vector<ConnectDecl> connections;
    std::vector<BindDecl> bindings;
    std::vector<OutputDecl> outputs;

    bool operator==(const BuildingDescription&) const = default;
};

/// Parses and semantically validates a building description file (grammar
/// documented in the README). Unknown keys are rejected; labels are resolved
/// against the instantiated element circuits. Throws ParseError with
/// file/line/column.
BuildingDescription parse_building(const std::string& path);

/// Same parser on an in-memory document (includes resolve relative to
/// `directory`).
BuildingDescription parse_building_text(const std::string& text, const std::string& filename,
                                        const std::string& directory = {});

/// Canonical text form; parse(serialize(d)) == d.
std::string serialize_building(const BuildingDescription& desc);

/// One source binding resolved onto the assembled circuit.
struct ResolvedBinding {
    std::string channel;
    bool is_branch = false;  // temperature source on a branch vs flow at a node
    Index global_index = 0;
    double scale = 1.0;
};

/// The description instantiated and assembled.
struct BuildingModel {
    std::vector<std::string> element_names;
    std::vector<ThermalCircuit> circuits;  // labels qualified as "element.label"
    ConnectionSet connections;
    AssemblyPlan plan;
    ThermalCircuit assembled;
    std::vector<ResolvedBinding> bindings;
    std::vector<std::string> output_display_names;  // per y-flagged node, ascending node id
};

/// Instantiates elements, assembles the global circuit and resolves bindings
/// and outputs. Throws ParseError (unresolved labels, with locations) and
/// the assembly/model errors.
BuildingModel compile_building(const BuildingDescription& desc);

}  // namespace thermnet
