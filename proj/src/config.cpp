#include "thermnet/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace thermnet {

namespace {

struct Token {
    std::string text;
    int column = 0;  // 1-based
};

std::vector<Token> tokenize(const std::string& line) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        if (line[i] == '#') break;  // comment to end of line
        if (line[i] == ' ' || line[i] == '\t' || line[i] == '\r') {
            ++i;
            continue;
        }
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r' &&
               line[i] != '#')
            ++i;
        tokens.push_back({line.substr(start, i - start), static_cast<int>(start) + 1});
    }
    return tokens;
}

class Parser {
public:
    explicit Parser(BuildingDescription& desc) : desc_(desc) {}

    void parse_file(const std::string& path, int depth) {
        std::ifstream in(path);
        if (!in) throw ParseError(path, 0, 0, "cannot open file");
        std::ostringstream buf;
        buf << in.rdbuf();
        parse_text(buf.str(), path, std::filesystem::path(path).parent_path().string(), depth);
    }

    void parse_text(const std::string& text, const std::string& filename,
                    const std::string& directory, int depth) {
        if (depth > 16) throw ParseError(filename, 0, 0, "include nesting too deep");
        const std::string saved_file = file_;
        const std::string saved_dir = dir_;
        const int saved_line = line_;
        file_ = filename;
        dir_ = directory;
        line_ = 0;

        std::istringstream in(text);
        std::string line;
        while (std::getline(in, line)) {
            ++line_;
            const std::vector<Token> tokens = tokenize(line);
            if (tokens.empty()) continue;
            parse_line(tokens, depth);
        }
        if (block_ != Block::None) throw error(1, "unterminated block (missing 'end')");

        file_ = saved_file;
        dir_ = saved_dir;
        line_ = saved_line;
    }

private:
    enum class Block { None, WallType, WindowType, Circuit };

    ParseError error(int column, const std::string& message) const {
        return ParseError(file_, line_, column, message);
    }

    SourceLoc loc(const Token& t) const { return {file_, line_, t.column}; }

    double number(const Token& t) const {
        double value = 0.0;
        const char* first = t.text.data();
        const char* last = first + t.text.size();
        const auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc() || ptr != last)
            throw error(t.column, "expected a number, got '" + t.text + "'");
        return value;
    }

    int integer(const Token& t) const {
        int value = 0;
        const char* first = t.text.data();
        const char* last = first + t.text.size();
        const auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc() || ptr != last)
            throw error(t.column, "expected an integer, got '" + t.text + "'");
        return value;
    }

    std::string name(const Token& t) const {
        if (t.text.empty() || t.text.find_first_of(".=#") != std::string::npos)
            throw error(t.column, "invalid name '" + t.text + "'");
        return t.text;
    }

    /// Splits "key=value"; returns false for bare words.
    static bool split_option(const Token& t, std::string& key, Token& value) {
        const std::size_t eq = t.text.find('=');
        if (eq == std::string::npos) return false;
        key = t.text.substr(0, eq);
        value.text = t.text.substr(eq + 1);
        value.column = t.column + static_cast<int>(eq) + 1;
        return true;
    }

    TargetRef target(const Token& t) const {
        const std::size_t dot = t.text.find('.');
        if (dot == std::string::npos || dot == 0 || dot + 1 == t.text.size())
            throw error(t.column, "expected element.label, got '" + t.text + "'");
        return {t.text.substr(0, dot), t.text.substr(dot + 1), loc(t)};
    }

    [[noreturn]] void unknown_key(const Token& t, const std::string& key) const {
        throw error(t.column, "unknown key '" + key + "'");
    }

    void require_args(const std::vector<Token>& tokens, std::size_t at_least,
                      const char* what) const {
        if (tokens.size() < at_least)
            throw error(tokens.front().column, std::string("expected ") + what);
    }

    void parse_line(const std::vector<Token>& tokens, int depth) {
        const std::string& head = tokens[0].text;
        switch (block_) {
            case Block::WallType: {
                if (head == "end") {
                    block_ = Block::None;
                    return;
                }
                if (head == "layer") {
                    require_args(tokens, 3, "layer <material> d=<m> [slices=<n>]");
                    LayerDecl layer;
                    layer.loc = loc(tokens[0]);
                    layer.material = name(tokens[1]);
                    bool have_d = false;
                    for (std::size_t i = 2; i < tokens.size(); ++i) {
                        std::string key;
                        Token value;
                        if (!split_option(tokens[i], key, value))
                            throw error(tokens[i].column, "expected key=value");
                        if (key == "d") {
                            layer.thickness = number(value);
                            have_d = true;
                        } else if (key == "slices") {
                            layer.slices = integer(value);
                        } else {
                            unknown_key(tokens[i], key);
                        }
                    }
                    if (!have_d) throw error(tokens[0].column, "layer needs d=<thickness>");
                    desc_.wall_types.back().layers.push_back(std::move(layer));
                    return;
                }
                throw error(tokens[0].column,
                            "expected 'layer' or 'end' inside walltype, got '" + head + "'");
            }
            case Block::WindowType: {
                if (head == "end") {
                    block_ = Block::None;
                    return;
                }
                if (head == "tau") {
                    require_args(tokens, 3, "tau <incidence-deg> <transmittance>");
                    TransmittanceSample sample{number(tokens[1]), number(tokens[2])};
                    auto& table = desc_.window_types.back().transmittance;
                    if (!table.empty() && sample.incidence_deg <= table.back().incidence_deg)
                        throw error(tokens[1].column, "tau samples must have increasing angles");
                    table.push_back(sample);
                    return;
                }
                throw error(tokens[0].column,
                            "expected 'tau' or 'end' inside windowtype, got '" + head + "'");
            }
            case Block::Circuit: {
                auto& circuit = std::get<RawCircuitDecl>(desc_.elements.back());
                if (head == "end") {
                    block_ = Block::None;
                    return;
                }
                if (head == "node") {
                    require_args(tokens, 2, "node <name> [capacity=<J/K>] [flow] [output]");
                    RawNodeDecl node;
                    node.loc = loc(tokens[0]);
                    node.name = name(tokens[1]);
                    for (std::size_t i = 2; i < tokens.size(); ++i) {
                        std::string key;
                        Token value;
                        if (split_option(tokens[i], key, value)) {
                            if (key == "capacity") node.capacity = number(value);
                            else unknown_key(tokens[i], key);
                        } else if (tokens[i].text == "flow") {
                            node.flow_source = true;
                        } else if (tokens[i].text == "output") {
                            node.output = true;
                        } else {
                            throw error(tokens[i].column,
                                        "unknown node attribute '" + tokens[i].text + "'");
                        }
                    }
                    for (const auto& existing : circuit.nodes)
                        if (existing.name == node.name)
                            throw error(tokens[1].column, "duplicate node '" + node.name + "'");
                    circuit.nodes.push_back(std::move(node));
                    return;
                }
                if (head == "branch") {
                    require_args(tokens, 5, "branch <name> <from> <to> g=<W/K> [temp]");
                    RawBranchDecl branch;
                    branch.loc = loc(tokens[0]);
                    branch.name = name(tokens[1]);
                    branch.from = name(tokens[2]);
                    branch.to = name(tokens[3]);
                    bool have_g = false;
                    for (std::size_t i = 4; i < tokens.size(); ++i) {
                        std::string key;
                        Token value;
                        if (split_option(tokens[i], key, value)) {
                            if (key == "g") {
                                branch.conductance = number(value);
                                have_g = true;
                            } else {
                                unknown_key(tokens[i], key);
                            }
                        } else if (tokens[i].text == "temp") {
                            branch.temp_source = true;
                        } else {
                            throw error(tokens[i].column,
                                        "unknown branch attribute '" + tokens[i].text + "'");
                        }
                    }
                    if (!have_g) throw error(tokens[0].column, "branch needs g=<conductance>");
                    if (branch.from == "ref" && branch.to == "ref")
                        throw error(tokens[2].column, "branch cannot join ref to ref");
                    if (branch.from == branch.to)
                        throw error(tokens[2].column, "branch endpoints must differ");
                    for (const auto& existing : circuit.branches)
                        if (existing.name == branch.name)
                            throw error(tokens[1].column,
                                        "duplicate branch '" + branch.name + "'");
                    circuit.branches.push_back(std::move(branch));
                    return;
                }
                throw error(tokens[0].column,
                            "expected 'node', 'branch' or 'end' inside circuit, got '" + head +
                                "'");
            }
            case Block::None: break;
        }

        if (head == "include") {
            require_args(tokens, 2, "include <path>");
            std::filesystem::path p(tokens[1].text);
            if (p.is_relative() && !dir_.empty()) p = std::filesystem::path(dir_) / p;
            parse_file(p.string(), depth + 1);
            return;
        }
        if (head == "material") {
            require_args(tokens, 5, "material <name> k=<W/mK> rho=<kg/m3> cp=<J/kgK>");
            MaterialDecl m;
            m.loc = loc(tokens[0]);
            m.name = name(tokens[1]);
            bool have_k = false, have_rho = false, have_cp = false;
            for (std::size_t i = 2; i < tokens.size(); ++i) {
                std::string key;
                Token value;
                if (!split_option(tokens[i], key, value))
                    throw error(tokens[i].column, "expected key=value");
                if (key == "k") {
                    m.material.conductivity = number(value);
                    have_k = true;
                } else if (key == "rho") {
                    m.material.density = number(value);
                    have_rho = true;
                } else if (key == "cp") {
                    m.material.specific_heat = number(value);
                    have_cp = true;
                } else {
                    unknown_key(tokens[i], key);
                }
            }
            if (!have_k || !have_rho || !have_cp)
                throw error(tokens[0].column, "material needs k=, rho= and cp=");
            desc_.materials.push_back(std::move(m));
            return;
        }
        if (head == "walltype") {
            require_args(tokens, 2, "walltype <name> [absorptance=] [emissivity=]");
            WallTypeDecl wt;
            wt.loc = loc(tokens[0]);
            wt.name = name(tokens[1]);
            for (std::size_t i = 2; i < tokens.size(); ++i) {
                std::string key;
                Token value;
                if (!split_option(tokens[i], key, value))
                    throw error(tokens[i].column, "expected key=value");
                if (key == "absorptance") wt.absorptance = number(value);
                else if (key == "emissivity") wt.emissivity = number(value);
                else unknown_key(tokens[i], key);
            }
            desc_.wall_types.push_back(std::move(wt));
            block_ = Block::WallType;
            return;
        }
        if (head == "windowtype") {
            require_args(tokens, 4, "windowtype <name> overall=<m2> glass=<m2>");
            WindowTypeDecl wt;
            wt.loc = loc(tokens[0]);
            wt.name = name(tokens[1]);
            bool have_overall = false, have_glass = false;
            for (std::size_t i = 2; i < tokens.size(); ++i) {
                std::string key;
                Token value;
                if (!split_option(tokens[i], key, value))
                    throw error(tokens[i].column, "expected key=value");
                if (key == "overall") {
                    wt.overall_area = number(value);
                    have_overall = true;
                } else if (key == "glass") {
                    wt.glass_area = number(value);
                    have_glass = true;
                } else {
                    unknown_key(tokens[i], key);
                }
            }
            if (!have_overall || !have_glass)
                throw error(tokens[0].column, "windowtype needs overall= and glass=");
            desc_.window_types.push_back(std::move(wt));
            block_ = Block::WindowType;
            return;
        }
        if (head == "wall") {
            require_args(tokens, 4, "wall <name> type=<walltype> area=<m2>");
            WallDecl w;
            w.loc = loc(tokens[0]);
            w.name = name(tokens[1]);
            bool have_type = false, have_area = false;
            for (std::size_t i = 2; i < tokens.size(); ++i) {
                std::string key;
                Token value;
                if (!split_option(tokens[i], key, value))
                    throw error(tokens[i].column, "expected key=value");
                if (key == "type") {
                    w.type = name(value);
                    have_type = true;
                } else if (key == "area") {
                    w.area = number(value);
                    have_area = true;
                } else if (key == "h_out") {
                    w.outside_film = number(value);
                } else if (key == "h_in") {
                    w.inside_film = number(value);
                } else if (key == "absorptance") {
                    w.absorptance = number(value);
                } else if (key == "emissivity") {
                    w.emissivity = number(value);
                } else if (key == "slices") {
                    w.slices = integer(value);
                } else {
                    unknown_key(tokens[i], key);
                }
            }
            if (!have_type || !have_area)
                throw error(tokens[0].column, "wall needs type= and area=");
            desc_.elements.emplace_back(std::move(w));
            return;
        }
        if (head == "window") {
            require_args(tokens, 4, "window <name> type=<windowtype> u=<W/m2K>");
            WindowDecl w;
            w.loc = loc(tokens[0]);
            w.name = name(tokens[1]);
            bool have_type = false, have_u = false;
            for (std::size_t i = 2; i < tokens.size(); ++i) {
                std::string key;
                Token value;
                if (!split_option(tokens[i], key, value))
                    throw error(tokens[i].column, "expected key=value");
                if (key == "type") {
                    w.type = name(value);
                    have_type = true;
                } else if (key == "u") {
                    w.u_value = number(value);
                    have_u = true;
                } else if (key == "h_out") {
                    w.outside_film = number(value);
                } else if (key == "h_in") {
                    w.inside_film = number(value);
                } else {
                    unknown_key(tokens[i], key);
                }
            }
            if (!have_type || !have_u) throw error(tokens[0].column, "window needs type= and u=");
            desc_.elements.emplace_back(std::move(w));
            return;
        }
        if (head == "zone") {
            require_args(tokens, 3, "zone <name> volume=<m3>");
            ZoneDecl z;
            z.loc = loc(tokens[0]);
            z.name = name(tokens[1]);
            bool have_volume = false;
            for (std::size_t i = 2; i < tokens.size(); ++i) {
                std::string key;
                Token value;
                if (!split_option(tokens[i], key, value))
                    throw error(tokens[i].column, "expected key=value");
                if (key == "volume") {
                    z.volume = number(value);
                    have_volume = true;
                } else {
                    unknown_key(tokens[i], key);
                }
            }
            if (!have_volume) throw error(tokens[0].column, "zone needs volume=");
            desc_.elements.emplace_back(std::move(z));
            return;
        }
        if (head == "airflow") {
            require_args(tokens, 3, "airflow <name> (flow=<m3/h> | ach=<1/h> volume=<m3>)");
            AirflowDecl a;
            a.loc = loc(tokens[0]);
            a.name = name(tokens[1]);
            for (std::size_t i = 2; i < tokens.size(); ++i) {
                std::string key;
                Token value;
                if (!split_option(tokens[i], key, value))
                    throw error(tokens[i].column, "expected key=value");
                if (key == "flow") a.flow_m3_per_h = number(value);
                else if (key == "ach") a.air_changes_per_h = number(value);
                else if (key == "volume") a.zone_volume = number(value);
                else unknown_key(tokens[i], key);
            }
            if (!a.flow_m3_per_h && !a.air_changes_per_h)
                throw error(tokens[0].column, "airflow needs flow= or ach=");
            if (a.air_changes_per_h && !a.zone_volume)
                throw error(tokens[0].column, "airflow with ach= needs volume=");
            desc_.elements.emplace_back(std::move(a));
            return;
        }
        if (head == "circuit") {
            require_args(tokens, 2, "circuit <name>");
            if (tokens.size() > 2) throw error(tokens[2].column, "unexpected token after name");
            RawCircuitDecl c;
            c.loc = loc(tokens[0]);
            c.name = name(tokens[1]);
            desc_.elements.emplace_back(std::move(c));
            block_ = Block::Circuit;
            return;
        }
        if (head == "connect") {
            require_args(tokens, 3, "connect <element.node> <element.node>");
            if (tokens.size() > 3) throw error(tokens[3].column, "unexpected token");
            desc_.connections.push_back({target(tokens[1]), target(tokens[2])});
            return;
        }
        if (head == "bind") {
            require_args(tokens, 3, "bind <channel> <element.label> [scale=<x>]");
            BindDecl b;
            if (tokens[1].text.empty() || tokens[1].text.find_first_of("=#") != std::string::npos)
                throw error(tokens[1].column, "invalid channel name");
            b.channel = tokens[1].text;
            b.target = target(tokens[2]);
            for (std::size_t i = 3; i < tokens.size(); ++i) {
                std::string key;
                Token value;
                if (!split_option(tokens[i], key, value))
                    throw error(tokens[i].column, "expected key=value");
                if (key == "scale") b.scale = number(value);
                else unknown_key(tokens[i], key);
            }
            desc_.bindings.push_back(std::move(b));
            return;
        }
        if (head == "output") {
            require_args(tokens, 2, "output <element.node>");
            if (tokens.size() > 2) throw error(tokens[2].column, "unexpected token");
            desc_.outputs.push_back({target(tokens[1])});
            return;
        }
        if (head == "end") throw error(tokens[0].column, "'end' without an open block");
        throw error(tokens[0].column, "unknown declaration '" + head + "'");
    }

    BuildingDescription& desc_;
    std::string file_;
    std::string dir_;
    int line_ = 0;
    Block block_ = Block::None;
};

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

BuildingDescription parse_building_text(const std::string& text, const std::string& filename,
                                        const std::string& directory) {
    BuildingDescription desc;
    Parser parser(desc);
    parser.parse_text(text, filename, directory, 0);
    if (desc.elements.empty()) throw ParseError(filename, 0, 0, "no circuits declared");
    compile_building(desc);  // surface unresolved labels and model defects now
    return desc;
}

BuildingDescription parse_building(const std::string& path) {
    BuildingDescription desc;
    Parser parser(desc);
    parser.parse_file(path, 0);
    if (desc.elements.empty()) throw ParseError(path, 0, 0, "no circuits declared");
    compile_building(desc);
    return desc;
}

std::string serialize_building(const BuildingDescription& desc) {
    std::ostringstream out;
    for (const auto& m : desc.materials)
        out << "material " << m.name << " k=" << format_double(m.material.conductivity)
            << " rho=" << format_double(m.material.density)
            << " cp=" << format_double(m.material.specific_heat) << "\n";
    for (const auto& wt : desc.wall_types) {
        out << "walltype " << wt.name << " absorptance=" << format_double(wt.absorptance)
            << " emissivity=" << format_double(wt.emissivity) << "\n";
        for (const auto& layer : wt.layers) {
            out << "  layer " << layer.material << " d=" << format_double(layer.thickness)
                << " slices=" << layer.slices << "\n";
        }
        out << "end\n";
    }
    for (const auto& wt : desc.window_types) {
        out << "windowtype " << wt.name << " overall=" << format_double(wt.overall_area)
            << " glass=" << format_double(wt.glass_area) << "\n";
        for (const auto& s : wt.transmittance)
            out << "  tau " << format_double(s.incidence_deg) << " "
                << format_double(s.transmittance) << "\n";
        out << "end\n";
    }
    for (const auto& element : desc.elements) {
        std::visit(
            [&](const auto& e) {
                using T = std::decay_t<decltype(e)>;
                if constexpr (std::is_same_v<T, WallDecl>) {
                    out << "wall " << e.name << " type=" << e.type
                        << " area=" << format_double(e.area);
                    if (e.outside_film) out << " h_out=" << format_double(*e.outside_film);
                    if (e.inside_film) out << " h_in=" << format_double(*e.inside_film);
                    if (e.absorptance) out << " absorptance=" << format_double(*e.absorptance);
                    if (e.emissivity) out << " emissivity=" << format_double(*e.emissivity);
                    if (e.slices) out << " slices=" << *e.slices;
                    out << "\n";
                } else if constexpr (std::is_same_v<T, WindowDecl>) {
                    out << "window " << e.name << " type=" << e.type
                        << " u=" << format_double(e.u_value);
                    if (e.outside_film) out << " h_out=" << format_double(*e.outside_film);
                    if (e.inside_film) out << " h_in=" << format_double(*e.inside_film);
                    out << "\n";
                } else if constexpr (std::is_same_v<T, ZoneDecl>) {
                    out << "zone " << e.name << " volume=" << format_double(e.volume) << "\n";
                } else if constexpr (std::is_same_v<T, AirflowDecl>) {
                    out << "airflow " << e.name;
                    if (e.flow_m3_per_h) out << " flow=" << format_double(*e.flow_m3_per_h);
                    if (e.air_changes_per_h) out << " ach=" << format_double(*e.air_changes_per_h);
                    if (e.zone_volume) out << " volume=" << format_double(*e.zone_volume);
                    out << "\n";
                } else if constexpr (std::is_same_v<T, RawCircuitDecl>) {
                    out << "circuit " << e.name << "\n";
                    for (const auto& n : e.nodes) {
                        out << "  node " << n.name << " capacity=" << format_double(n.capacity);
                        if (n.flow_source) out << " flow";
                        if (n.output) out << " output";
                        out << "\n";
                    }
                    for (const auto& b : e.branches) {
                        out << "  branch " << b.name << " " << b.from << " " << b.to
                            << " g=" << format_double(b.conductance);
                        if (b.temp_source) out << " temp";
                        out << "\n";
                    }
                    out << "end\n";
                }
            },
            element);
    }
    for (const auto& c : desc.connections)
        out << "connect " << c.a.text() << " " << c.b.text() << "\n";
    for (const auto& b : desc.bindings) {
        out << "bind " << b.channel << " " << b.target.text();
        if (b.scale != 1.0) out << " scale=" << format_double(b.scale);
        out << "\n";
    }
    for (const auto& o : desc.outputs) out << "output " << o.target.text() << "\n";
    return out.str();
}

namespace {

[[noreturn]] void unresolved(const TargetRef& ref, const std::string& what) {
    throw ParseError(ref.loc.file, ref.loc.line, ref.loc.column,
                     "unresolved " + what + " '" + ref.text() + "'");
}

}  // namespace

BuildingModel compile_building(const BuildingDescription& desc) {
    std::map<std::string, Material> materials;
    for (const auto& m : desc.materials)
        if (!materials.emplace(m.name, m.material).second)
            throw ParseError(m.loc.file, m.loc.line, m.loc.column,
                             "duplicate material '" + m.name + "'");
    std::map<std::string, const WallTypeDecl*> wall_types;
    for (const auto& wt : desc.wall_types) {
        if (!wall_types.emplace(wt.name, &wt).second)
            throw ParseError(wt.loc.file, wt.loc.line, wt.loc.column,
                             "duplicate walltype '" + wt.name + "'");
        if (wt.layers.empty())
            throw ParseError(wt.loc.file, wt.loc.line, wt.loc.column,
                             "walltype '" + wt.name + "' has no layers");
    }
    std::map<std::string, const WindowTypeDecl*> window_types;
    for (const auto& wt : desc.window_types)
        if (!window_types.emplace(wt.name, &wt).second)
            throw ParseError(wt.loc.file, wt.loc.line, wt.loc.column,
                             "duplicate windowtype '" + wt.name + "'");

    BuildingModel model;
    std::map<std::string, Index> element_index;

    auto add_element = [&](const std::string& name, const SourceLoc& loc, ThermalCircuit tc) {
        if (!element_index.emplace(name, static_cast<Index>(model.circuits.size())).second)
            throw ParseError(loc.file, loc.line, loc.column, "duplicate element '" + name + "'");
        model.element_names.push_back(name);
        model.circuits.push_back(std::move(tc));
    };

    for (const auto& element : desc.elements) {
        std::visit(
            [&](const auto& e) {
                using T = std::decay_t<decltype(e)>;
                try {
                    if constexpr (std::is_same_v<T, WallDecl>) {
                        const auto type_it = wall_types.find(e.type);
                        if (type_it == wall_types.end())
                            throw ParseError(e.loc.file, e.loc.line, e.loc.column,
                                             "unknown walltype '" + e.type + "'");
                        WallSpec spec;
                        spec.area = e.area;
                        spec.absorptance = e.absorptance.value_or(type_it->second->absorptance);
                        spec.emissivity = e.emissivity.value_or(type_it->second->emissivity);
                        if (e.outside_film) spec.outside_film = *e.outside_film;
                        if (e.inside_film) spec.inside_film = *e.inside_film;
                        for (const auto& layer : type_it->second->layers) {
                            const auto mat_it = materials.find(layer.material);
                            if (mat_it == materials.end())
                                throw ParseError(layer.loc.file, layer.loc.line, layer.loc.column,
                                                 "unknown material '" + layer.material + "'");
                            spec.layers.push_back({mat_it->second, layer.thickness,
                                                   e.slices.value_or(layer.slices)});
                        }
                        add_element(e.name, e.loc, wall_circuit(spec));
                    } else if constexpr (std::is_same_v<T, WindowDecl>) {
                        const auto type_it = window_types.find(e.type);
                        if (type_it == window_types.end())
                            throw ParseError(e.loc.file, e.loc.line, e.loc.column,
                                             "unknown windowtype '" + e.type + "'");
                        WindowSpec spec;
                        spec.overall_area = type_it->second->overall_area;
                        spec.glass_area = type_it->second->glass_area;
                        spec.u_value = e.u_value;
                        spec.transmittance = type_it->second->transmittance;
                        if (e.outside_film) spec.outside_film = *e.outside_film;
                        if (e.inside_film) spec.inside_film = *e.inside_film;
                        add_element(e.name, e.loc, window_circuit(spec));
                    } else if constexpr (std::is_same_v<T, ZoneDecl>) {
                        add_element(e.name, e.loc, zone_air_circuit(e.volume));
                    } else if constexpr (std::is_same_v<T, AirflowDecl>) {
                        AirflowSpec spec;
                        spec.flow_m3_per_h = e.flow_m3_per_h.value_or(0.0);
                        spec.air_changes_per_h = e.air_changes_per_h.value_or(0.0);
                        spec.zone_volume = e.zone_volume.value_or(0.0);
                        add_element(e.name, e.loc, airflow_circuit(spec));
                    } else if constexpr (std::is_same_v<T, RawCircuitDecl>) {
                        if (e.nodes.empty())
                            throw ParseError(e.loc.file, e.loc.line, e.loc.column,
                                             "circuit '" + e.name + "' has no nodes");
                        ThermalCircuit tc = ThermalCircuit::with_shape(
                            static_cast<Index>(e.branches.size()),
                            static_cast<Index>(e.nodes.size()));
                        std::map<std::string, Index> node_of;
                        for (std::size_t j = 0; j < e.nodes.size(); ++j) {
                            const auto& n = e.nodes[j];
                            node_of[n.name] = static_cast<Index>(j);
                            tc.node_labels[j] = n.name;
                            tc.capacities[static_cast<Index>(j)] = n.capacity;
                            tc.flow_source_flags[static_cast<Index>(j)] = n.flow_source ? 1 : 0;
                            tc.output_flags[static_cast<Index>(j)] = n.output ? 1 : 0;
                        }
                        for (std::size_t i = 0; i < e.branches.size(); ++i) {
                            const auto& b = e.branches[i];
                            tc.branch_labels[i] = b.name;
                            tc.conductances[static_cast<Index>(i)] = b.conductance;
                            tc.temp_source_flags[static_cast<Index>(i)] = b.temp_source ? 1 : 0;
                            auto endpoint = [&](const std::string& node_name, int sign) {
                                if (node_name == "ref") return;
                                const auto it = node_of.find(node_name);
                                if (it == node_of.end())
                                    throw ParseError(b.loc.file, b.loc.line, b.loc.column,
                                                     "unresolved node '" + node_name +
                                                         "' in circuit '" + e.name + "'");
                                tc.incidence(static_cast<Index>(i), it->second) = sign;
                            };
                            endpoint(b.from, -1);
                            endpoint(b.to, +1);
                        }
                        const ValidationReport report = validate(tc);
                        if (!report.ok())
                            throw ParseError(e.loc.file, e.loc.line, e.loc.column,
                                             "invalid circuit '" + e.name + "':\n" +
                                                 report.summary());
                        add_element(e.name, e.loc, std::move(tc));
                    }
                } catch (const ParseError&) {
                    throw;
                } catch (const Error& err) {
                    throw ParseError(e.loc.file, e.loc.line, e.loc.column, err.what());
                }
            },
            element);
    }
    if (model.circuits.empty()) throw ParseError("", 0, 0, "no circuits declared");

    auto find_element = [&](const TargetRef& ref) {
        const auto it = element_index.find(ref.element);
        if (it == element_index.end()) unresolved(ref, "element");
        return it->second;
    };
    auto find_node = [&](const TargetRef& ref) {
        const Index ci = find_element(ref);
        const auto& labels = model.circuits[static_cast<std::size_t>(ci)].node_labels;
        const auto it = std::find(labels.begin(), labels.end(), ref.label);
        if (it == labels.end()) unresolved(ref, "node label");
        return NodeRef{ci, static_cast<Index>(it - labels.begin())};
    };

    for (const auto& c : desc.connections)
        model.connections.pairs.push_back({find_node(c.a), find_node(c.b)});

    // Resolve binding and output targets against local labels before
    // qualifying them.
    struct PendingBinding {
        std::string channel;
        bool is_branch;
        NodeRef where;  // node ref, or (circuit, branch) when is_branch
        double scale;
        TargetRef ref;
    };
    std::vector<PendingBinding> pending;
    for (const auto& b : desc.bindings) {
        const Index ci = find_element(b.target);
        const auto& circuit = model.circuits[static_cast<std::size_t>(ci)];
        const auto branch_it =
            std::find(circuit.branch_labels.begin(), circuit.branch_labels.end(), b.target.label);
        if (branch_it != circuit.branch_labels.end()) {
            const Index bi = static_cast<Index>(branch_it - circuit.branch_labels.begin());
            if (circuit.temp_source_flags[bi] == 0)
                throw ParseError(b.target.loc.file, b.target.loc.line, b.target.loc.column,
                                 "branch '" + b.target.text() +
                                     "' carries no temperature-source flag");
            pending.push_back({b.channel, true, {ci, bi}, b.scale, b.target});
            continue;
        }
        const auto node_it =
            std::find(circuit.node_labels.begin(), circuit.node_labels.end(), b.target.label);
        if (node_it == circuit.node_labels.end()) unresolved(b.target, "source label");
        const Index ni = static_cast<Index>(node_it - circuit.node_labels.begin());
        pending.push_back({b.channel, false, {ci, ni}, b.scale, b.target});
    }
    std::vector<std::pair<NodeRef, TargetRef>> pending_outputs;
    for (const auto& o : desc.outputs) pending_outputs.push_back({find_node(o.target), o.target});

    model.plan = plan_assembly(model.circuits, model.connections);

    // Qualify labels so the assembled circuit reads element.label everywhere.
    for (std::size_t c = 0; c < model.circuits.size(); ++c) {
        auto& tc = model.circuits[c];
        for (auto& label : tc.branch_labels) label = model.element_names[c] + "." + label;
        for (auto& label : tc.node_labels) label = model.element_names[c] + "." + label;
    }
    model.assembled = assemble(model.circuits, model.connections);

    // Output declarations OR into the assembled output flags.
    for (const auto& [where, ref] : pending_outputs) {
        const Index global =
            model.plan.node_map[static_cast<std::size_t>(where.circuit)]
                               [static_cast<std::size_t>(where.node)];
        model.assembled.output_flags[global] = 1;
    }

    for (const auto& p : pending) {
        ResolvedBinding rb;
        rb.channel = p.channel;
        rb.scale = p.scale;
        rb.is_branch = p.is_branch;
        if (p.is_branch) {
            rb.global_index = model.plan.branch_map[static_cast<std::size_t>(p.where.circuit)]
                                                   [static_cast<std::size_t>(p.where.node)];
            for (const auto& other : model.bindings)
                if (other.is_branch && other.global_index == rb.global_index)
                    throw ParseError(p.ref.loc.file, p.ref.loc.line, p.ref.loc.column,
                                     "temperature source '" + p.ref.text() +
                                         "' is bound more than once");
        } else {
            rb.global_index = model.plan.node_map[static_cast<std::size_t>(p.where.circuit)]
                                                 [static_cast<std::size_t>(p.where.node)];
            if (model.assembled.flow_source_flags[rb.global_index] == 0)
                throw ParseError(p.ref.loc.file, p.ref.loc.line, p.ref.loc.column,
                                 "node '" + p.ref.text() + "' carries no flow-source flag");
        }
        model.bindings.push_back(std::move(rb));
    }

    // Human-readable output column names: prefer the declared output target,
    // then the label of a member that set the flag itself.
    for (Index g = 0; g < model.assembled.node_count(); ++g) {
        if (model.assembled.output_flags[g] == 0) continue;
        std::string display;
        for (const auto& [where, ref] : pending_outputs) {
            const Index global =
                model.plan.node_map[static_cast<std::size_t>(where.circuit)]
                                   [static_cast<std::size_t>(where.node)];
            if (global == g) {
                display = ref.text();
                break;
            }
        }
        if (display.empty()) {
            for (const auto& member : model.plan.merge_classes[static_cast<std::size_t>(g)]) {
                const auto& tc = model.circuits[static_cast<std::size_t>(member.circuit)];
                if (tc.output_flags[member.node] != 0) {
                    display = tc.node_labels[static_cast<std::size_t>(member.node)];
                    break;
                }
            }
        }
        if (display.empty())
            display = model.assembled.node_labels[static_cast<std::size_t>(g)];
        model.output_display_names.push_back(display);
    }
    return model;
}

}  // namespace thermnet
