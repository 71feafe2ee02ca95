#include "fivebar/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "fivebar/errors.hpp"

namespace fivebar {

namespace {

template <typename T>
void read_optional(const Json& j, const char* key, T& target) {
    if (j.contains(key)) j.at(key).get_to(target);
}

const char* assembly_name(Assembly a) { return a == Assembly::left ? "left" : "right"; }

Assembly parse_assembly(const std::string& name) {
    if (name == "left") return Assembly::left;
    if (name == "right") return Assembly::right;
    throw InputError("assembly must be \"left\" or \"right\", got \"" + name + "\"");
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        out.push_back(line.substr(start, comma == std::string_view::npos ? comma : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

}  // namespace

void to_json(Json& j, const Point& v) { j = Json{{"x", v.x}, {"y", v.y}}; }
void from_json(const Json& j, Point& v) {
    j.at("x").get_to(v.x);
    j.at("y").get_to(v.y);
}

void to_json(Json& j, const MechanismDims& v) {
    j = Json{{"p", v.p},
             {"q", v.q},
             {"r", v.r},
             {"s", v.s},
             {"cv_ground", v.cv_ground},
             {"servo_ground", v.servo_ground}};
}
void from_json(const Json& j, MechanismDims& v) {
    j.at("p").get_to(v.p);
    j.at("q").get_to(v.q);
    j.at("r").get_to(v.r);
    j.at("s").get_to(v.s);
    j.at("cv_ground").get_to(v.cv_ground);
    j.at("servo_ground").get_to(v.servo_ground);
    v.validate();
}

void to_json(Json& j, const TaskSpec& v) {
    Json samples = Json::array();
    for (const TaskSample& s : v.samples) {
        samples.push_back(Json{{"theta2", s.theta2}, {"desired", s.desired}});
    }
    j = Json{{"samples", std::move(samples)}, {"cv_speed", v.cv_speed}};
}
void from_json(const Json& j, TaskSpec& v) {
    v.samples.clear();
    for (const Json& s : j.at("samples")) {
        TaskSample sample;
        s.at("theta2").get_to(sample.theta2);
        s.at("desired").get_to(sample.desired);
        v.samples.push_back(sample);
    }
    j.at("cv_speed").get_to(v.cv_speed);
    v.validate();
}

void to_json(Json& j, const ObjectiveWeights& v) {
    j = Json{{"error", v.error}, {"mobility", v.mobility}, {"swept", v.swept}, {"harmonic", v.harmonic}};
}
void from_json(const Json& j, ObjectiveWeights& v) {
    read_optional(j, "error", v.error);
    read_optional(j, "mobility", v.mobility);
    read_optional(j, "swept", v.swept);
    read_optional(j, "harmonic", v.harmonic);
    v.validate();
}

void to_json(Json& j, const ObjectiveBreakdown& v) {
    j = Json{{"error", v.error},
             {"harmonic", v.harmonic},
             {"swept", v.swept},
             {"mobility", v.mobility},
             {"total", v.total}};
}
void from_json(const Json& j, ObjectiveBreakdown& v) {
    j.at("error").get_to(v.error);
    j.at("harmonic").get_to(v.harmonic);
    j.at("swept").get_to(v.swept);
    j.at("mobility").get_to(v.mobility);
    j.at("total").get_to(v.total);
}

void to_json(Json& j, const GAConfig& v) {
    j = Json{{"population_size", v.population_size},
             {"crossover_rate", v.crossover_rate},
             {"mutation_rate", v.mutation_rate},
             {"generations", v.generations},
             {"rng_seed", v.rng_seed},
             {"bits_per_gene", v.bits_per_gene},
             {"scaling_multiple", v.scaling_multiple}};
}
void from_json(const Json& j, GAConfig& v) {
    read_optional(j, "population_size", v.population_size);
    read_optional(j, "crossover_rate", v.crossover_rate);
    read_optional(j, "mutation_rate", v.mutation_rate);
    read_optional(j, "generations", v.generations);
    read_optional(j, "rng_seed", v.rng_seed);
    read_optional(j, "bits_per_gene", v.bits_per_gene);
    read_optional(j, "scaling_multiple", v.scaling_multiple);
    v.validate();
}

void to_json(Json& j, const GeneRange& v) { j = Json::array({v.lower, v.upper}); }
void from_json(const Json& j, GeneRange& v) {
    if (!j.is_array() || j.size() != 2) throw InputError("gene range must be [lower, upper]");
    j.at(0).get_to(v.lower);
    j.at(1).get_to(v.upper);
}

void to_json(Json& j, const DesignBounds& v) {
    j = Json{{"p", v.p},
             {"q", v.q},
             {"r", v.r},
             {"s", v.s},
             {"servo_x", v.servo_x},
             {"servo_y", v.servo_y},
             {"cv_x", v.cv_x},
             {"cv_y", v.cv_y},
             {"cv_fixed", v.cv_fixed},
             {"cv_fixed_at", v.cv_fixed_at}};
}
void from_json(const Json& j, DesignBounds& v) {
    read_optional(j, "p", v.p);
    read_optional(j, "q", v.q);
    read_optional(j, "r", v.r);
    read_optional(j, "s", v.s);
    read_optional(j, "servo_x", v.servo_x);
    read_optional(j, "servo_y", v.servo_y);
    read_optional(j, "cv_x", v.cv_x);
    read_optional(j, "cv_y", v.cv_y);
    read_optional(j, "cv_fixed", v.cv_fixed);
    read_optional(j, "cv_fixed_at", v.cv_fixed_at);
    v.validate();
}

void to_json(Json& j, const DescentConfig& v) {
    j = Json{{"fd_step", v.fd_step},
             {"initial_rate", v.initial_rate},
             {"min_rate", v.min_rate},
             {"relative_tolerance", v.relative_tolerance},
             {"max_iterations", v.max_iterations}};
}
void from_json(const Json& j, DescentConfig& v) {
    read_optional(j, "fd_step", v.fd_step);
    read_optional(j, "initial_rate", v.initial_rate);
    read_optional(j, "min_rate", v.min_rate);
    read_optional(j, "relative_tolerance", v.relative_tolerance);
    read_optional(j, "max_iterations", v.max_iterations);
}

void to_json(Json& j, const SynthesisResult& v) {
    j = Json{{"best_dims", v.best_dims},
             {"best", v.best},
             {"history", v.history},
             {"refined_dims", v.refined_dims},
             {"refined", v.refined},
             {"refine_iterations", v.refine_iterations}};
}
void from_json(const Json& j, SynthesisResult& v) {
    j.at("best_dims").get_to(v.best_dims);
    j.at("best").get_to(v.best);
    j.at("history").get_to(v.history);
    j.at("refined_dims").get_to(v.refined_dims);
    j.at("refined").get_to(v.refined);
    read_optional(j, "refine_iterations", v.refine_iterations);
}

void to_json(Json& j, const InertialParams& v) {
    j = Json{{"mass_per_length", v.mass_per_length},
             {"effector_mass", v.effector_mass},
             {"gravity", v.gravity}};
}
void from_json(const Json& j, InertialParams& v) {
    read_optional(j, "mass_per_length", v.mass_per_length);
    read_optional(j, "effector_mass", v.effector_mass);
    read_optional(j, "gravity", v.gravity);
    v.validate();
}

void to_json(Json& j, const AxisPlant& v) {
    j = Json{{"amplifier_gain", v.amplifier_gain},
             {"rotor_inertia", v.rotor_inertia},
             {"viscous_friction", v.viscous_friction}};
}
void from_json(const Json& j, AxisPlant& v) {
    read_optional(j, "amplifier_gain", v.amplifier_gain);
    read_optional(j, "rotor_inertia", v.rotor_inertia);
    read_optional(j, "viscous_friction", v.viscous_friction);
}

void to_json(Json& j, const PlantConfig& v) {
    j = Json{{"cv", v.cv},
             {"servo", v.servo},
             {"linkage", v.linkage},
             {"sample_period", v.sample_period},
             {"resolution", v.resolution},
             {"cv_demand_cps", v.cv_demand_cps},
             {"assembly", assembly_name(v.assembly)},
             {"coupled", v.coupled}};
}
void from_json(const Json& j, PlantConfig& v) {
    read_optional(j, "cv", v.cv);
    read_optional(j, "servo", v.servo);
    read_optional(j, "linkage", v.linkage);
    read_optional(j, "sample_period", v.sample_period);
    read_optional(j, "resolution", v.resolution);
    read_optional(j, "cv_demand_cps", v.cv_demand_cps);
    if (j.contains("assembly")) v.assembly = parse_assembly(j.at("assembly").get<std::string>());
    read_optional(j, "coupled", v.coupled);
    v.validate();
}

void to_json(Json& j, const ControllerGains& v) {
    j = Json{{"K_P", v.kp}, {"K_I", v.ki}, {"K_D", v.kd},
             {"K_V", v.kv}, {"K_F", v.kf}, {"divisor", v.divisor}};
}
void from_json(const Json& j, ControllerGains& v) {
    read_optional(j, "K_P", v.kp);
    read_optional(j, "K_I", v.ki);
    read_optional(j, "K_D", v.kd);
    read_optional(j, "K_V", v.kv);
    read_optional(j, "K_F", v.kf);
    read_optional(j, "divisor", v.divisor);
    v.validate();
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

Json read_json_file(const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw InputError("failed writing " + path.string());
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

std::string format_number(double value) {
    char buf[64];
    const auto result = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, result.ptr);
}

std::string to_csv(const CsvTable& table) {
    std::string out;
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        if (i) out += ',';
        out += table.header[i];
    }
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += format_number(row[i]);
        }
        out += '\n';
    }
    return out;
}

CsvTable parse_csv(std::string_view text, std::span<const std::string> expected_header) {
    CsvTable table;
    table.header.assign(expected_header.begin(), expected_header.end());
    std::size_t line_no = 0;
    std::size_t pos = 0;
    bool header_seen = false;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;

        const auto fields = split_fields(line);
        if (!header_seen) {
            header_seen = true;
            bool matches = fields.size() == expected_header.size();
            for (std::size_t i = 0; matches && i < fields.size(); ++i) {
                matches = fields[i] == expected_header[i];
            }
            if (!matches) throw InputError("unexpected CSV header: " + std::string(line));
            continue;
        }
        if (fields.size() != expected_header.size()) {
            throw InputError("CSV line " + std::to_string(line_no) + " has " +
                             std::to_string(fields.size()) + " fields");
        }
        std::vector<double> row(fields.size());
        for (std::size_t i = 0; i < fields.size(); ++i) {
            const auto [ptr, ec] =
                std::from_chars(fields[i].data(), fields[i].data() + fields[i].size(), row[i]);
            if (ec != std::errc() || ptr != fields[i].data() + fields[i].size()) {
                throw InputError("CSV line " + std::to_string(line_no) + ": bad number '" +
                                 std::string(fields[i]) + "'");
            }
        }
        table.rows.push_back(std::move(row));
    }
    if (!header_seen) throw InputError("empty CSV");
    return table;
}

std::string profile_csv(const MotionProfile& profile) {
    CsvTable table{{"theta2_deg", "value"}, {}};
    for (std::size_t i = 0; i < profile.size(); ++i) {
        table.rows.push_back({degrees(profile.theta2_at(i)), profile.values[i]});
    }
    return to_csv(table);
}

MotionProfile parse_profile_csv(std::string_view text, double cv_speed) {
    const std::vector<std::string> header{"theta2_deg", "value"};
    const CsvTable table = parse_csv(text, header);
    if (table.rows.size() < 4) throw InputError("profile CSV needs at least 4 rows");

    MotionProfile profile;
    profile.cv_speed = cv_speed;
    profile.phase = radians(table.rows.front()[0]);
    for (const auto& row : table.rows) profile.values.push_back(row[1]);
    const double spacing = 360.0 / static_cast<double>(table.rows.size());
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const double expected = table.rows.front()[0] + spacing * static_cast<double>(i);
        if (std::abs(table.rows[i][0] - expected) > 1e-6) {
            throw InputError("profile CSV theta2_deg is not uniformly spaced over one cycle");
        }
    }
    profile.cycle_advance = infer_cycle_advance(profile.values);
    return profile;
}

std::string history_csv(std::span<const double> history) {
    CsvTable table{{"generation", "total"}, {}};
    for (std::size_t g = 0; g < history.size(); ++g) {
        table.rows.push_back({static_cast<double>(g), history[g]});
    }
    return to_csv(table);
}

std::string torque_csv(const TorqueProfile& profile) {
    CsvTable table{{"theta2_deg", "tau_cv", "tau_servo"}, {}};
    for (std::size_t i = 0; i < profile.size(); ++i) {
        table.rows.push_back({degrees(profile.theta2[i]), profile.tau_cv[i], profile.tau_servo[i]});
    }
    return to_csv(table);
}

std::string motion_csv(const MotionProfile& profile, const ProfileDerivatives& derivatives) {
    CsvTable table{{"theta2_deg", "theta5", "velocity", "acceleration"}, {}};
    for (std::size_t i = 0; i < profile.size(); ++i) {
        table.rows.push_back({degrees(profile.theta2_at(i)), profile.values[i],
                              derivatives.velocity[i], derivatives.acceleration[i]});
    }
    return to_csv(table);
}

std::string simlog_csv(std::span<const AxisLogSample> log) {
    CsvTable table{{"t", "demand_counts", "measured_counts", "error_counts", "demand_cps",
                    "measured_cps", "volts"},
                   {}};
    table.rows.reserve(log.size());
    for (const AxisLogSample& s : log) {
        table.rows.push_back({s.t, static_cast<double>(s.demand), static_cast<double>(s.measured),
                              static_cast<double>(s.error), s.demand_cps, s.measured_cps, s.volts});
    }
    return to_csv(table);
}

}  // namespace fivebar
