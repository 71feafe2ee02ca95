#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "fivebar/control.hpp"
#include "fivebar/dynamics.hpp"
#include "fivebar/errors.hpp"
#include "fivebar/mechanism.hpp"
#include "fivebar/motion.hpp"
#include "fivebar/objective.hpp"
#include "fivebar/synthesis.hpp"

namespace fivebar {

using Json = nlohmann::json;

// JSON mappings. Mechanism and task documents are strict (every field
// required); configuration documents fall back to defaults for missing keys.
void to_json(Json& j, const Point& v);
void from_json(const Json& j, Point& v);
void to_json(Json& j, const MechanismDims& v);
void from_json(const Json& j, MechanismDims& v);
void to_json(Json& j, const TaskSpec& v);
void from_json(const Json& j, TaskSpec& v);
void to_json(Json& j, const ObjectiveWeights& v);
void from_json(const Json& j, ObjectiveWeights& v);
void to_json(Json& j, const ObjectiveBreakdown& v);
void from_json(const Json& j, ObjectiveBreakdown& v);
void to_json(Json& j, const GAConfig& v);
void from_json(const Json& j, GAConfig& v);
void to_json(Json& j, const GeneRange& v);
void from_json(const Json& j, GeneRange& v);
void to_json(Json& j, const DesignBounds& v);
void from_json(const Json& j, DesignBounds& v);
void to_json(Json& j, const DescentConfig& v);
void from_json(const Json& j, DescentConfig& v);
void to_json(Json& j, const SynthesisResult& v);
void from_json(const Json& j, SynthesisResult& v);
void to_json(Json& j, const InertialParams& v);
void from_json(const Json& j, InertialParams& v);
void to_json(Json& j, const AxisPlant& v);
void from_json(const Json& j, AxisPlant& v);
void to_json(Json& j, const PlantConfig& v);
void from_json(const Json& j, PlantConfig& v);
void to_json(Json& j, const ControllerGains& v);
void from_json(const Json& j, ControllerGains& v);

// Reads and parses a JSON file; InputError names the path on failure.
Json read_json_file(const std::filesystem::path& path);

template <typename T>
T load_json(const std::filesystem::path& path) {
    const Json j = read_json_file(path);
    try {
        return j.get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);
void write_json_file(const std::filesystem::path& path, const Json& j);

// Shortest decimal form that parses back to the same double.
std::string format_number(double value);

// Numeric CSV with a fixed header; rows of equal width.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

std::string to_csv(const CsvTable& table);
// Throws InputError when the header differs from `expected_header` or a
// field is not a number.
CsvTable parse_csv(std::string_view text, std::span<const std::string> expected_header);

// theta2_deg,value
std::string profile_csv(const MotionProfile& profile);
MotionProfile parse_profile_csv(std::string_view text, double cv_speed = kTwoPi);

// generation,total
std::string history_csv(std::span<const double> history);
// theta2_deg,tau_cv,tau_servo
std::string torque_csv(const TorqueProfile& profile);
// theta2_deg,theta5,velocity,acceleration
std::string motion_csv(const MotionProfile& profile, const ProfileDerivatives& derivatives);
// t,demand_counts,measured_counts,error_counts,demand_cps,measured_cps,volts
std::string simlog_csv(std::span<const AxisLogSample> log);

}  // namespace fivebar
