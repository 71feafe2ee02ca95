#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <charconv>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "fivebar/errors.hpp"
#include "fivebar/io.hpp"
#include "fivebar/sample_task.hpp"

using namespace fivebar;

namespace {

template <typename T>
T round_trip(const T& value) {
    const Json j = value;
    return Json::parse(j.dump()).get<T>();
}

std::filesystem::path scratch_dir() {
    const auto dir = std::filesystem::temp_directory_path() / "fivebar_test_io";
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("number formatting round-trips every double") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<std::uint64_t> bits;
    for (int i = 0; i < 20000; ++i) {
        std::uint64_t raw = bits(rng);
        double v;
        std::memcpy(&v, &raw, sizeof v);
        if (!std::isfinite(v)) continue;
        const std::string text = format_number(v);
        double back = 0.0;
        std::from_chars(text.data(), text.data() + text.size(), back);
        CHECK(back == v);
    }
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(150.0) == "150");
}

TEST_CASE("JSON round trips") {
    MechanismDims dims = reference_mechanism();
    dims.servo_ground = {250.125, -3.0 / 7.0};
    CHECK(round_trip(dims) == dims);
    const TaskSpec task = sample_task(72);
    CHECK(round_trip(task) == task);

    ObjectiveWeights w;
    w.swept = 0.3;
    CHECK(round_trip(w) == w);

    GAConfig ga;
    ga.rng_seed = 0xfeedbeefcafeULL;
    ga.generations = 17;
    CHECK(round_trip(ga) == ga);

    DesignBounds bounds;
    bounds.cv_fixed = false;
    bounds.servo_y = {-1.5, 2.5};
    CHECK(round_trip(bounds) == bounds);

    DescentConfig descent;
    descent.fd_step = 3e-5;
    CHECK(round_trip(descent) == descent);

    InertialParams in;
    in.gravity = {0.0, -9.81};
    in.effector_mass = 0.2;
    CHECK(round_trip(in) == in);

    PlantConfig plant;
    plant.assembly = Assembly::right;
    plant.coupled = false;
    plant.servo.amplifier_gain = 0.75;
    CHECK(round_trip(plant) == plant);

    ControllerGains g;
    g.kp = 2048;
    g.kf = -3;
    CHECK(round_trip(g) == g);

    ObjectiveBreakdown b{1.0 / 3.0, 2.0, 3.5, 0.25, 9.0};
    const ObjectiveBreakdown rb = round_trip(b);
    CHECK(rb.error == b.error);
    CHECK(rb.total == b.total);
}

TEST_CASE("JSON keys follow the documented names") {
    const Json g = ControllerGains{};
    for (const char* key : {"K_P", "K_I", "K_D", "K_V", "K_F", "divisor"}) CHECK(g.contains(key));
    const Json plant = PlantConfig{};
    CHECK(plant.at("assembly") == "left");
    CHECK(plant.at("sample_period") == 1e-3);
    const Json bounds = DesignBounds{};
    CHECK(bounds.at("p").is_array());
}

TEST_CASE("configuration documents fall back to defaults") {
    const GAConfig ga = Json::parse(R"({"generations": 5})").get<GAConfig>();
    CHECK(ga.generations == 5);
    CHECK(ga.population_size == GAConfig{}.population_size);
    const PlantConfig plant = Json::parse("{}").get<PlantConfig>();
    CHECK(plant == PlantConfig{});
}

TEST_CASE("strict documents reject missing or bad fields") {
    CHECK_THROWS(Json::parse(R"({"p": 1, "q": 2, "r": 3})").get<MechanismDims>());
    CHECK_THROWS(Json::parse(R"({"assembly": "up"})").get<PlantConfig>());
    CHECK_THROWS(Json::parse(R"({"population_size": 3})").get<GAConfig>());
}

TEST_CASE("file helpers name the path on failure") {
    const auto missing = scratch_dir() / "absent.json";
    try {
        read_json_file(missing);
        FAIL("expected InputError");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find("absent.json") != std::string::npos);
    }
    const auto broken = scratch_dir() / "broken.json";
    write_text_file(broken, "{ not json");
    CHECK_THROWS_AS(read_json_file(broken), InputError);
    write_text_file(broken, R"({"p": "x"})");
    CHECK_THROWS_AS(load_json<MechanismDims>(broken), InputError);

    const auto good = scratch_dir() / "dims.json";
    write_json_file(good, Json(reference_mechanism()));
    CHECK(load_json<MechanismDims>(good) == reference_mechanism());
    const std::string text = read_text_file(good);
    CHECK(text.back() == '\n');
    CHECK(text.find('\r') == std::string::npos);
}

TEST_CASE("CSV tables round-trip losslessly") {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> n(0.0, 1e3);
    CsvTable table{{"a", "b", "c"}, {}};
    for (int i = 0; i < 200; ++i) table.rows.push_back({n(rng), n(rng) * 1e-9, std::ldexp(n(rng), 60)});
    const std::string text = to_csv(table);
    CHECK(text.find('\r') == std::string::npos);
    const CsvTable back = parse_csv(text, table.header);
    CHECK(back.rows == table.rows);
}

TEST_CASE("CSV parsing errors") {
    const std::vector<std::string> header{"x", "y"};
    CHECK_THROWS_AS(parse_csv("", header), InputError);
    CHECK_THROWS_AS(parse_csv("x,z\n1,2\n", header), InputError);
    CHECK_THROWS_AS(parse_csv("x,y\n1\n", header), InputError);
    CHECK_THROWS_AS(parse_csv("x,y\n1,abc\n", header), InputError);
    CHECK_THROWS_AS(parse_csv("x,y\n1,2x\n", header), InputError);
    const CsvTable t = parse_csv("x,y\r\n1,2\r\n\r\n3,4", header);
    CHECK(t.rows == std::vector<std::vector<double>>{{1, 2}, {3, 4}});
}

TEST_CASE("servo profile CSV") {
    const TaskSpec task = sample_task(72);
    const ClosureTrace trace = track_closure(reference_mechanism(), task);
    const MotionProfile profile = servo_profile(trace, task.cv_speed);
    const MotionProfile back = parse_profile_csv(profile_csv(profile), task.cv_speed);
    CHECK(back.values == profile.values);
    CHECK(back.phase == doctest::Approx(profile.phase).epsilon(1e-15));
    CHECK(back.cycle_advance == profile.cycle_advance);

    CHECK_THROWS_AS(parse_profile_csv("theta2_deg,value\n0,1\n90,1\n180,1\n"), InputError);
    CHECK_THROWS_AS(parse_profile_csv("theta2_deg,value\n0,1\n90,1\n200,1\n270,1\n"), InputError);
    CHECK(parse_profile_csv("theta2_deg,value\n0,1\n90,1\n180,1\n270,1\n").size() == 4);
}

TEST_CASE("log and history CSV shapes") {
    std::vector<AxisLogSample> log(3);
    log[1].demand = 5;
    log[1].measured = 2;
    log[1].error = 3;
    log[2].volts = -10.0;
    const std::vector<std::string> header{"t", "demand_counts", "measured_counts", "error_counts",
                                          "demand_cps", "measured_cps", "volts"};
    const CsvTable t = parse_csv(simlog_csv(log), header);
    REQUIRE(t.rows.size() == 3);
    CHECK(t.rows[1][3] == 3.0);
    CHECK(t.rows[2][6] == -10.0);

    const std::vector<double> history{5.0, 4.0, 4.0};
    const std::vector<std::string> hh{"generation", "total"};
    CHECK(parse_csv(history_csv(history), hh).rows.back() == std::vector<double>{2.0, 4.0});
}

#ifdef FIVEBAR_DATA_DIR
TEST_CASE("shipped demo task matches the generator") {
    const TaskSpec shipped = load_json<TaskSpec>(std::filesystem::path(FIVEBAR_DATA_DIR) / "sample_task.json");
    CHECK(shipped == sample_task(72));
    const MechanismDims dims = load_json<MechanismDims>(std::filesystem::path(FIVEBAR_DATA_DIR) / "reference_mechanism.json");
    CHECK(dims == reference_mechanism());
}
#endif
