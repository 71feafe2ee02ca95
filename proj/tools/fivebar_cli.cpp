#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fivebar/control.hpp"
#include "fivebar/dynamics.hpp"
#include "fivebar/errors.hpp"
#include "fivebar/io.hpp"
#include "fivebar/objective.hpp"
#include "fivebar/sample_task.hpp"
#include "fivebar/svg.hpp"
#include "fivebar/synthesis.hpp"

#ifndef FIVEBAR_VERSION
#define FIVEBAR_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using namespace fivebar;

namespace {

enum ExitCode : int { kOk = 0, kInputFailure = 2, kInfeasible = 3, kUnstable = 4 };

struct SynthConfig {
    GAConfig ga;
    DesignBounds bounds;
    ObjectiveWeights weights;
    DescentConfig descent;
    EvaluationOptions evaluation;
};

const char* swept_mode_name(SweptMode m) { return m == SweptMode::centered ? "centered" : "raw"; }

EvaluationOptions parse_evaluation(const Json& j) {
    EvaluationOptions out;
    if (j.contains("n_harmonics")) j.at("n_harmonics").get_to(out.n_harmonics);
    if (j.contains("swept_mode")) {
        const std::string mode = j.at("swept_mode").get<std::string>();
        if (mode == "centered") {
            out.swept_mode = SweptMode::centered;
        } else if (mode == "raw") {
            out.swept_mode = SweptMode::raw;
        } else {
            throw InputError("swept_mode must be \"centered\" or \"raw\"");
        }
    }
    if (out.n_harmonics == 0) throw InputError("n_harmonics must be >= 1");
    return out;
}

Json evaluation_json(const EvaluationOptions& o) {
    return Json{{"n_harmonics", o.n_harmonics}, {"swept_mode", swept_mode_name(o.swept_mode)}};
}

SynthConfig load_synth_config(const std::optional<fs::path>& path) {
    SynthConfig cfg;
    if (!path) return cfg;
    const Json j = read_json_file(*path);
    try {
        if (j.contains("ga")) j.at("ga").get_to(cfg.ga);
        if (j.contains("bounds")) j.at("bounds").get_to(cfg.bounds);
        if (j.contains("weights")) j.at("weights").get_to(cfg.weights);
        if (j.contains("descent")) j.at("descent").get_to(cfg.descent);
        if (j.contains("evaluation")) cfg.evaluation = parse_evaluation(j.at("evaluation"));
    } catch (const nlohmann::json::exception& e) {
        throw InputError(path->string() + ": " + e.what());
    }
    return cfg;
}

ObjectiveWeights parse_weights(const std::string& text) {
    std::vector<double> values;
    std::stringstream in(text);
    std::string field;
    while (std::getline(in, field, ',')) {
        try {
            std::size_t used = 0;
            values.push_back(std::stod(field, &used));
            if (used != field.size()) throw std::invalid_argument(field);
        } catch (const std::exception&) {
            throw InputError("--weights expects four numbers e,m,s,h; got '" + text + "'");
        }
    }
    if (values.size() != 4) throw InputError("--weights expects four numbers e,m,s,h; got '" + text + "'");
    ObjectiveWeights w{values[0], values[1], values[2], values[3]};
    w.validate();
    return w;
}

void prepare_out_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw InputError("cannot create output directory " + dir.string());
}

void write_manifest(const fs::path& out, const std::string& command, const Json& inputs,
                    const Json& seed, const Json& overrides) {
    write_json_file(out / "manifest.json", Json{{"command", command},
                                                {"inputs", inputs},
                                                {"seed", seed},
                                                {"overrides", overrides},
                                                {"out", out.string()},
                                                {"tool_version", FIVEBAR_VERSION}});
}

Json summary_json(const TorqueSummary& s) { return Json{{"min", s.min}, {"max", s.max}, {"rms", s.rms}}; }

// synth --------------------------------------------------------------------

struct SynthArgs {
    std::string task;
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string weights;
    std::string out;
};

int run_synth(const SynthArgs& args) {
    const TaskSpec task = load_json<TaskSpec>(args.task);
    const std::optional<fs::path> config_path =
        args.config.empty() ? std::nullopt : std::optional<fs::path>(args.config);
    SynthConfig cfg = load_synth_config(config_path);
    Json overrides = Json::object();
    if (args.seed) {
        cfg.ga.rng_seed = *args.seed;
        overrides["seed"] = *args.seed;
    }
    if (!args.weights.empty()) {
        cfg.weights = parse_weights(args.weights);
        overrides["weights"] = cfg.weights;
    }

    const fs::path out(args.out);
    prepare_out_dir(out);

    SynthesisOptions options;
    options.evaluation = cfg.evaluation;
    options.descent = cfg.descent;
    const SynthesisResult result = ga_run(task, cfg.bounds, cfg.ga, cfg.weights, options);

    write_json_file(out / "mechanism.json", result.refined_dims);
    Json synthesis = result;
    synthesis["ga"] = cfg.ga;
    synthesis["bounds"] = cfg.bounds;
    synthesis["weights"] = cfg.weights;
    synthesis["descent"] = cfg.descent;
    synthesis["evaluation"] = evaluation_json(cfg.evaluation);
    write_json_file(out / "synthesis.json", synthesis);
    write_text_file(out / "history.csv", history_csv(result.history));

    Json inputs{{"task", args.task}};
    if (config_path) inputs["config"] = args.config;
    write_manifest(out, "synth", inputs, cfg.ga.rng_seed, overrides);

    std::cout << "refined total " << format_number(result.refined.total) << " (error "
              << format_number(result.refined.error) << ", mobility "
              << format_number(result.refined.mobility) << ")\n";
    return kOk;
}

// analyze ------------------------------------------------------------------

struct AnalyzeArgs {
    std::string mechanism;
    std::string task;
    std::string config;
    std::string out;
};

int run_analyze(const AnalyzeArgs& args) {
    const MechanismDims dims = load_json<MechanismDims>(args.mechanism);
    const TaskSpec task = load_json<TaskSpec>(args.task);
    ObjectiveWeights weights;
    EvaluationOptions evaluation;
    InertialParams inertial;
    if (!args.config.empty()) {
        const Json j = read_json_file(args.config);
        try {
            if (j.contains("weights")) j.at("weights").get_to(weights);
            if (j.contains("evaluation")) evaluation = parse_evaluation(j.at("evaluation"));
            if (j.contains("inertial")) j.at("inertial").get_to(inertial);
        } catch (const nlohmann::json::exception& e) {
            throw InputError(args.config + ": " + e.what());
        }
    }

    const fs::path out(args.out);
    prepare_out_dir(out);

    const Evaluation ev = evaluate_detailed(dims, task, weights, evaluation);
    const ClosureTrace& trace = ev.trace;
    const MotionProfile profile = servo_profile(trace, task.cv_speed);
    const ProfileDerivatives derivs = differentiate(profile);

    const PoseSample& first = trace.poses.front();
    const Assembly side = assembly_side(dims, first.theta2, first.theta5, first.actual);

    Json objective{{"breakdown", ev.breakdown},
                   {"m", trace.immobile_count},
                   {"k", trace.size()},
                   {"branch_id", trace.branch_id},
                   {"assembly", side == Assembly::left ? "left" : "right"},
                   {"weights", weights},
                   {"evaluation", evaluation_json(evaluation)},
                   {"inertial", inertial}};

    write_text_file(out / "servo_profile.csv", profile_csv(profile));
    write_text_file(out / "motion.csv", motion_csv(profile, derivs));

    PlotSpec path;
    path.title = "End effector path";
    path.x_label = "x (mm)";
    path.y_label = "y (mm)";
    path.equal_aspect = true;
    PlotSeries actual{"actual", {}, {}};
    PlotSeries desired{"desired", {}, {}};
    for (std::size_t i = 0; i <= trace.size(); ++i) {
        const std::size_t j = i % trace.size();
        actual.x.push_back(trace.poses[j].actual.x);
        actual.y.push_back(trace.poses[j].actual.y);
        desired.x.push_back(task.samples[j].desired.x);
        desired.y.push_back(task.samples[j].desired.y);
    }
    path.series = {actual, desired};
    path.markers = {dims.cv_ground, dims.servo_ground};
    write_text_file(out / "effector.svg", render_svg(path));

    if (trace.immobile_count > 0) {
        std::cerr << "warning: mechanism is immobile at " << trace.immobile_count << " of "
                  << trace.size() << " samples; torque outputs skipped\n";
    } else {
        const TorqueProfile torques = inverse_dynamics(dims, inertial, trace, task.cv_speed);
        const MotorTorqueSummary summary = torque_summary(torques);
        objective["torque"] = Json{{"cv", summary_json(summary.cv)}, {"servo", summary_json(summary.servo)}};
        write_text_file(out / "torque.csv", torque_csv(torques));

        PlotSpec plot;
        plot.title = "Motor torque";
        plot.x_label = "CV angle (deg)";
        plot.y_label = "torque (N m)";
        PlotSeries cv{"CV", {}, torques.tau_cv};
        PlotSeries servo{"servo", {}, torques.tau_servo};
        for (double t : torques.theta2) cv.x.push_back(degrees(t));
        servo.x = cv.x;
        plot.series = {cv, servo};
        write_text_file(out / "torque.svg", render_svg(plot));
    }
    write_json_file(out / "objective.json", objective);

    Json inputs{{"mechanism", args.mechanism}, {"task", args.task}};
    if (!args.config.empty()) inputs["config"] = args.config;
    write_manifest(out, "analyze", inputs, nullptr, Json::object());

    std::cout << "total " << format_number(ev.breakdown.total) << ", m = " << trace.immobile_count
              << "\n";
    return kOk;
}

// simulate -----------------------------------------------------------------

struct SimulateArgs {
    std::string mechanism;
    std::string plant;
    std::string gains;
    std::string profile;
    std::size_t cycles = 1;
    std::string out;
};

std::string error_plot(const std::vector<AxisLogSample>& log, const std::string& title) {
    PlotSpec plot;
    plot.title = title;
    plot.x_label = "time (s)";
    plot.y_label = "position error (counts)";
    PlotSeries series{"error", {}, {}};
    series.x.reserve(log.size());
    series.y.reserve(log.size());
    for (const AxisLogSample& s : log) {
        series.x.push_back(s.t);
        series.y.push_back(static_cast<double>(s.error));
    }
    plot.series = {series};
    return render_svg(plot);
}

int run_simulate(const SimulateArgs& args) {
    const MechanismDims dims = load_json<MechanismDims>(args.mechanism);
    const PlantConfig plant = load_json<PlantConfig>(args.plant);
    const Json gains_json = read_json_file(args.gains);
    ControllerGains gains_cv;
    ControllerGains gains_servo;
    try {
        gains_json.at("cv").get_to(gains_cv);
        gains_json.at("servo").get_to(gains_servo);
    } catch (const nlohmann::json::exception& e) {
        throw InputError(args.gains + ": " + e.what());
    }
    const MotionProfile profile = parse_profile_csv(
        read_text_file(args.profile), counts_per_sec_to_rad_per_sec(plant.cv_demand_cps, plant.resolution));

    const fs::path out(args.out);
    prepare_out_dir(out);

    const SimLog log = simulate(dims, plant, gains_cv, gains_servo, profile, args.cycles);
    write_text_file(out / "simlog_cv.csv", simlog_csv(log.cv));
    write_text_file(out / "simlog_servo.csv", simlog_csv(log.servo));
    write_text_file(out / "error_cv.svg", error_plot(log.cv, "CV axis position error"));
    write_text_file(out / "error_servo.svg", error_plot(log.servo, "Servo axis position error"));

    write_manifest(out, "simulate",
                   Json{{"mechanism", args.mechanism},
                        {"plant", args.plant},
                        {"gains", args.gains},
                        {"profile", args.profile}},
                   nullptr, Json{{"cycles", args.cycles}});
    std::cout << log.cv.size() << " samples per axis\n";
    return kOk;
}

// sample-task --------------------------------------------------------------

int run_sample_task(std::size_t k, const std::string& out_dir) {
    const fs::path out(out_dir);
    prepare_out_dir(out);
    write_json_file(out / "sample_task.json", sample_task(k));
    write_json_file(out / "reference_mechanism.json", reference_mechanism());
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Synthesis, analysis and simulation of hybrid five-bar machines"};
    app.set_version_flag("--version", FIVEBAR_VERSION);
    app.require_subcommand(1);

    SynthArgs synth;
    CLI::App* synth_cmd = app.add_subcommand("synth", "GA synthesis followed by steepest descent");
    synth_cmd->add_option("task", synth.task, "task JSON")->required();
    synth_cmd->add_option("--config", synth.config, "synthesis config JSON");
    synth_cmd->add_option("--seed", synth.seed, "GA seed (overrides config)");
    synth_cmd->add_option("--weights", synth.weights, "objective weights e,m,s,h");
    synth_cmd->add_option("--out", synth.out, "output directory")->required();

    AnalyzeArgs analyze;
    CLI::App* analyze_cmd = app.add_subcommand("analyze", "objective, profiles and torques of a mechanism");
    analyze_cmd->add_option("mechanism", analyze.mechanism, "mechanism JSON")->required();
    analyze_cmd->add_option("task", analyze.task, "task JSON")->required();
    analyze_cmd->add_option("--config", analyze.config, "weights / evaluation / inertial JSON");
    analyze_cmd->add_option("--out", analyze.out, "output directory")->required();

    SimulateArgs sim;
    CLI::App* sim_cmd = app.add_subcommand("simulate", "closed-loop run of both axes");
    sim_cmd->add_option("mechanism", sim.mechanism, "mechanism JSON")->required();
    sim_cmd->add_option("plant", sim.plant, "plant JSON")->required();
    sim_cmd->add_option("gains", sim.gains, "gains JSON with cv and servo entries")->required();
    sim_cmd->add_option("profile", sim.profile, "servo profile CSV")->required();
    sim_cmd->add_option("--cycles", sim.cycles, "CV revolutions")->check(CLI::PositiveNumber);
    sim_cmd->add_option("--out", sim.out, "output directory")->required();

    std::size_t sample_k = 72;
    std::string sample_out;
    CLI::App* sample_cmd = app.add_subcommand("sample-task", "write the demo task and the reference mechanism");
    sample_cmd->add_option("--samples", sample_k, "precision points")->check(CLI::Range(3, 100000));
    sample_cmd->add_option("--out", sample_out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInputFailure;
    }

    try {
        if (*synth_cmd) return run_synth(synth);
        if (*analyze_cmd) return run_analyze(analyze);
        if (*sim_cmd) return run_simulate(sim);
        if (*sample_cmd) return run_sample_task(sample_k, sample_out);
    } catch (const UnstableSimulation& e) {
        std::cerr << "error: unstable simulation at sample " << e.sample() << ": " << e.what() << "\n";
        return kUnstable;
    } catch (const InfeasiblePopulation& e) {
        std::cerr << "error: infeasible: " << e.what() << "\n";
        return kInfeasible;
    } catch (const DegenerateTarget& e) {
        std::cerr << "error: infeasible: " << e.what() << "\n";
        return kInfeasible;
    } catch (const DegenerateDyad& e) {
        std::cerr << "error: infeasible: " << e.what() << "\n";
        return kInfeasible;
    } catch (const ImmobileTrace& e) {
        std::cerr << "error: infeasible: " << e.what() << "\n";
        return kInfeasible;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputFailure;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputFailure;
    }
    return kInputFailure;
}
