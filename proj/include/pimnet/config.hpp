#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pimnet/dynamics.hpp"
#include "pimnet/errors.hpp"
#include "pimnet/execution.hpp"
#include "pimnet/io.hpp"
#include "pimnet/partition.hpp"
#include "pimnet/problem.hpp"

namespace pimnet {

using json = nlohmann::json;

namespace cfg {

template <typename T>
T require(const json& j, const std::string& path, const char* key) {
    if (!j.contains(key)) throw config_error(path + "." + key + ": missing");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw config_error(path + "." + key + ": " + e.what());
    }
}

template <typename T>
T value_or(const json& j, const std::string& path, const char* key, T fallback) {
    if (!j.contains(key) || j.at(key).is_null()) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw config_error(path + "." + key + ": " + e.what());
    }
}

}  // namespace cfg

struct InstanceSpec {
    std::string path;       // gset file; exclusive with generator
    std::string generator;  // sk | lattice | er | ba
    int n = 0;
    int rows = 0, cols = 0;
    bool periodic = true;
    double coupling = 1.0;
    long edges = 0;
    int m_attach = 0;
    std::vector<double> weights = {1.0, -1.0};
    std::uint64_t seed = 0;
};

struct PartitionSpec {
    int blocks = 1;
    std::string scheme = "contiguous";  // contiguous | random
    std::uint64_t seed = 0;
};

struct ModeSpec {
    std::string kind = "monolithic";  // monolithic | serial | concurrent
    double tau = 0.0;                 // seconds; exclusive with frequency_hz
    double frequency_hz = 0.0;
    bool quantize_sync = true;
};

struct ModelSpec {
    std::string kind = "linear";  // linear | kuramoto
    KuramotoParams kuramoto;
};

struct ScheduleSpec {
    std::string kind = "constant";  // constant | linear | geometric
    double beta_start = 1.0;
    double beta_end = 1.0;
};

struct RunSection {
    double t_total = 0.0;
    double dt = 1e-12;
    int trials = 1;
    std::uint64_t seed = 0;
    int workers = 1;
    long log_every = 1;
    bool accumulate_gradients = false;
    bool serial_random_order = false;
};

struct OutputSpec {
    std::string csv = "epochs.csv";
    std::string manifest = "manifest.json";
};

struct MetricsSpec {
    double beta_gibbs = 0.0;  // 0 disables distribution metrics
    bool w1_vs_pi = false;
    bool kl = false;
    bool bounds = false;
    double target_ratio = 0.98;
    double bks = 0.0;  // 0 = derive from best observed cut
    std::vector<double> e_bit;
};

struct RunConfig {
    InstanceSpec instance;
    PartitionSpec partition;
    ModeSpec mode;
    DeviceParams device;
    ScheduleSpec schedule;
    ModelSpec model;
    RunSection run;
    OutputSpec output;
    MetricsSpec metrics;

    // -- json mapping -------------------------------------------------------

    static RunConfig from_json(const json& j) {
        RunConfig c;
        const json& ji = j.contains("instance") ? j.at("instance") : json::object();
        c.instance.path = cfg::value_or<std::string>(ji, "instance", "path", "");
        c.instance.generator = cfg::value_or<std::string>(ji, "instance", "generator", "");
        c.instance.n = cfg::value_or<int>(ji, "instance", "n", 0);
        c.instance.rows = cfg::value_or<int>(ji, "instance", "rows", 0);
        c.instance.cols = cfg::value_or<int>(ji, "instance", "cols", 0);
        c.instance.periodic = cfg::value_or<bool>(ji, "instance", "periodic", true);
        c.instance.coupling = cfg::value_or<double>(ji, "instance", "coupling", 1.0);
        c.instance.edges = cfg::value_or<long>(ji, "instance", "edges", 0);
        c.instance.m_attach = cfg::value_or<int>(ji, "instance", "m_attach", 0);
        c.instance.weights =
            cfg::value_or<std::vector<double>>(ji, "instance", "weights", {1.0, -1.0});
        c.instance.seed = cfg::value_or<std::uint64_t>(ji, "instance", "seed", 0);

        const json& jp = j.contains("partition") ? j.at("partition") : json::object();
        c.partition.blocks = cfg::value_or<int>(jp, "partition", "blocks", 1);
        c.partition.scheme =
            cfg::value_or<std::string>(jp, "partition", "scheme", "contiguous");
        c.partition.seed = cfg::value_or<std::uint64_t>(jp, "partition", "seed", 0);

        const json& jm = j.contains("mode") ? j.at("mode") : json::object();
        c.mode.kind = cfg::value_or<std::string>(jm, "mode", "kind", "monolithic");
        c.mode.tau = cfg::value_or<double>(jm, "mode", "tau", 0.0);
        c.mode.frequency_hz = cfg::value_or<double>(jm, "mode", "frequency_hz", 0.0);
        c.mode.quantize_sync = cfg::value_or<bool>(jm, "mode", "quantize_sync", true);

        const json& jd = j.contains("device") ? j.at("device") : json::object();
        c.device.r = cfg::value_or<double>(jd, "device", "r_ohms", 310e3);
        c.device.c = cfg::value_or<double>(jd, "device", "c_farads", 50e-15);

        const json& js = j.contains("schedule") ? j.at("schedule") : json::object();
        c.schedule.kind = cfg::value_or<std::string>(js, "schedule", "kind", "constant");
        c.schedule.beta_start = cfg::value_or<double>(js, "schedule", "beta_start", 1.0);
        c.schedule.beta_end = cfg::value_or<double>(js, "schedule", "beta_end", 1.0);

        const json& jmo = j.contains("model") ? j.at("model") : json::object();
        c.model.kind = cfg::value_or<std::string>(jmo, "model", "kind", "linear");
        auto read_pw = [&](const char* key, PiecewiseLinear fallback) {
            if (!jmo.contains(key)) return fallback;
            PiecewiseLinear pw;
            for (const auto& pt : jmo.at(key)) {
                if (!pt.is_array() || pt.size() != 2)
                    throw config_error(std::string("model.") + key +
                                       ": expected [time, value] pairs");
                pw.times.push_back(pt[0].get<double>());
                pw.values.push_back(pt[1].get<double>());
            }
            return pw;
        };
        c.model.kuramoto.kj = read_pw("kj", PiecewiseLinear::constant(1.0));
        c.model.kuramoto.ks = read_pw("ks", PiecewiseLinear::constant(0.0));

        const json& jr = j.contains("run") ? j.at("run") : json::object();
        c.run.t_total = cfg::require<double>(jr, "run", "t_total");
        c.run.dt = cfg::value_or<double>(jr, "run", "dt", 1e-12);
        c.run.trials = cfg::value_or<int>(jr, "run", "trials", 1);
        c.run.seed = cfg::value_or<std::uint64_t>(jr, "run", "seed", 0);
        c.run.workers = cfg::value_or<int>(jr, "run", "workers", 1);
        c.run.log_every = cfg::value_or<long>(jr, "run", "log_every", 1);
        c.run.accumulate_gradients =
            cfg::value_or<bool>(jr, "run", "accumulate_gradients", false);
        c.run.serial_random_order =
            cfg::value_or<bool>(jr, "run", "serial_random_order", false);

        const json& jo = j.contains("output") ? j.at("output") : json::object();
        c.output.csv = cfg::value_or<std::string>(jo, "output", "csv", "epochs.csv");
        c.output.manifest =
            cfg::value_or<std::string>(jo, "output", "manifest", "manifest.json");

        const json& jme = j.contains("metrics") ? j.at("metrics") : json::object();
        c.metrics.beta_gibbs = cfg::value_or<double>(jme, "metrics", "beta_gibbs", 0.0);
        c.metrics.w1_vs_pi = cfg::value_or<bool>(jme, "metrics", "w1_vs_pi", false);
        c.metrics.kl = cfg::value_or<bool>(jme, "metrics", "kl", false);
        c.metrics.bounds = cfg::value_or<bool>(jme, "metrics", "bounds", false);
        c.metrics.target_ratio = cfg::value_or<double>(jme, "metrics", "target_ratio", 0.98);
        c.metrics.bks = cfg::value_or<double>(jme, "metrics", "bks", 0.0);
        c.metrics.e_bit = cfg::value_or<std::vector<double>>(jme, "metrics", "e_bit", {});
        return c;
    }

    json to_json() const {
        json j;
        j["instance"] = {{"path", instance.path},     {"generator", instance.generator},
                         {"n", instance.n},           {"rows", instance.rows},
                         {"cols", instance.cols},     {"periodic", instance.periodic},
                         {"coupling", instance.coupling}, {"edges", instance.edges},
                         {"m_attach", instance.m_attach}, {"weights", instance.weights},
                         {"seed", instance.seed}};
        j["partition"] = {{"blocks", partition.blocks},
                          {"scheme", partition.scheme},
                          {"seed", partition.seed}};
        j["mode"] = {{"kind", mode.kind},
                     {"tau", mode.tau},
                     {"frequency_hz", mode.frequency_hz},
                     {"quantize_sync", mode.quantize_sync}};
        j["device"] = {{"r_ohms", device.r}, {"c_farads", device.c}};
        j["schedule"] = {{"kind", schedule.kind},
                         {"beta_start", schedule.beta_start},
                         {"beta_end", schedule.beta_end}};
        json kj = json::array(), ks = json::array();
        for (std::size_t i = 0; i < model.kuramoto.kj.times.size(); ++i)
            kj.push_back({model.kuramoto.kj.times[i], model.kuramoto.kj.values[i]});
        for (std::size_t i = 0; i < model.kuramoto.ks.times.size(); ++i)
            ks.push_back({model.kuramoto.ks.times[i], model.kuramoto.ks.values[i]});
        j["model"] = {{"kind", model.kind}, {"kj", kj}, {"ks", ks}};
        j["run"] = {{"t_total", run.t_total}, {"dt", run.dt},
                    {"trials", run.trials},   {"seed", run.seed},
                    {"workers", run.workers}, {"log_every", run.log_every},
                    {"accumulate_gradients", run.accumulate_gradients},
                    {"serial_random_order", run.serial_random_order}};
        j["output"] = {{"csv", output.csv}, {"manifest", output.manifest}};
        j["metrics"] = {{"beta_gibbs", metrics.beta_gibbs},
                        {"w1_vs_pi", metrics.w1_vs_pi},
                        {"kl", metrics.kl},
                        {"bounds", metrics.bounds},
                        {"target_ratio", metrics.target_ratio},
                        {"bks", metrics.bks},
                        {"e_bit", metrics.e_bit}};
        return j;
    }

    // -- normalization & validation ----------------------------------------

    /// Resolve frequency to tau, round tau to a step multiple, apply defaults.
    /// Idempotent: load -> normalize -> save -> load is a fixed point.
    void normalize() {
        if (mode.frequency_hz > 0.0 && mode.tau > 0.0)
            throw config_error("mode: frequency_hz and tau are mutually exclusive");
        if (mode.frequency_hz > 0.0) {
            mode.tau = 1.0 / mode.frequency_hz;
            mode.frequency_hz = 0.0;
        }
        if (mode.kind == "monolithic" && mode.tau <= 0.0) mode.tau = run.t_total;
        if (mode.tau > 0.0 && run.dt > 0.0)
            mode.tau = std::max<std::int64_t>(1, std::llround(mode.tau / run.dt)) * run.dt;
        validate();
    }

    void validate() const {
        if (instance.path.empty() == instance.generator.empty())
            throw config_error("instance: exactly one of path or generator is required");
        if (!instance.path.empty() && !std::filesystem::exists(instance.path))
            throw config_error("instance.path: file not found: " + instance.path);
        if (!instance.generator.empty() && instance.generator != "sk" &&
            instance.generator != "lattice" && instance.generator != "er" &&
            instance.generator != "ba")
            throw config_error("instance.generator: unknown generator " + instance.generator);
        if (partition.blocks < 1) throw config_error("partition.blocks: must be >= 1");
        if (partition.scheme != "contiguous" && partition.scheme != "random")
            throw config_error("partition.scheme: unknown scheme " + partition.scheme);
        if (mode.kind != "monolithic" && mode.kind != "serial" && mode.kind != "concurrent")
            throw config_error("mode.kind: unknown mode " + mode.kind);
        if (mode.kind != "monolithic" && mode.tau <= 0.0 && mode.frequency_hz <= 0.0)
            throw config_error("mode: serial/concurrent runs need tau or frequency_hz");
        if (device.r <= 0.0 || device.c <= 0.0)
            throw config_error("device: r_ohms and c_farads must be positive");
        if (schedule.kind != "constant" && schedule.kind != "linear" &&
            schedule.kind != "geometric")
            throw config_error("schedule.kind: unknown kind " + schedule.kind);
        if (schedule.beta_start <= 0.0)
            throw config_error("schedule.beta_start: must be positive");
        if (model.kind != "linear" && model.kind != "kuramoto")
            throw config_error("model.kind: unknown model " + model.kind);
        if (run.t_total <= 0.0) throw config_error("run.t_total: must be positive");
        if (run.dt <= 0.0) throw config_error("run.dt: must be positive");
        if (run.trials < 1) throw config_error("run.trials: must be >= 1");
        if (!(metrics.target_ratio > 0.0 && metrics.target_ratio <= 1.0))
            throw config_error("metrics.target_ratio: must be in (0,1]");
    }

    // -- builders ------------------------------------------------------------

    ProblemInstance build_instance() const {
        if (!instance.path.empty()) {
            std::ifstream in(instance.path);
            if (!in) throw config_error("instance.path: cannot open " + instance.path);
            return parse_gset(in, std::filesystem::path(instance.path).stem().string());
        }
        if (instance.generator == "sk") return gen_sk(instance.n, instance.seed);
        if (instance.generator == "lattice")
            return gen_lattice(instance.rows, instance.cols, instance.periodic,
                               instance.coupling);
        if (instance.generator == "er")
            return gen_er(instance.n, instance.edges, instance.seed, instance.weights);
        return gen_ba(instance.n, instance.m_attach, instance.seed, instance.weights);
    }

    Partition build_partition(int n) const {
        return partition.scheme == "random"
                   ? make_random_partition(n, partition.blocks, partition.seed)
                   : make_contiguous_partition(n, partition.blocks);
    }

    ExecMode build_mode() const {
        ExecMode m;
        m.kind = mode.kind == "serial"
                     ? ExecKind::serial
                     : (mode.kind == "concurrent" ? ExecKind::concurrent
                                                  : ExecKind::monolithic);
        m.tau = mode.tau;
        m.quantize_sync = mode.quantize_sync;
        return m;
    }

    RunSpec build_run_spec() const {
        RunSpec s;
        s.device = device;
        s.schedule.kind = schedule.kind == "linear"
                              ? TemperatureSchedule::Kind::linear
                              : (schedule.kind == "geometric"
                                     ? TemperatureSchedule::Kind::geometric
                                     : TemperatureSchedule::Kind::constant);
        s.schedule.beta_start = schedule.beta_start;
        s.schedule.beta_end = schedule.beta_end;
        s.schedule.duration = run.t_total;
        s.t_total = run.t_total;
        s.dt = run.dt;
        s.trials = run.trials;
        s.seed = run.seed;
        s.workers = run.workers;
        s.model = model.kind == "kuramoto" ? ModelKind::kuramoto : ModelKind::linear;
        s.kuramoto = model.kuramoto;
        s.accumulate_gradients = run.accumulate_gradients || metrics.bounds || metrics.kl;
        s.log_every = run.log_every;
        s.serial_random_order = run.serial_random_order;
        return s;
    }
};

inline RunConfig load_run_config(const std::filesystem::path& path) {
    json j;
    try {
        j = json::parse(io::read_text(path));
    } catch (const json::exception& e) {
        throw config_error(path.string() + ": " + e.what());
    }
    auto c = RunConfig::from_json(j);
    c.normalize();
    return c;
}

inline void save_run_config(const RunConfig& c, const std::filesystem::path& path) {
    io::write_text(path, c.to_json().dump(2) + "\n");
}

}  // namespace pimnet
