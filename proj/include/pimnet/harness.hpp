#pragma once

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "pimnet/config.hpp"
#include "pimnet/distribution.hpp"
#include "pimnet/execution.hpp"
#include "pimnet/io.hpp"
#include "pimnet/metrics.hpp"
#include "pimnet/spectrum.hpp"

namespace pimnet {

// ---- operating-mode advisor -------------------------------------------------

struct AdvisorInput {
    enum class Priority { latency, energy };
    Priority priority = Priority::energy;
    double available_sync_frequency = 0.0;  // Hz
    double rho_problem = 0.0;               // rho(J~), dimensionless
    double rc = 0.0;                        // seconds
    bool rc_adjustable = false;
    double rc_max = 0.0;  // largest achievable R'C' when adjustable
    int b = 1;

    void validate() const {
        if (available_sync_frequency <= 0.0 || rho_problem <= 0.0 || rc <= 0.0 || b < 1)
            throw usage_error("advisor: inputs must be positive");
        if (rc_adjustable && rc_max < rc)
            throw usage_error("advisor: rc_max must be at least rc");
    }
};

struct AdvisorResult {
    ExecKind decision = ExecKind::serial;
    std::vector<std::string> trace;  // one line per branch taken, in order
};

/// Decision procedure for choosing the execution model: energy priority always
/// selects serial; latency priority selects concurrent only when the available
/// sync frequency covers 1/tau_flip = rho(J~)/RC (natively, or after an RC
/// slowdown that stays below the block count).
inline AdvisorResult advise(const AdvisorInput& in) {
    in.validate();
    AdvisorResult out;
    auto mhz = [](double hz) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.3g MHz", hz / 1e6);
        return std::string(buf);
    };
    if (in.priority == AdvisorInput::Priority::energy) {
        out.trace.push_back("priority=energy: serial operation is preferable");
        out.decision = ExecKind::serial;
        return out;
    }
    out.trace.push_back("priority=latency: concurrent mode considered");
    const double f_needed = in.rho_problem / in.rc;  // 1/tau_flip
    out.trace.push_back("required sync frequency 1/tau_flip = rho/RC = " + mhz(f_needed));
    if (in.available_sync_frequency >= f_needed) {
        out.trace.push_back("available " + mhz(in.available_sync_frequency) +
                            " >= required: concurrent");
        out.decision = ExecKind::concurrent;
        return out;
    }
    out.trace.push_back("available " + mhz(in.available_sync_frequency) +
                        " < required: native bandwidth insufficient");
    if (!in.rc_adjustable) {
        out.trace.push_back("RC not adjustable: serial");
        out.decision = ExecKind::serial;
        return out;
    }
    const double slowdown = in.rc_max / in.rc;
    const double f_adjusted = in.rho_problem / in.rc_max;
    out.trace.push_back("adjusted requirement at R'C': " + mhz(f_adjusted));
    if (slowdown >= static_cast<double>(in.b)) {
        char buf[80];
        std::snprintf(buf, sizeof(buf), "slowdown R'C'/RC = %.3g >= B = %d: serial",
                      slowdown, in.b);
        out.trace.push_back(buf);
        out.decision = ExecKind::serial;
        return out;
    }
    if (in.available_sync_frequency >= f_adjusted) {
        char buf[96];
        std::snprintf(buf, sizeof(buf),
                      "slowdown R'C'/RC = %.3g < B = %d and frequency constraint met: "
                      "concurrent",
                      slowdown, in.b);
        out.trace.push_back(buf);
        out.decision = ExecKind::concurrent;
        return out;
    }
    out.trace.push_back("frequency constraint still unmet at R'C': serial");
    out.decision = ExecKind::serial;
    return out;
}

// ---- experiment driver --------------------------------------------------------

struct RunRecord {
    RunConfig config;  // normalized
    ProblemInstance instance;
    std::string instance_hash;
    EpochLogs logs;
    std::filesystem::path csv_path;
    std::filesystem::path manifest_path;
};

namespace detail {

inline std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&tt));
    return buf;
}

}  // namespace detail

/// Execute one configured run, write the epoch CSV and a JSON manifest.
/// Reruns with the same config and seed regenerate byte-identical CSVs (the
/// manifest's created timestamp is the one intentional exception).
inline RunRecord run_experiment(const RunConfig& cfg_in) {
    RunConfig cfg = cfg_in;
    cfg.normalize();
    RunRecord rec;
    rec.config = cfg;
    rec.instance = cfg.build_instance();
    rec.instance_hash = instance_hash(rec.instance);
    const Partition partition = cfg.build_partition(rec.instance.n);
    const ExecMode mode = cfg.build_mode();
    const RunSpec spec = cfg.build_run_spec();

    {  // stability guard
        const auto extremal = detail::power_extremal(rec.instance.couplings, 500, 1e-4);
        const double stiffness = spec.dt * extremal.radius / spec.device.rc();
        if (stiffness > 0.1)
            std::fprintf(stderr,
                         "warning: dt*rho(J~)/RC = %.3g > 0.1, integration may be unstable\n",
                         stiffness);
    }

    switch (mode.kind) {
        case ExecKind::monolithic:
            rec.logs = run_monolithic(rec.instance, mode, spec);
            break;
        case ExecKind::serial:
            rec.logs = run_serial(rec.instance, partition, mode, spec);
            break;
        case ExecKind::concurrent:
            rec.logs = run_concurrent(rec.instance, partition, mode, spec);
            break;
    }

    rec.csv_path = cfg.output.csv;
    rec.manifest_path = cfg.output.manifest;
    io::write_text(rec.csv_path, epoch_logs_csv(rec.logs));

    const BestState best = best_state(rec.logs);
    json manifest;
    manifest["config"] = cfg.to_json();
    manifest["instance"] = json::parse(instance_metadata_json(rec.instance));
    manifest["outputs"] = {rec.csv_path.string()};
    manifest["created"] = detail::iso_timestamp();
    manifest["results"] = {{"best_energy", best.energy},
                           {"best_cut", best.cut},
                           {"best_t", best.t},
                           {"trials", cfg.run.trials}};

    // optional distribution metrics on the final boundary
    if (cfg.metrics.beta_gibbs > 0.0 && (cfg.metrics.w1_vs_pi || cfg.metrics.kl)) {
        if (rec.instance.n > kMaxEnumerationSpins)
            throw capacity_error("metrics: distribution comparison needs n <= 24");
        const auto pi_table = enumerate_gibbs(rec.instance, cfg.metrics.beta_gibbs);
        std::vector<std::uint64_t> finals;
        for (const auto& log : rec.logs)
            if (!log.records.empty() && log.records.back().has_config)
                finals.push_back(log.records.back().config);
        if (!finals.empty()) {
            const auto mu = EmpiricalDistribution::from_samples(finals, rec.instance.n);
            if (cfg.metrics.w1_vs_pi)
                manifest["results"]["w1_vs_pi"] =
                    w1_hamming(mu, EmpiricalDistribution::from_gibbs(pi_table));
            if (cfg.metrics.kl) {
                const double kl = kl_divergence(mu, pi_table);
                manifest["results"]["kl_vs_pi"] = kl;
            }
        }
    }
    io::write_text(rec.manifest_path, manifest.dump(2) + "\n");
    return rec;
}

}  // namespace pimnet
