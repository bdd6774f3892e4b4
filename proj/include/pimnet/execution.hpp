#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <mutex>
#include <numbers>
#include <numeric>
#include <string>
#include <thread>
#include <vector>

#include "pimnet/dynamics.hpp"
#include "pimnet/errors.hpp"
#include "pimnet/partition.hpp"
#include "pimnet/problem.hpp"
#include "pimnet/rng.hpp"

namespace pimnet {

enum class ExecKind { monolithic, serial, concurrent };

inline const char* to_string(ExecKind k) {
    switch (k) {
        case ExecKind::monolithic: return "monolithic";
        case ExecKind::serial: return "serial";
        default: return "concurrent";
    }
}

/// Execution model. For serial/concurrent runs `tau` is the synchronization
/// epoch; for monolithic runs it only sets the logging cadence. `tau` is
/// rounded to an integer multiple of dt at run time and the rounded value is
/// what the logs reflect.
struct ExecMode {
    ExecKind kind = ExecKind::monolithic;
    double tau = 0.0;           // seconds
    bool quantize_sync = true;  // 1-bit latent exchange (full precision when false)
};

enum class ModelKind { linear, kuramoto };

/// Parameters shared by every run entry point.
struct RunSpec {
    DeviceParams device{};
    TemperatureSchedule schedule{};
    double t_total = 0.0;  // seconds
    double dt = 1e-12;     // seconds
    int trials = 1;
    std::uint64_t seed = 0;
    int workers = 1;                    // trial-level parallelism
    ModelKind model = ModelKind::linear;
    KuramotoParams kuramoto{};
    bool accumulate_gradients = false;  // track bound integrands per step
    long log_every = 1;                 // keep every k-th boundary (final kept always)
    bool serial_random_order = false;   // per-sweep random block order instead of index order

    void validate() const {
        device.validate();
        schedule.validate();
        if (t_total <= 0.0) throw usage_error("run: t_total must be positive");
        if (dt <= 0.0) throw usage_error("run: dt must be positive");
        if (trials < 1) throw usage_error("run: need at least one trial");
        if (log_every < 1) throw usage_error("run: log_every must be >= 1");
    }
};

/// One record per synchronization boundary.
struct BoundaryRecord {
    double t = 0.0;
    long epoch = 0;
    double energy = 0.0;
    double cut = std::numeric_limits<double>::quiet_NaN();
    double grad_err_sq = std::numeric_limits<double>::quiet_NaN();   // per-epoch integral
    double ext_grad_l1 = std::numeric_limits<double>::quiet_NaN();
    double pair_grad_l1 = std::numeric_limits<double>::quiet_NaN();  // coupled runs only
    double state_overlap = 0.0;       // <X, 1> of the live continuous state
    std::uint64_t config = 0;         // packed quantized state, valid iff has_config
    bool has_config = false;
};

struct EpochLog {
    int trial = 0;
    std::vector<BoundaryRecord> records;
    // minimum-energy quantized configuration seen at any boundary of this trial
    SpinConfig best_config;
    double best_energy = std::numeric_limits<double>::infinity();
    double best_cut = std::numeric_limits<double>::quiet_NaN();
    double best_t = 0.0;
};

using EpochLogs = std::vector<EpochLog>;  // indexed by trial

struct BestState {
    SpinConfig config;
    double energy = 0.0;
    double cut = std::numeric_limits<double>::quiet_NaN();
    double t = 0.0;
    int trial = 0;
};

/// Minimum-energy quantized configuration across all boundaries and trials;
/// ties break toward the earliest time (then the lowest trial index).
inline BestState best_state(const EpochLogs& logs) {
    if (logs.empty()) throw usage_error("best_state: empty logs");
    BestState best;
    bool found = false;
    for (const auto& log : logs) {
        if (log.records.empty() && !std::isfinite(log.best_energy)) continue;
        const bool better =
            !found || log.best_energy < best.energy ||
            (log.best_energy == best.energy && log.best_t < best.t);
        if (better) {
            best.config = log.best_config;
            best.energy = log.best_energy;
            best.cut = log.best_cut;
            best.t = log.best_t;
            best.trial = log.trial;
            found = true;
        }
    }
    if (!found) throw usage_error("best_state: logs contain no records");
    return best;
}

// ---- internals ------------------------------------------------------------------

namespace detail {

using Vec = Eigen::VectorXd;

inline void fill_step_noise(const CounterRng& rng, std::uint32_t trial, std::uint64_t step,
                            Vec& noise, int lo, int hi) {
    // global pair addressing: slot k covers spins 2k and 2k+1, so a block only
    // draws the slots overlapping its span and b=1 runs of every mode consume
    // identical streams
    for (int k = lo / 2; 2 * k < hi; ++k) {
        const auto z =
            rng.normal_pair(RngContext::dynamics, trial, step, static_cast<std::uint32_t>(k));
        if (2 * k >= lo && 2 * k < hi) noise[2 * k] = z[0];
        if (2 * k + 1 >= lo && 2 * k + 1 < hi) noise[2 * k + 1] = z[1];
    }
}

inline Vec initial_state(const CounterRng& rng, std::uint32_t trial, int n, ModelKind model) {
    Vec x(n);
    for (int k = 0; 2 * k < n; ++k) {
        const auto u =
            rng.uniform_pair(RngContext::init, trial, 0, static_cast<std::uint32_t>(k));
        if (2 * k < n) x[2 * k] = u[0] < 0.5 ? -1.0 : 1.0;
        if (2 * k + 1 < n) x[2 * k + 1] = u[1] < 0.5 ? -1.0 : 1.0;
    }
    if (model == ModelKind::kuramoto)
        for (int i = 0; i < n; ++i) x[i] = x[i] > 0.0 ? 0.0 : std::numbers::pi;
    return x;
}

inline SpinConfig state_to_spins(const Vec& x, ModelKind model) {
    std::span<const double> sp(x.data(), static_cast<std::size_t>(x.size()));
    return model == ModelKind::kuramoto ? quantize_phases(sp) : quantize(sp);
}

inline double latent_value(double spin, ModelKind model) {
    if (model == ModelKind::kuramoto) return spin > 0 ? 0.0 : std::numbers::pi;
    return spin;
}

// One concurrently-evolving process (monolithic when j_ext has no entries).
struct Process {
    const SplitCouplings* sc = nullptr;
    Vec x, x0;
    Vec ext_cache;  // linear model: J_ext * x0, refreshed at sync boundaries
    double epoch_grad_err = 0.0;
    double cum_grad_err = 0.0;

    bool monolithic() const { return sc->j_ext.nonZeros() == 0; }

    void refresh_latent(ModelKind model, bool quantize_sync) {
        const int n = static_cast<int>(x.size());
        if (quantize_sync) {
            const SpinConfig s = state_to_spins(x, model);
            for (int i = 0; i < n; ++i) x0[i] = latent_value(s.spins[i], model);
        } else {
            x0 = x;
        }
        if (model == ModelKind::linear) ext_cache = sc->j_ext * x0;
    }

    // dimensionless gradient at the current state into g
    void gradient(ModelKind model, const KuramotoParams& kp, double t, Vec& g) const {
        if (model == ModelKind::linear) {
            g = sc->j_int * x + ext_cache;
        } else {
            std::span<const double> xs(x.data(), x.size()), x0s(x0.data(), x0.size());
            kuramoto_gradient(*sc, kp, xs, x0s, t, std::span<double>(g.data(), g.size()));
        }
    }

    // full live gradient grad U(X_t): latent dependencies replaced by the live state
    Vec full_gradient(ModelKind model, const KuramotoParams& kp, double t) const {
        const int n = static_cast<int>(x.size());
        Vec g(n);
        if (model == ModelKind::linear) {
            g = sc->j_int * x + sc->j_ext * x;
        } else {
            std::span<const double> xs(x.data(), x.size());
            kuramoto_gradient(*sc, kp, xs, xs, t, std::span<double>(g.data(), g.size()));
        }
        return g;
    }

    // || grad U_ext(X_t) - grad U_ext(X_0) ||  pieces (dimensionless)
    Vec ext_gradient_gap(ModelKind model, const KuramotoParams& kp, double t) const {
        if (model == ModelKind::linear) return sc->j_ext * x - ext_cache;
        const int n = static_cast<int>(x.size());
        Vec live(n), frozen(n);
        const double kj = kp.kj.at(t);
        for (int i = 0; i < n; ++i) {
            double a = 0.0, b = 0.0;
            for (SparseSym::InnerIterator it(sc->j_ext, i); it; ++it) {
                a -= it.value() * std::sin(x[i] - x[it.col()]);
                b -= it.value() * std::sin(x[i] - x0[it.col()]);
            }
            live[i] = kj * a;
            frozen[i] = kj * b;
        }
        return live - frozen;
    }
};

}  // namespace detail

// ---- lockstep runs (monolithic / concurrent / coupled) ---------------------------

namespace detail {

template <typename PerTrial>
inline void parallel_trials(int trials, int workers, PerTrial&& body) {
    workers = std::max(1, workers);
    if (workers == 1) {
        for (int t = 0; t < trials; ++t) body(t);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        while (true) {
            const int t = next.fetch_add(1);
            if (t >= trials) return;
            try {
                body(t);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < std::min(workers, trials); ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

struct LockstepPlan {
    std::int64_t total_steps = 0;
    std::int64_t steps_per_epoch = 0;
    double dt = 0.0, du = 0.0;
};

inline LockstepPlan make_plan(const RunSpec& spec, double tau) {
    LockstepPlan p;
    p.dt = spec.dt;
    p.du = spec.dt / spec.device.rc();
    p.total_steps = std::llround(spec.t_total / spec.dt);
    if (p.total_steps < 1) throw usage_error("run: t_total shorter than one step");
    p.steps_per_epoch = std::max<std::int64_t>(1, std::llround(tau / spec.dt));
    return p;
}

}  // namespace detail

inline EpochLogs run_concurrent(const ProblemInstance& inst, const Partition& partition,
                                const ExecMode& mode, const RunSpec& spec) {
    spec.validate();
    if (mode.kind != ExecKind::monolithic && mode.tau <= 0.0)
        throw usage_error("run: tau must be positive");
    const double tau = mode.tau > 0.0 ? mode.tau : spec.t_total;
    if (mode.kind == ExecKind::concurrent && spec.t_total < tau)
        throw usage_error("run_concurrent: t_total must cover at least one epoch");
    const auto plan = detail::make_plan(spec, tau);
    const SplitCouplings sc = split(inst, partition);
    const bool maxcut = !inst.has_field();
    const int n = inst.n;
    const bool pack = n <= 63;
    const CounterRng rng(spec.seed);

    EpochLogs logs(spec.trials);
    detail::parallel_trials(spec.trials, spec.workers, [&](int trial) {
        try {
            EpochLog log;
            log.trial = trial;
            detail::Process proc;
            proc.sc = &sc;
            proc.x = detail::initial_state(rng, trial, n, spec.model);
            proc.x0 = proc.x;
            proc.ext_cache = detail::Vec::Zero(n);
            proc.refresh_latent(spec.model, mode.quantize_sync);
            detail::Vec noise(n), g(n);
            const long n_epochs = plan.total_steps / plan.steps_per_epoch;

            for (std::int64_t step = 0; step < plan.total_steps; ++step) {
                const double t = static_cast<double>(step) * plan.dt;
                const double beta = spec.schedule.beta(t);
                detail::fill_step_noise(rng, trial, step, noise, 0, n);
                if (spec.accumulate_gradients && !proc.monolithic()) {
                    const double gap =
                        proc.ext_gradient_gap(spec.model, spec.kuramoto, t).squaredNorm();
                    proc.epoch_grad_err += gap * plan.du;
                }
                proc.gradient(spec.model, spec.kuramoto, t, g);
                em_step(std::span<double>(proc.x.data(), n),
                        std::span<const double>(g.data(), n), beta, plan.du,
                        std::span<const double>(noise.data(), n),
                        spec.model == ModelKind::linear, step);

                if ((step + 1) % plan.steps_per_epoch == 0) {
                    const long epoch = (step + 1) / plan.steps_per_epoch;
                    const double tb = static_cast<double>(step + 1) * plan.dt;
                    const SpinConfig s = detail::state_to_spins(proc.x, spec.model);
                    const double e = energy(inst, s);
                    const double c = maxcut ? cut_value(inst, s)
                                            : std::numeric_limits<double>::quiet_NaN();
                    if (e < log.best_energy) {
                        log.best_energy = e;
                        log.best_config = s;
                        log.best_cut = c;
                        log.best_t = tb;
                    }
                    if (epoch % spec.log_every == 0 || epoch == n_epochs) {
                        BoundaryRecord rec;
                        rec.t = tb;
                        rec.epoch = epoch;
                        rec.energy = e;
                        rec.cut = c;
                        rec.state_overlap = proc.x.sum();
                        if (spec.accumulate_gradients) {
                            rec.grad_err_sq = proc.epoch_grad_err;
                            rec.ext_grad_l1 =
                                proc.monolithic()
                                    ? 0.0
                                    : proc.ext_gradient_gap(spec.model, spec.kuramoto, tb)
                                          .lpNorm<1>();
                        }
                        if (pack) {
                            rec.config = s.packed();
                            rec.has_config = true;
                        }
                        log.records.push_back(rec);
                    }
                    proc.cum_grad_err += proc.epoch_grad_err;
                    proc.epoch_grad_err = 0.0;
                    if (mode.kind != ExecKind::monolithic)
                        proc.refresh_latent(spec.model, mode.quantize_sync);
                }
            }
            logs[trial] = std::move(log);
        } catch (const numerical_error& e) {
            throw numerical_error("trial " + std::to_string(trial) + ": " + e.what());
        }
    });
    return logs;
}

/// Ideal machine: all interactions live. Equivalent to a b=1 concurrent run;
/// mode.tau only sets the logging cadence.
inline EpochLogs run_monolithic(const ProblemInstance& inst, const ExecMode& mode,
                                const RunSpec& spec) {
    ExecMode m = mode;
    m.kind = ExecKind::monolithic;
    if (m.tau <= 0.0) m.tau = spec.t_total;
    return run_concurrent(inst, make_contiguous_partition(inst.n, 1), m, spec);
}

// ---- serial (block Gibbs style round robin) ----------------------------------------

inline EpochLogs run_serial(const ProblemInstance& inst, const Partition& partition,
                            const ExecMode& mode, const RunSpec& spec) {
    spec.validate();
    if (mode.tau <= 0.0) throw usage_error("run_serial: tau must be positive");
    const auto plan = detail::make_plan(spec, mode.tau);
    const int n = inst.n;
    const int b = partition.b();
    const bool maxcut = !inst.has_field();
    const bool pack = n <= 63;
    const CounterRng rng(spec.seed);
    // row-major J gives the active block's rows directly; frozen values live in
    // the state vector itself, so no internal/external split is needed here
    const SparseSym& J = inst.couplings;

    // contiguous spans per block for noise addressing
    std::vector<std::pair<int, int>> span(b);
    for (int bi = 0; bi < b; ++bi) {
        auto [lo, hi] = std::minmax_element(partition.blocks[bi].begin(),
                                            partition.blocks[bi].end());
        span[bi] = {*lo, *hi + 1};
    }

    EpochLogs logs(spec.trials);
    detail::parallel_trials(spec.trials, spec.workers, [&](int trial) {
        try {
            EpochLog log;
            log.trial = trial;
            detail::Vec z = detail::initial_state(rng, trial, n, spec.model);
            detail::Vec noise(n), g(n);
            const long n_epochs = plan.total_steps / plan.steps_per_epoch;

            std::vector<int> order(b);
            std::iota(order.begin(), order.end(), 0);
            long shuffled_sweep = -1;
            for (std::int64_t step = 0; step < plan.total_steps; ++step) {
                const long epoch = step / plan.steps_per_epoch;
                if (spec.serial_random_order && epoch / b != shuffled_sweep) {
                    shuffled_sweep = epoch / b;
                    for (int i = b - 1; i > 0; --i) {
                        const auto j = rng.uniform_index(RngContext::misc, trial,
                                                         shuffled_sweep, i, i + 1);
                        std::swap(order[i], order[j]);
                    }
                }
                const int active = order[static_cast<int>(epoch % b)];
                const double t = static_cast<double>(step) * plan.dt;
                const double beta = spec.schedule.beta(t);
                detail::fill_step_noise(rng, trial, step, noise, span[active].first,
                                        span[active].second);
                const double kj = spec.kuramoto.kj.at(t), ks = spec.kuramoto.ks.at(t);
                const double sigma = std::sqrt(2.0 * plan.du / beta);
                for (int i : partition.blocks[active]) {
                    double acc = 0.0;
                    if (spec.model == ModelKind::linear) {
                        for (SparseSym::InnerIterator it(J, i); it; ++it)
                            acc += it.value() * z[it.col()];
                    } else {
                        for (SparseSym::InnerIterator it(J, i); it; ++it)
                            acc -= it.value() * std::sin(z[i] - z[it.col()]);
                        acc = kj * acc + ks * std::sin(2.0 * z[i]);
                    }
                    if (!std::isfinite(acc) || !std::isfinite(noise[i]))
                        throw numerical_error("run_serial: non-finite update at step " +
                                              std::to_string(step));
                    double v = z[i] + acc * plan.du + sigma * noise[i];
                    if (spec.model == ModelKind::linear) v = std::clamp(v, -1.0, 1.0);
                    z[i] = v;
                }

                if ((step + 1) % plan.steps_per_epoch == 0) {
                    const double tb = static_cast<double>(step + 1) * plan.dt;
                    // the finished block is frozen at its 1-bit representation
                    // (b=1 degenerates to a plain monolithic anneal)
                    if (b > 1 && mode.quantize_sync) {
                        for (int i : partition.blocks[active])
                            z[i] = detail::latent_value(z[i] < 0 ? -1 : 1, spec.model);
                    }
                    const SpinConfig s = detail::state_to_spins(z, spec.model);
                    const double e = energy(inst, s);
                    const double c = maxcut ? cut_value(inst, s)
                                            : std::numeric_limits<double>::quiet_NaN();
                    const long ep = epoch + 1;
                    if (e < log.best_energy) {
                        log.best_energy = e;
                        log.best_config = s;
                        log.best_cut = c;
                        log.best_t = tb;
                    }
                    if (ep % spec.log_every == 0 || ep == n_epochs) {
                        BoundaryRecord rec;
                        rec.t = tb;
                        rec.epoch = ep;
                        rec.energy = e;
                        rec.cut = c;
                        rec.state_overlap = z.sum();
                        if (pack) {
                            rec.config = s.packed();
                            rec.has_config = true;
                        }
                        log.records.push_back(rec);
                    }
                }
            }
            logs[trial] = std::move(log);
        } catch (const numerical_error& e) {
            throw numerical_error("trial " + std::to_string(trial) + ": " + e.what());
        }
    });
    return logs;
}

// ---- synchronously coupled runs -----------------------------------------------------

/// Per (process, checkpoint): per-trial quantities needed by the bound
/// functionals and the distribution studies.
struct CoupledCheckpoint {
    double t = 0.0;
    std::vector<std::uint64_t> configs;            // one per trial
    std::vector<double> ext_grad_l1;               // per trial
    std::vector<double> pair_grad_l1;              // per trial (vs the ideal process)
    std::vector<double> grad_err_integral;         // per trial, since epoch start
    std::vector<double> energies;                  // per trial, quantized state
};

struct CoupledRunResult {
    std::vector<std::string> process_names;        // "ideal", then one per partition
    std::vector<int> block_counts;
    std::vector<double> times;
    double tau = 0.0;  // rounded epoch actually used
    // indexed [process][checkpoint]
    std::vector<std::vector<CoupledCheckpoint>> checkpoints;
};

/// Evolve an ideal (all-live) process and one concurrent process per supplied
/// partition, all sharing one Brownian source and one initial state per trial.
/// Latent copies refresh every `tau` seconds; checkpoints record the Bound I/II
/// integrands and quantized configurations.
inline CoupledRunResult run_coupled(const ProblemInstance& inst,
                                    const std::vector<Partition>& partitions, double tau,
                                    const RunSpec& spec,
                                    const std::vector<double>& checkpoint_times,
                                    bool quantize_sync = true) {
    spec.validate();
    if (tau <= 0.0) throw usage_error("run_coupled: tau must be positive");
    if (inst.n > 63) throw capacity_error("run_coupled: distribution studies need n <= 63");
    const auto plan = detail::make_plan(spec, tau);
    const int n = inst.n;
    const CounterRng rng(spec.seed);

    const int nproc = static_cast<int>(partitions.size()) + 1;
    std::vector<SplitCouplings> splits;
    splits.reserve(nproc);
    splits.push_back(split(inst, make_contiguous_partition(n, 1)));  // ideal
    for (const auto& p : partitions) splits.push_back(split(inst, p));

    CoupledRunResult out;
    out.process_names.push_back("ideal");
    out.block_counts.push_back(1);
    for (const auto& p : partitions) {
        out.process_names.push_back("b" + std::to_string(p.b()));
        out.block_counts.push_back(p.b());
    }
    out.tau = static_cast<double>(plan.steps_per_epoch) * plan.dt;

    // checkpoint step indices (deduplicated, ordered)
    std::vector<std::int64_t> cp_steps;
    for (double t : checkpoint_times) {
        const auto s = std::clamp<std::int64_t>(std::llround(t / plan.dt), 0,
                                                plan.total_steps);
        if (cp_steps.empty() || s > cp_steps.back()) cp_steps.push_back(s);
    }
    if (cp_steps.empty()) throw usage_error("run_coupled: no checkpoints");
    const int ncp = static_cast<int>(cp_steps.size());
    out.times.resize(ncp);
    for (int c = 0; c < ncp; ++c) out.times[c] = static_cast<double>(cp_steps[c]) * plan.dt;

    out.checkpoints.assign(nproc, std::vector<CoupledCheckpoint>(ncp));
    for (int p = 0; p < nproc; ++p)
        for (int c = 0; c < ncp; ++c) {
            auto& cp = out.checkpoints[p][c];
            cp.t = out.times[c];
            cp.configs.assign(spec.trials, 0);
            cp.ext_grad_l1.assign(spec.trials, 0.0);
            cp.pair_grad_l1.assign(spec.trials, 0.0);
            cp.grad_err_integral.assign(spec.trials, 0.0);
            cp.energies.assign(spec.trials, 0.0);
        }

    detail::parallel_trials(spec.trials, spec.workers, [&](int trial) {
        try {
            std::vector<detail::Process> procs(nproc);
            const detail::Vec x_init = detail::initial_state(rng, trial, n, spec.model);
            for (int p = 0; p < nproc; ++p) {
                procs[p].sc = &splits[p];
                procs[p].x = x_init;
                procs[p].x0 = x_init;
                procs[p].ext_cache = detail::Vec::Zero(n);
                procs[p].refresh_latent(spec.model, quantize_sync);
            }
            detail::Vec noise(n), g(n);

            int next_cp = 0;
            auto take_checkpoint = [&](std::int64_t step) {
                while (next_cp < ncp && cp_steps[next_cp] == step) {
                    const double t = static_cast<double>(step) * plan.dt;
                    const detail::Vec ideal_grad =
                        procs[0].full_gradient(spec.model, spec.kuramoto, t);
                    for (int p = 0; p < nproc; ++p) {
                        auto& cp = out.checkpoints[p][next_cp];
                        const SpinConfig s = detail::state_to_spins(procs[p].x, spec.model);
                        cp.configs[trial] = s.packed();
                        cp.energies[trial] = energy(inst, s);
                        cp.grad_err_integral[trial] =
                            procs[p].epoch_grad_err;
                        if (!procs[p].monolithic()) {
                            cp.ext_grad_l1[trial] =
                                procs[p].ext_gradient_gap(spec.model, spec.kuramoto, t)
                                    .lpNorm<1>();
                        }
                        if (p > 0) {
                            cp.pair_grad_l1[trial] =
                                (ideal_grad -
                                 procs[p].full_gradient(spec.model, spec.kuramoto, t))
                                    .lpNorm<1>();
                        }
                    }
                    ++next_cp;
                }
            };

            take_checkpoint(0);
            for (std::int64_t step = 0; step < plan.total_steps; ++step) {
                const double t = static_cast<double>(step) * plan.dt;
                const double beta = spec.schedule.beta(t);
                detail::fill_step_noise(rng, trial, step, noise, 0, n);
                for (auto& proc : procs) {
                    if (!proc.monolithic()) {
                        proc.epoch_grad_err +=
                            proc.ext_gradient_gap(spec.model, spec.kuramoto, t).squaredNorm() *
                            plan.du;
                    }
                    proc.gradient(spec.model, spec.kuramoto, t, g);
                    em_step(std::span<double>(proc.x.data(), n),
                            std::span<const double>(g.data(), n), beta, plan.du,
                            std::span<const double>(noise.data(), n),
                            spec.model == ModelKind::linear, step);
                }
                take_checkpoint(step + 1);
                if ((step + 1) % plan.steps_per_epoch == 0 && step + 1 < plan.total_steps) {
                    for (auto& proc : procs) {
                        proc.cum_grad_err += proc.epoch_grad_err;
                        proc.epoch_grad_err = 0.0;
                        if (!proc.monolithic())
                            proc.refresh_latent(spec.model, quantize_sync);
                    }
                }
            }
        } catch (const numerical_error& e) {
            throw numerical_error("trial " + std::to_string(trial) + ": " + e.what());
        }
    });
    return out;
}

}  // namespace pimnet
