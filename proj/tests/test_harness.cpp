#include <catch2/catch_amalgamated.hpp>
#include <filesystem>

#include "pimnet/harness.hpp"
#include "pimnet/recipes.hpp"

using namespace pimnet;
namespace fs = std::filesystem;

TEST_CASE("advisor: energy priority is always serial", "[harness]") {
    AdvisorInput in;
    in.priority = AdvisorInput::Priority::energy;
    in.available_sync_frequency = 1e12;
    in.rho_problem = 1.0;
    in.rc = 15.5e-9;
    in.b = 8;
    const auto r = advise(in);
    CHECK(r.decision == ExecKind::serial);
    REQUIRE_FALSE(r.trace.empty());
    CHECK(r.trace[0].find("energy") != std::string::npos);
}

TEST_CASE("advisor: latency with ample bandwidth is concurrent", "[harness]") {
    AdvisorInput in;
    in.priority = AdvisorInput::Priority::latency;
    in.rho_problem = 4.0;
    in.rc = 15.5e-9;                       // needs ~258 MHz
    in.available_sync_frequency = 500e6;
    in.b = 4;
    const auto r = advise(in);
    CHECK(r.decision == ExecKind::concurrent);
}

TEST_CASE("advisor: RC slowdown beyond B falls back to serial", "[harness]") {
    AdvisorInput in;
    in.priority = AdvisorInput::Priority::latency;
    in.rho_problem = 40.0;
    in.rc = 15.5e-9;  // needs ~2.6 GHz natively
    in.available_sync_frequency = 100e6;
    in.b = 4;
    in.rc_adjustable = true;
    in.rc_max = 10 * in.rc;  // slowdown 10 > B=4
    const auto r = advise(in);
    CHECK(r.decision == ExecKind::serial);
    bool saw_slowdown_branch = false;
    for (const auto& line : r.trace)
        if (line.find("slowdown") != std::string::npos) saw_slowdown_branch = true;
    CHECK(saw_slowdown_branch);

    // modest slowdown below B with the constraint met -> concurrent
    in.rc_max = 3 * in.rc;  // needs ~860 MHz... still unmet at 100 MHz
    CHECK(advise(in).decision == ExecKind::serial);
    in.available_sync_frequency = 1e9;
    CHECK(advise(in).decision == ExecKind::concurrent);
}

TEST_CASE("advisor is pure", "[harness]") {
    AdvisorInput in;
    in.priority = AdvisorInput::Priority::latency;
    in.rho_problem = 4.0;
    in.rc = 15.5e-9;
    in.available_sync_frequency = 500e6;
    const auto a = advise(in), b = advise(in);
    CHECK(a.decision == b.decision);
    CHECK(a.trace == b.trace);
}

TEST_CASE("run_experiment writes deterministic csv and manifest", "[harness]") {
    const fs::path dir = fs::temp_directory_path() / "pimnet_harness_test";
    fs::remove_all(dir);
    RunConfig cfg;
    cfg.instance.generator = "lattice";
    cfg.instance.rows = 4;
    cfg.instance.cols = 3;
    cfg.partition.blocks = 4;
    cfg.mode.kind = "concurrent";
    cfg.mode.tau = 2e-9;
    cfg.schedule.kind = "constant";
    cfg.schedule.beta_start = 10.0;
    cfg.run.t_total = 2e-8;
    cfg.run.dt = 1e-12;
    cfg.run.trials = 3;
    cfg.run.seed = 4;
    cfg.output.csv = (dir / "a" / "epochs.csv").string();
    cfg.output.manifest = (dir / "a" / "manifest.json").string();
    cfg.normalize();
    const auto rec1 = run_experiment(cfg);

    cfg.output.csv = (dir / "b" / "epochs.csv").string();
    cfg.output.manifest = (dir / "b" / "manifest.json").string();
    cfg.run.workers = 3;
    const auto rec2 = run_experiment(cfg);

    CHECK(io::read_text(rec1.csv_path) == io::read_text(rec2.csv_path));
    auto m1 = json::parse(io::read_text(rec1.manifest_path));
    auto m2 = json::parse(io::read_text(rec2.manifest_path));
    CHECK(m1["results"] == m2["results"]);
    CHECK(m1["instance"] == m2["instance"]);
    CHECK(m1["instance"]["hash"].get<std::string>().size() == 64);

    const std::string csv = io::read_text(rec1.csv_path);
    CHECK(csv.rfind("trial,t,epoch,energy,cut,grad_err_sq,ext_grad_l1,pair_grad_l1\n", 0) ==
          0);
}

TEST_CASE("emit_plotdata writes requested families and rejects absent ones", "[harness]") {
    SkEnergyResult sk;
    sk.u1_mean = -0.7;
    sk.rows.push_back({"serial", 4, 1e-9, -0.69, 0.01, 0.01});
    const auto j = to_json(sk);
    const fs::path dir = fs::temp_directory_path() / "pimnet_emit_test";
    fs::remove_all(dir);
    const auto written = emit_plotdata(j, dir);
    REQUIRE(written.size() == 1);
    const std::string csv = io::read_text(written[0]);
    CHECK(csv.rfind("tau,mode,B,u_mean,u_se,energy_error\n", 0) == 0);

    try {
        emit_plotdata(j, dir, {"w1-convergence", "ttt"});
        FAIL("expected config_error");
    } catch (const config_error& e) {
        const std::string msg = e.what();
        CHECK(msg.find("w1-convergence") != std::string::npos);
        CHECK(msg.find("ttt") != std::string::npos);
    }
}

TEST_CASE("recipe result json round trips", "[harness]") {
    GsetPerfResult g;
    g.bks["er-0"] = 123.0;
    g.cut_rows.push_back({"er-0", "serial", 4, 1e8, 0.02});
    g.ttt_rows.push_back({1e8, "serial", 4, "er-0", std::nullopt});
    g.ttt_rows.push_back({1e8, "concurrent", 4, "er-0", 1.2e-5});
    g.ett_rows.push_back({1e8, 4e-12, "concurrent", 4, 3.3e-6});
    const auto back = gset_result_from_json(to_json(g));
    CHECK(back.bks.at("er-0") == 123.0);
    CHECK_FALSE(back.ttt_rows[0].ttt_seconds.has_value());
    CHECK(back.ttt_rows[1].ttt_seconds.value() == Catch::Approx(1.2e-5));
    const std::string ttt_csv = emit_ttt_csv(back);
    CHECK(ttt_csv.find("unreachable") != std::string::npos);
    const std::string ett_csv = emit_ett_csv(back);
    CHECK(ett_csv.rfind("frequency_hz,e_bit,mode,B,ett_joules_or_unreachable\n", 0) == 0);
}
