#include <catch2/catch_amalgamated.hpp>
#include <filesystem>

#include "pimnet/config.hpp"

using namespace pimnet;
namespace fs = std::filesystem;

namespace {

json minimal_config() {
    return json{{"instance", {{"generator", "lattice"}, {"rows", 4}, {"cols", 3}}},
                {"mode", {{"kind", "concurrent"}, {"frequency_hz", 1e8}}},
                {"partition", {{"blocks", 4}}},
                {"run", {{"t_total", 1e-7}, {"dt", 1e-12}, {"trials", 2}}}};
}

}  // namespace

TEST_CASE("frequency normalizes to a step-aligned tau", "[config]") {
    auto cfg = RunConfig::from_json(minimal_config());
    cfg.normalize();
    CHECK(cfg.mode.frequency_hz == 0.0);
    CHECK(cfg.mode.tau == Catch::Approx(1e-8));
    const double steps = cfg.mode.tau / cfg.run.dt;
    CHECK(steps == Catch::Approx(std::llround(steps)));
}

TEST_CASE("tau and frequency are mutually exclusive", "[config]") {
    auto j = minimal_config();
    j["mode"]["tau"] = 1e-9;
    auto cfg = RunConfig::from_json(j);
    CHECK_THROWS_AS(cfg.normalize(), config_error);
}

TEST_CASE("validation reports field paths", "[config]") {
    auto j = minimal_config();
    j["instance"] = {{"path", "/nonexistent/file.gset"}};
    auto cfg = RunConfig::from_json(j);
    try {
        cfg.normalize();
        FAIL("expected config_error");
    } catch (const config_error& e) {
        CHECK(std::string(e.what()).find("instance.path") != std::string::npos);
    }

    auto j2 = minimal_config();
    j2["run"].erase("t_total");
    CHECK_THROWS_WITH(RunConfig::from_json(j2), Catch::Matchers::ContainsSubstring("run.t_total"));
}

TEST_CASE("load -> normalize -> save -> load is a fixed point", "[config]") {
    const fs::path dir = fs::temp_directory_path() / "pimnet_cfg_test";
    fs::create_directories(dir);
    const fs::path p1 = dir / "a.json", p2 = dir / "b.json";
    io::write_text(p1, minimal_config().dump(2) + "\n");
    auto c1 = load_run_config(p1);
    save_run_config(c1, p2);
    auto c2 = load_run_config(p2);
    CHECK(c1.to_json() == c2.to_json());
    CHECK(io::read_text(p2) == (c2.to_json().dump(2) + "\n"));
}

TEST_CASE("builders produce consistent objects", "[config]") {
    auto cfg = RunConfig::from_json(minimal_config());
    cfg.normalize();
    const auto inst = cfg.build_instance();
    CHECK(inst.n == 12);
    const auto part = cfg.build_partition(inst.n);
    CHECK(part.b() == 4);
    const auto mode = cfg.build_mode();
    CHECK(mode.kind == ExecKind::concurrent);
    const auto spec = cfg.build_run_spec();
    CHECK(spec.t_total == 1e-7);
    CHECK(spec.model == ModelKind::linear);
}

TEST_CASE("unknown enum values are rejected", "[config]") {
    auto j = minimal_config();
    j["mode"]["kind"] = "sideways";
    auto cfg = RunConfig::from_json(j);
    CHECK_THROWS_AS(cfg.validate(), config_error);

    auto j2 = minimal_config();
    j2["instance"] = {{"generator", "mystery"}, {"n", 10}};
    CHECK_THROWS_AS(RunConfig::from_json(j2).validate(), config_error);
}
