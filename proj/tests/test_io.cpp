#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include <json.hpp>

#include "tdbem/block_io.hpp"
#include "tdbem/config.hpp"
#include "tdbem/report.hpp"

using namespace tdbem;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("tdbem_" + name)) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("config defaults and parsing") {
    const ExperimentConfig d = parse_config("");
    CHECK(d.problem == Problem::Dirichlet);
    CHECK(d.levels == 3);
    CHECK(d.observers.size() == 3);

    const ExperimentConfig c = parse_config(
        "# comment\n"
        "problem = acoustic\n"
        "levels = 2   # trailing\n"
        "alpha_inf = 0.25\n"
        "source = 0.2, -0.1, 1.9\n"
        "observers = 1, 2, 3; 4, 5, 6\n"
        "cache_dir = /tmp/blocks\n");
    CHECK(c.problem == Problem::Acoustic);
    CHECK(c.levels == 2);
    CHECK(c.alpha_inf == 0.25);
    CHECK(c.source == Vec3(0.2, -0.1, 1.9));
    REQUIRE(c.observers.size() == 2);
    CHECK(c.observers[1] == Vec3(4, 5, 6));
    CHECK(c.cache_dir == fs::path("/tmp/blocks"));
}

TEST_CASE("config round trips through its echo") {
    ExperimentConfig c;
    c.problem = Problem::Acoustic;
    c.alpha_inf = 0.123456789012345;
    c.horizon = 7.5;
    c.source = Vec3(0.1, 0.2, 2.3);
    c.observers = {{1, 0, 3}, {0.5, 0.25, 0.125}};
    c.output_dir = "somewhere/else";
    std::string text;
    for (const auto& [k, v] : c.to_map()) text += k + " = " + v + "\n";
    const ExperimentConfig r = parse_config(text);
    CHECK(r.to_map() == c.to_map());
    CHECK(r.alpha_inf == c.alpha_inf);
    CHECK(r.observers == c.observers);
}

TEST_CASE("config rejects bad input") {
    CHECK_THROWS_AS(parse_config("unknown_key = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("levels 3\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("levels = three\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("levels = 0\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("problem = neumann\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("source = 1, 2\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("source = 0, 0, -1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("alpha_inf = -0.1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("horizon = 0\n"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/file.cfg"), ConfigError);
}

TEST_CASE("csv round trip") {
    TempDir dir("csv");
    Table t;
    t.name = "demo";
    t.columns = {"a", "b"};
    t.add_row({1.0 / 3.0, -2.5e-17});
    t.add_row({1e300, 0.0});
    write_csv(t, dir.path / "demo.csv");
    const Table r = read_csv(dir.path / "demo.csv");
    CHECK(r.name == "demo");
    CHECK(r.columns == t.columns);
    CHECK(r.rows == t.rows);
    CHECK(r.column("b") == std::vector<double>{-2.5e-17, 0.0});
    CHECK_THROWS(r.column("c"));
    CHECK_THROWS(t.add_row({1.0}));

    Table empty;
    empty.name = "empty";
    empty.columns = {"x", "y", "z"};
    write_csv(empty, dir.path / "empty.csv");
    CHECK(slurp(dir.path / "empty.csv") == "x,y,z\n");
    CHECK(read_csv(dir.path / "empty.csv").rows.empty());
}

TEST_CASE("report writes tables and a manifest") {
    TempDir dir("report");
    Table t;
    t.name = "summary";
    t.columns = {"level", "error"};
    t.add_row({0, 0.5});
    RunManifest m;
    const ExperimentConfig c;
    m.config = c.to_map();
    m.timings["level0"] = 1.25;
    m.metrics["rate"] = 0.9;
    const auto files = emit_report({t}, m, dir.path / "nested");
    REQUIRE(files.size() == 2);
    for (const auto& f : files) CHECK(fs::exists(f));
    const auto j = nlohmann::json::parse(slurp(dir.path / "nested" / "manifest.json"));
    CHECK(j.at("version").get<std::string>() == version_string());
    CHECK(!version_string().empty());
    for (const auto& [k, v] : c.to_map()) CHECK(j.at("config").at(k).get<std::string>() == v);
    CHECK(j.at("timings_s").at("level0").get<double>() == 1.25);
    CHECK(j.at("metrics").at("rate").get<double>() == 0.9);
    CHECK(j.at("tables").at(0).get<std::string>() == "summary.csv");
}

TEST_CASE("block files round trip bit for bit") {
    TempDir dir("blocks");
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    ToeplitzBlocks b;
    b.tag = OperatorTag::Kp;
    b.dt = 0.1234567;
    b.lag_min = -1;
    b.rows = 5;
    b.cols = 3;
    b.row_weight_sigma = 0.75;
    for (int k = 0; k < 4; ++k) {
        Eigen::SparseMatrix<double> s(5, 3);
        if (k != 2)
            for (int i = 0; i < 5; ++i)
                if (u(rng) > 0.0) s.insert(i, (i + k) % 3) = u(rng) * std::pow(10.0, -3 * k);
        s.makeCompressed();
        b.blocks.push_back(s);
    }
    save_blocks(b, dir.path / "b.bin");
    const ToeplitzBlocks r = load_blocks(dir.path / "b.bin");
    CHECK(r.tag == b.tag);
    CHECK(r.dt == b.dt);
    CHECK(r.lag_min == b.lag_min);
    CHECK(r.rows == b.rows);
    CHECK(r.cols == b.cols);
    CHECK(r.row_weight_sigma == b.row_weight_sigma);
    REQUIRE(r.blocks.size() == b.blocks.size());
    for (int k = b.lag_min; k <= b.lag_max(); ++k) {
        CHECK(r.block(k).nonZeros() == b.block(k).nonZeros());
        CHECK((r.dense(k).array() == b.dense(k).array()).all());
    }

    std::ofstream(dir.path / "bad.bin") << "XXXX0000";
    CHECK_THROWS_AS(load_blocks(dir.path / "bad.bin"), AssemblyError);
    const std::string good = slurp(dir.path / "b.bin");
    std::ofstream(dir.path / "short.bin", std::ios::binary) << good.substr(0, good.size() / 2);
    CHECK_THROWS_AS(load_blocks(dir.path / "short.bin"), AssemblyError);
    CHECK_THROWS_AS(load_blocks(dir.path / "missing.bin"), AssemblyError);
}
