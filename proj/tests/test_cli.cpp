#include "disae/cli/cli.hpp"
#include "disae/model/checkpoint.hpp"

#include "support.hpp"

#include <doctest.h>

#include <nlohmann/json.hpp>

#include <sstream>

using namespace disae;

namespace {

struct Run {
    int code = 0;
    std::string out, err;
};

Run run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    Run r;
    r.code = cli::run_cli(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::size_t count_lines(const std::string& text) { return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')); }

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("usage errors exit with 2 and explain themselves") {
    testing::TempDir dir("cli-usage");
    const std::string out = (dir / "o").string();
    Run r = run({"train", "--data", "no-such-dataset", "--out", out});
    CHECK(r.code == cli::kExitUsage);
    CHECK(r.err.find("no-such-dataset") != std::string::npos);
    r = run({"train", "--out", out});
    CHECK(r.code == cli::kExitUsage);
    r = run({"train", "--data", "A", "--scale", "300", "--set", "nope=1", "--out", out});
    CHECK(r.code == cli::kExitUsage);
    CHECK(r.err.find("nope") != std::string::npos);
    r = run({"gen-data", "Q", "--out", out});
    CHECK(r.code == cli::kExitUsage);
    CHECK(run({"frobnicate"}).code == cli::kExitUsage);
    CHECK(run({}).code == cli::kExitUsage);
    CHECK(run({"--help"}).code == cli::kExitOk);
}

TEST_CASE("overrides: dotted keys, array indices, JSON values and type checks") {
    nlohmann::json doc = {{"lr", 0.001}, {"encoder_hidden", {16, 16}}, {"scheduler", {{"patience", 30}}}, {"name", "x"}};
    cli::apply_overrides(doc, {"lr=0.01", "encoder_hidden.1=8", "scheduler.patience=5", "name=hello"});
    CHECK(doc["lr"] == 0.01);
    CHECK(doc["encoder_hidden"][1] == 8);
    CHECK(doc["scheduler"]["patience"] == 5);
    CHECK(doc["name"] == "hello");
    CHECK_THROWS_AS(cli::apply_overrides(doc, {"missing=1"}), ConfigError);
    CHECK_THROWS_AS(cli::apply_overrides(doc, {"encoder_hidden.5=1"}), ConfigError);
    CHECK_THROWS_AS(cli::apply_overrides(doc, {"lr=fast"}), ConfigError);
    CHECK_THROWS_AS(cli::apply_overrides(doc, {"novalue"}), ConfigError);
}

TEST_CASE("gen-data is byte-identical for the same seed and differs for another") {
    testing::TempDir dir("cli-gen");
    const auto a = dir / "a", b = dir / "b", c = dir / "c";
    REQUIRE(run({"gen-data", "A", "--scale", "500", "--seed", "3", "--out", a.string()}).code == 0);
    REQUIRE(run({"gen-data", "A", "--scale", "500", "--seed", "3", "--out", b.string()}).code == 0);
    REQUIRE(run({"gen-data", "A", "--scale", "500", "--seed", "4", "--out", c.string()}).code == 0);
    CHECK(testing::slurp(a / "A.csv") == testing::slurp(b / "A.csv"));
    CHECK(testing::slurp(a / "A.meta.json") == testing::slurp(b / "A.meta.json"));
    CHECK(testing::slurp(a / "A.csv") != testing::slurp(c / "A.csv"));
    CHECK(count_lines(testing::slurp(a / "A.csv")) == 501);
}

TEST_CASE("train, score, eval and export-latent on a generated file") {
    testing::TempDir dir("cli-flow");
    const std::string data = (dir / "g" / "A.csv").string();
    REQUIRE(run({"gen-data", "A", "--scale", "600", "--out", (dir / "g").string()}).code == 0);

    Run r = run({"train", "--data", data, "--set", "max_epochs=3", "--seed", "5", "--out", (dir / "t").string()});
    REQUIRE(r.code == 0);
    const std::string ckpt = (dir / "t" / "model.ckpt").string();
    CHECK(std::filesystem::exists(ckpt));
    CHECK(count_lines(testing::slurp(dir / "t" / "history.csv")) == 4);
    const auto manifest = nlohmann::json::parse(testing::slurp(dir / "t" / "manifest.json"));
    CHECK(manifest.contains("command"));
    CHECK(model::load_checkpoint(ckpt).trained.model.config().max_epochs == 3);

    // Same seed, same checkpoint bytes.
    REQUIRE(run({"train", "--data", data, "--set", "max_epochs=3", "--seed", "5", "--out", (dir / "t2").string()}).code == 0);
    CHECK(testing::slurp(dir / "t" / "model.ckpt") == testing::slurp(dir / "t2" / "model.ckpt"));

    r = run({"export-latent", "--data", data, "--checkpoint", ckpt, "--out", (dir / "e").string()});
    REQUIRE(r.code == 0);
    const std::string latent = testing::slurp(dir / "e" / "latent.csv");
    CHECK(count_lines(latent) == 601);
    CHECK(latent.rfind("z0,z1,z2,z3,task:", 0) == 0);

    r = run({"export-latent", "--data", data, "--checkpoint", ckpt, "--instances", "0,1", "--out", (dir / "e2").string()});
    REQUIRE(r.code == 0);
    CHECK(count_lines(testing::slurp(dir / "e2" / "latent.csv")) < 601);

    r = run({"score", "--data", data, "--checkpoint", ckpt, "--out", (dir / "s").string()});
    REQUIRE(r.code == 0);
    const auto score = nlohmann::json::parse(testing::slurp(dir / "s" / "score.json"));
    CHECK(std::abs(score["score"].get<double>() - (score["accuracy"].get<double>() - score["variation"].get<double>() -
                                                   score["reconstruction"].get<double>())) < 1e-12);

    r = run({"eval", "--data", data, "--checkpoint", ckpt, "--out", (dir / "v").string()});
    REQUIRE(r.code == 0);
    CHECK(std::filesystem::exists(dir / "v" / "eval.json"));

    testing::spit(dir / "bad.ckpt", "DISAECKP broken");
    r = run({"score", "--data", data, "--checkpoint", (dir / "bad.ckpt").string(), "--out", (dir / "s2").string()});
    CHECK(r.code != 0);
}

TEST_CASE("the output root environment variable sets the default directory") {
    testing::TempDir dir("cli-env");
    ::setenv(cli::kOutputRootEnv, dir.path().c_str(), 1);
    const Run r = run({"gen-data", "B", "--scale", "300"});
    ::unsetenv(cli::kOutputRootEnv);
    REQUIRE(r.code == 0);
    CHECK(std::filesystem::exists(dir / "gen-data" / "B.csv"));
}

}  // TEST_SUITE
