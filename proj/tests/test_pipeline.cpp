#include "cdfts/error.hpp"
#include "cdfts/pipeline.hpp"

#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace cdfts;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "cdfts_pipeline_tests";
    fs::create_directories(dir);
    return dir / name;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int cli(const std::string& args) {
    const std::string cmd = std::string(CDFTS_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream(p) << text;
}

} // namespace

TEST_CASE("exit codes map from exception types") {
    CHECK(exit_code_for(ValidationError("x")) == kExitValidation);
    CHECK(exit_code_for(DegenerateDataError("x")) == kExitDegenerate);
    CHECK(exit_code_for(IoError("x")) == kExitIo);
    CHECK(exit_code_for(ParseError("x")) == kExitIo);
    CHECK(exit_code_for(std::runtime_error("x")) == 1);
}

TEST_CASE("config json round trip and validation") {
    PipelineConfig c;
    SynthSpec g;
    g.family = Family::anomaly_2d;
    g.size = 100;
    c.generate = g;
    c.scaler.kind = Scaler::cdfts;
    c.scaler.lambda = 0.3;
    c.algorithm = AlgorithmConfig{Algorithm::lof, 0.05, 5, 2, 0.1};
    const nlohmann::json j = to_json(c);
    const PipelineConfig back = config_from_json(j);
    CHECK(to_json(back) == j);

    nlohmann::json bad = j;
    bad["scaler"]["lambda"] = 0.0;
    try {
        validate(config_from_json(bad));
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("scaler.lambda") != std::string::npos);
    }
    nlohmann::json unknown = j;
    unknown["bogus"] = 1;
    CHECK_THROWS_AS(config_from_json(unknown), ValidationError);

    PipelineConfig none;
    CHECK_THROWS_AS(validate(none), ValidationError);
}

TEST_CASE("run writes every artifact") {
    PipelineConfig c;
    SynthSpec g;
    g.family = Family::anomaly_2d;
    g.size = 120;
    c.generate = g;
    c.scaler.kind = Scaler::cdfts;
    c.scaler.lambda = 0.2;
    c.algorithm = AlgorithmConfig{Algorithm::knn, 0.05, 5, 2, 0.1};
    c.output = {scratch("t.csv"), scratch("r.csv"), scratch("report.json")};
    const nlohmann::json report = run(c);
    CHECK(report.contains("trace"));
    CHECK(report["metric"]["name"] == "auc");
    CHECK(report["n"] == 120);
    CHECK(nlohmann::json::parse(slurp(scratch("report.json"))) == report);
    CHECK(slurp(scratch("r.csv")).rfind("index,score,rank\n", 0) == 0);
    CHECK(load_csv(scratch("t.csv")).size() == 120);

    // Reproducible from the embedded config.
    const nlohmann::json again = run(config_from_json(report["config"]));
    CHECK(again == report);
}

TEST_CASE("dscale distances feed the algorithm") {
    ScaledData sd{make_dataset(Matrix(4, 1, {0, 0.1, 0.2, 1.0})), std::nullopt};
    ScalerConfig s;
    s.kind = Scaler::dscale;
    s.lambda = 0.3;
    const Matrix d = algorithm_distances(sd, s);
    CHECK(d(0, 1) == doctest::Approx(0.25));
    s.kind = Scaler::none;
    CHECK(algorithm_distances(sd, s)(0, 1) == doctest::Approx(0.1));
}

TEST_CASE("jitter is seeded and bounded") {
    const Dataset ds = make_dataset(Matrix(3, 2, 0.5));
    const Dataset a = jitter(ds, 0.01, 4);
    CHECK(a.values == jitter(ds, 0.01, 4).values);
    CHECK_FALSE(a.values == ds.values);
    for (double v : a.values.flat()) {
        CHECK(std::abs(v - 0.5) <= 0.01);
    }
    CHECK(jitter(ds, 0.0, 4).values == ds.values);
}

TEST_CASE("cli: transform on the two-point fixture is the identity") {
    write_text(scratch("two.csv"), "x\n0\n1\n");
    REQUIRE(cli("transform --in " + scratch("two.csv").string() + " --lambda 0.5 --out " +
                scratch("two_out.csv").string() + " --trace " + scratch("two_trace.json").string()) == 0);
    CHECK(slurp(scratch("two_out.csv")) == "x\n0\n1\n");
    const auto trace = nlohmann::json::parse(slurp(scratch("two_trace.json")));
    CHECK(trace["deltas"] == nlohmann::json::array({0.0}));
    CHECK(trace["reason"] == "converged");
}

TEST_CASE("cli: exit codes") {
    write_text(scratch("pts.csv"), "x,y\n0,0\n0.1,0.2\n0.5,0.5\n1,1\n");
    write_text(scratch("dups.csv"), "x\n0.3\n0.3\n0.9\n1\n");
    write_text(scratch("text.csv"), "x\n0.3\nabc\n");
    const std::string out = " --out " + scratch("o.csv").string();
    CHECK(cli("transform --in " + scratch("pts.csv").string() + " --lambda 0" + out) == 2);
    CHECK(cli("transform --in " + scratch("pts.csv").string() + " --lambda 0.3" + out) == 0);
    CHECK(cli("transform --in " + scratch("dups.csv").string() + " --knn-k 1" + out) == 3);
    CHECK(cli("transform --in " + scratch("text.csv").string() + out) == 4);
    CHECK(cli("transform --in /nonexistent.csv" + out) == 4);
    CHECK(cli("transform --bogus") == 2);
    CHECK(cli("detect lof --in " + scratch("dups.csv").string() + " --k-frac 0.2" + out) == 3);
}

TEST_CASE("cli: gen, cluster, eval chain") {
    const std::string data = scratch("gm.csv").string();
    REQUIRE(cli("gen --family gaussian-mixture --n 60 --seed 2 --out " + data) == 0);
    REQUIRE(cli("cluster dbscan --in " + data + " --eps 0.1 --minpts 4 --out " +
                scratch("labels.csv").string() + " --report " + scratch("cl.json").string()) == 0);
    REQUIRE(cli("eval fmeasure --pred " + scratch("labels.csv").string() + " --truth " + data +
                " --out " + scratch("f.json").string()) == 0);
    const auto f = nlohmann::json::parse(slurp(scratch("f.json")));
    const auto cl = nlohmann::json::parse(slurp(scratch("cl.json")));
    CHECK(f["value"] == cl["metric"]["value"]);

    REQUIRE(cli("sweep --in " + data + " --algo dp --scaler rescale --out " +
                scratch("sweep.json").string()) == 0);
    const auto sw = nlohmann::json::parse(slurp(scratch("sweep.json")));
    CHECK(sw["metric"] == "f_measure");
    CHECK(sw["best"]["score"].get<double>() > 0.0);
}
