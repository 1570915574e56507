// Copyright 2026 The dslp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Runs the dslp binary on the files under data/.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "dslp/dslp.hpp"
#include "support/cli_run.hpp"

namespace dslp {
namespace {

namespace fs = std::filesystem;
using io::json;
using testing::CliResult;
using testing::read_text;
using testing::run_cli;

const std::string kData = DSLP_DATA_DIR;

std::string problem(const std::string& name) { return kData + "/problems/" + name; }
std::string family(const std::string& name) { return kData + "/families/" + name; }

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("dslp_cli_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

struct Row {
    double param;
    int id;
    double re, im;
    int am, gm;
};

std::vector<Row> read_csv(const fs::path& path) {
    std::istringstream in(read_text(path));
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "param,branch_id,lambda_re,lambda_im,analytic_mult,geometric_mult");
    std::vector<Row> rows;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        Row r{};
        EXPECT_EQ(std::sscanf(line.c_str(), "%lf,%d,%lf,%lf,%d,%d", &r.param, &r.id, &r.re, &r.im, &r.am, &r.gm), 6) << line;
        rows.push_back(r);
    }
    return rows;
}

TEST(CliEigs, CoefficientFamilySpectrum) {
    const CliResult r = run_cli({"eigs", problem("f0_family_s_minus2.json")});
    ASSERT_EQ(r.code, 0) << r.err;
    const json j = json::parse(r.out);
    ASSERT_EQ(j["eigenvalues"].size(), 2u);
    EXPECT_NEAR(j["eigenvalues"][0]["value"].get<double>(), 0.5, 1e-12);
    EXPECT_NEAR(j["eigenvalues"][1]["value"].get<double>(), 1.0, 1e-12);
    for (const auto& e : j["eigenvalues"]) {
        EXPECT_EQ(e["analytic_mult"], 1);
        EXPECT_EQ(e["geometric_mult"], 1);
    }
}

TEST(CliEigs, DoubleRootMultiplicities) {
    const CliResult r = run_cli({"eigs", problem("double_root_c_minus1_plus_i.json")});
    ASSERT_EQ(r.code, 0) << r.err;
    const json j = json::parse(r.out);
    ASSERT_EQ(j["eigenvalues"].size(), 1u);
    const auto& e = j["eigenvalues"][0];
    EXPECT_LE(std::abs(io::parse_complex(e["value"], "")), 1e-7);
    EXPECT_EQ(e["analytic_mult"], 2);
    EXPECT_EQ(e["geometric_mult"], 1);
}

TEST(CliEigs, InvalidEquationExitsTwoWithPosition) {
    const CliResult r = run_cli({"eigs", problem("invalid_f1_zero.json")});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("InvalidEquation"), std::string::npos) << r.err;
    EXPECT_NE(r.err.find("/f/1"), std::string::npos) << r.err;
}

TEST(CliEigs, MissingFileIsNotAValidationError) {
    const CliResult r = run_cli({"eigs", problem("no_such_file.json")});
    EXPECT_EQ(r.code, 1);
    EXPECT_FALSE(r.err.empty());
}

TEST(CliEigs, UnknownFlagExitsTwo) { EXPECT_EQ(run_cli({"eigs", "--bogus", problem("o14_kink.json")}).code, 2); }

TEST(CliEigs, OracleAgreementOnComplexProblem) {
    const CliResult r = run_cli({"eigs", "--oracle", problem("complex_n6.json")});
    ASSERT_EQ(r.code, 0) << r.out << r.err;
    const json j = json::parse(r.out);
    EXPECT_TRUE(j["oracle"]["pass"].get<bool>());
    EXPECT_LE(j["oracle"]["max_root_discrepancy"].get<double>(), 1e-7);
}

TEST(CliEigs, OracleAgreementOnIllScaledProblem) {
    const CliResult r = run_cli({"eigs", "--oracle", problem("ill_scaled_n12.json")});
    ASSERT_EQ(r.code, 0) << r.out << r.err;
    EXPECT_TRUE(json::parse(r.out)["oracle"]["pass"].get<bool>());
}

// Coefficients spanning ten decades: the pencil eigensolver loses the root near -1.97e8,
// which the transfer route finds (confirmed by sign changes of the determinant evaluated
// in 200-digit arithmetic).
TEST(CliEigs, OracleMismatchExitsThree) {
    const CliResult r = run_cli({"eigs", "--oracle", problem("oracle_mismatch_wide_scale.json")});
    EXPECT_EQ(r.code, 3) << r.err;
    const json j = json::parse(r.out);
    EXPECT_FALSE(j["oracle"]["pass"].get<bool>());
    const double huge = io::parse_complex(j["eigenvalues"][0]["value"], "").real();
    EXPECT_NEAR(huge / -196969015.54725835, 1.0, 1e-9);
}

TEST(CliEigs, CsvFormat) {
    const CliResult r = run_cli({"--format", "csv", "eigs", problem("o14_kink.json")});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream in(r.out);
    std::string header, row;
    std::getline(in, header);
    EXPECT_EQ(header, "lambda_re,lambda_im,analytic_mult,geometric_mult");
    std::getline(in, row);
    double re, im;
    int am, gm;
    ASSERT_EQ(std::sscanf(row.c_str(), "%lf,%lf,%d,%d", &re, &im, &am, &gm), 4);
    EXPECT_NEAR(re, 0.0, 1e-7);
    EXPECT_EQ(am, 2);
    EXPECT_EQ(gm, 2);
}

TEST(CliEigs, RepeatedRunsAreByteIdentical) {
    for (const char* f : {"complex_n6.json", "coupled_n4.json", "f0_family_s_minus2.json"}) {
        const CliResult a = run_cli({"eigs", "--oracle", problem(f)});
        const CliResult b = run_cli({"eigs", "--oracle", problem(f)});
        EXPECT_EQ(a.out, b.out) << f;
    }
}

TEST(CliOracleCompare, ReportsBothRoutes) {
    const CliResult r = run_cli({"oracle-compare", problem("coupled_n4.json")});
    ASSERT_EQ(r.code, 0) << r.out << r.err;
    const json j = json::parse(r.out);
    EXPECT_TRUE(j["pass"].get<bool>());
    EXPECT_EQ(j["transfer"]["eigenvalues"].size(), j["pencil"]["eigenvalues"].size());
}

TEST(CliClassify, CoupledSelfAdjointCondition) {
    const CliResult r = run_cli({"classify", problem("coupled_n4.json")});
    ASSERT_EQ(r.code, 0) << r.err;
    const json j = json::parse(r.out);
    EXPECT_EQ(j["class"], "coupled");
    EXPECT_TRUE(j["self_adjoint"].get<bool>());
    EXPECT_NEAR(j["coupled"]["gamma"].get<double>(), std::numbers::pi / 3.0, 1e-12);
    EXPECT_EQ(j["self_adjoint_count"]["expected_total"], 4 - 2 + j["self_adjoint_count"]["r"].get<int>());
}

TEST(CliClassify, SeparatedCondition) {
    const CliResult r = run_cli({"classify", problem("dirichlet_neumann_fourier.json")});
    ASSERT_EQ(r.code, 0) << r.err;
    const json j = json::parse(r.out);
    EXPECT_EQ(j["class"], "separated");
    EXPECT_EQ(j["chart"]["id"], "N13");
    EXPECT_EQ(j["self_adjoint_count"]["r"], 1);
}

TEST(CliDerivative, SeparatedSlopes) {
    const CliResult r =
        run_cli({"derivative", problem("dirichlet_neumann_fourier.json"), "--lambda", "2", "--tangent", R"({"kind":"separated"})"});
    ASSERT_EQ(r.code, 0) << r.err;
    const json j = json::parse(r.out);
    EXPECT_NEAR(j["d_alpha"].get<double>(), -1.0, 1e-12);
    EXPECT_GT(j["d_beta"].get<double>(), 0.0);
}

TEST(CliDerivative, EquationTangent) {
    const CliResult r = run_cli({"derivative", problem("f0_family_s_minus2.json"), "--lambda", "0.5", "--tangent",
                                 R"({"kind":"equation","h":[0,0,1]})"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(json::parse(r.out)["value"].get<double>(), 0.0);
}

TEST(CliDerivative, ErrorsExitTwo) {
    EXPECT_EQ(run_cli({"derivative", problem("o14_kink.json"), "--lambda", "0", "--tangent",
                       R"({"kind":"bc","chart":"O14","H":[[0,1],[0,0]]})"})
                  .code,
              2);
    EXPECT_EQ(run_cli({"derivative", problem("o14_kink.json"), "--lambda", "x", "--tangent", R"({"kind":"separated"})"}).code,
              2);
    EXPECT_EQ(run_cli({"derivative", problem("o14_kink.json"), "--lambda", "0", "--tangent", R"({"kind":"nope"})"}).code, 2);
    EXPECT_EQ(run_cli({"derivative", problem("o14_kink.json"), "--lambda", "0.3", "--tangent", R"({"kind":"separated"})"}).code,
              2);
}

TEST(CliBranch, SeparatedFamilyMatchesClosedForm) {
    const fs::path dir = scratch("branch_sep");
    const CliResult r = run_cli({"branch", family("separated_pi_alpha.json"), "--out", (dir / "b.csv").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = read_csv(dir / "b.csv");
    // refinement may insert rows between grid points
    EXPECT_GE(rows.size(), 100u);
    for (const auto& row : rows) {
        EXPECT_NEAR(row.re, fixtures::separated_pi_eigenvalue(row.param), 1e-9) << row.param;
        EXPECT_EQ(row.im, 0.0);
    }
}

TEST(CliBranch, WeightFamilyFollowsLowerPiece) {
    const fs::path dir = scratch("branch_w1");
    const CliResult r = run_cli({"branch", family("w1_family.json"), "--out", (dir / "b.csv").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = read_csv(dir / "b.csv");
    EXPECT_GE(rows.size(), 100u);
    for (const auto& row : rows) EXPECT_NEAR(row.re, std::min(1.0, 1.0 / row.param), 1e-9) << row.param;
}

TEST(CliBranch, ZeroDirectionGivesConstantColumn) {
    const fs::path dir = scratch("branch_zero");
    const CliResult r = run_cli({"branch", family("zero_direction.json"), "--out", (dir / "b.csv").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = read_csv(dir / "b.csv");
    ASSERT_EQ(rows.size(), 20u);
    for (const auto& row : rows) EXPECT_EQ(row.re, rows.front().re);
}

// The tracked eigenvalue collides with the constant eigenvalue 0 exactly at a grid point.
TEST(CliBranch, CollisionExitsFourWithPartialCsv) {
    const fs::path dir = scratch("branch_collision");
    const CliResult r = run_cli({"branch", family("complex_collision.json"), "--out", (dir / "b.csv").string()});
    EXPECT_EQ(r.code, 4);
    EXPECT_NE(r.err.find("MatchAmbiguity"), std::string::npos) << r.err;
    const std::string text = read_text(dir / "b.csv");
    EXPECT_NE(text.find("# branch 0 MatchAmbiguity: "), std::string::npos) << text;
    const auto rows = read_csv(dir / "b.csv");
    ASSERT_FALSE(rows.empty());
    EXPECT_EQ(rows.front().param, 0.0);
    EXPECT_LT(rows.back().param, 0.5);
}

TEST(CliBranch, OutputIsDeterministic) {
    const fs::path dir = scratch("branch_det");
    ASSERT_EQ(run_cli({"branch", family("w1_family.json"), "--out", (dir / "a.csv").string()}).code, 0);
    ASSERT_EQ(run_cli({"branch", family("w1_family.json"), "--out", (dir / "b.csv").string()}).code, 0);
    EXPECT_EQ(read_text(dir / "a.csv"), read_text(dir / "b.csv"));
}

TEST(CliExamples, RegeneratesAllFiguresWithinTolerance) {
    const fs::path dir = scratch("examples");
    const CliResult r = run_cli({"examples", "--out-dir", dir.string()});
    ASSERT_EQ(r.code, 0) << r.out << r.err;
    for (int k = 1; k <= 6; ++k) {
        const std::string name = "fig5_" + std::to_string(k);
        EXPECT_TRUE(fs::exists(dir / (name + ".csv"))) << name;
        EXPECT_TRUE(fs::exists(dir / (name + ".reference.json"))) << name;
        EXPECT_NE(r.out.find("PASS " + name + " "), std::string::npos) << r.out;
    }

    // Crossing at s = -1 where lambda = 1 is double.
    bool crossing = false;
    for (const auto& row : read_csv(dir / "fig5_4.csv"))
        if (std::abs(row.param + 1.0) < 1e-12) {
            EXPECT_NEAR(row.re, 1.0, 1e-9);
            EXPECT_EQ(row.am, 2);
            crossing = true;
        }
    EXPECT_TRUE(crossing);

    // Flat zero segment on both sides of the kink at a12 = 2.
    int flat_left = 0, flat_right = 0;
    for (const auto& row : read_csv(dir / "fig5_3.csv")) {
        if (row.param < 2.0 - 1e-9 && row.id == 1) flat_left += std::abs(row.re) < 1e-9;
        if (row.param > 2.0 + 1e-9 && row.id == 0) flat_right += std::abs(row.re) < 1e-9;
    }
    EXPECT_GT(flat_left, 10);
    EXPECT_GT(flat_right, 10);

    // Sidecar references agree with the CSV rows.
    for (int k = 1; k <= 6; ++k) {
        const std::string name = "fig5_" + std::to_string(k);
        const json ref = json::parse(read_text(dir / (name + ".reference.json")));
        const auto rows = read_csv(dir / (name + ".csv"));
        ASSERT_EQ(ref["rows"].size(), rows.size()) << name;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            EXPECT_EQ(ref["rows"][i]["param"].get<double>(), rows[i].param);
            EXPECT_EQ(ref["rows"][i]["branch_id"].get<int>(), rows[i].id);
            EXPECT_NEAR(ref["rows"][i]["reference"].get<double>(), rows[i].re, 1e-9) << name << " row " << i;
        }
    }
}

TEST(CliExamples, RepeatedRunsAreByteIdentical) {
    const fs::path a = scratch("examples_a"), b = scratch("examples_b");
    ASSERT_EQ(run_cli({"examples", "--out-dir", a.string()}).code, 0);
    ASSERT_EQ(run_cli({"examples", "--out-dir", b.string()}).code, 0);
    for (const auto& entry : fs::directory_iterator(a))
        EXPECT_EQ(read_text(entry.path()), read_text(b / entry.path().filename())) << entry.path();
}

}  // namespace
}  // namespace dslp
