/*
 * Copyright 2026 The SSI Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *
 */

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <ssi/ssi.hpp>

namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
};

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("ssi_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    Result run(const std::string& args) const {
        const fs::path log = dir_ / "stdout.txt";
        const std::string cmd = std::string("\"") + SSI_CLI_PATH + "\" " + args + " > \"" + log.string() + "\" 2>&1";
        const int status = std::system(cmd.c_str());
        return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(log)};
    }

    std::string out_flag() const { return " --out \"" + dir_.string() + "\""; }
    fs::path file(const std::string& name) const { return dir_ / name; }

    static std::size_t data_rows(const fs::path& csv) {
        std::ifstream is(csv);
        return ssi::read_csv(is).rows.size();
    }

    fs::path dir_;
};

} // namespace

TEST_F(CliTest, GenDataAndTrainReportProtocolSizes) {
    auto r = run("gen-data --preset pendulum-se" + out_flag());
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("160 rows"), std::string::npos);
    EXPECT_EQ(data_rows(file("pendulum-se_dataset.csv")), 160u);
    r = run("train --preset pendulum-se" + out_flag());
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("system: 321x160"), std::string::npos) << r.out;
    EXPECT_TRUE(fs::exists(file("pendulum-se_model.json")));
}

TEST_F(CliTest, TrainingIsBitReproducible) {
    ASSERT_EQ(run("train --preset pendulum-se" + out_flag()).code, 0);
    const std::string first = slurp(file("pendulum-se_model.json"));
    const std::string data = slurp(file("pendulum-se_dataset.csv"));
    fs::remove(file("pendulum-se_model.json"));
    fs::remove(file("pendulum-se_dataset.csv"));
    ASSERT_EQ(run("train --preset pendulum-se" + out_flag()).code, 0);
    EXPECT_EQ(slurp(file("pendulum-se_dataset.csv")), data);
    EXPECT_EQ(slurp(file("pendulum-se_model.json")), first);
}

TEST_F(CliTest, PredictHonoursStepsAndInitialState) {
    ASSERT_EQ(run("train --preset pendulum-se" + out_flag()).code, 0);
    auto r = run("predict --preset pendulum-se --steps 0" + out_flag());
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_EQ(data_rows(file("pendulum-se_ssi_trajectory.csv")), 1u);
    r = run("predict --preset pendulum-se --steps 25 --z0 0.7,0.1" + out_flag());
    ASSERT_EQ(r.code, 0) << r.out;
    std::ifstream is(file("pendulum-se_ssi_trajectory.csv"));
    const auto traj = ssi::read_trajectory(is);
    ASSERT_EQ(traj.states.size(), 26u);
    EXPECT_EQ(traj.states.front().coords(), Eigen::Vector2d(0.7, 0.1));
    EXPECT_TRUE(fs::exists(file("pendulum-se_ssi_energy.csv")));
    EXPECT_TRUE(fs::exists(file("pendulum-se_ssi_stats.json")));
}

TEST_F(CliTest, IdentifyWritesMeshReportAndConservation) {
    ASSERT_EQ(run("train --preset pendulum-se" + out_flag()).code, 0);
    ASSERT_EQ(run("predict --preset pendulum-se --steps 100" + out_flag()).code, 0);
    auto r = run("identify --preset pendulum-se --order 2" + out_flag());
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("Htilde^[2]"), std::string::npos);
    EXPECT_EQ(r.out.find("Htilde^[1]"), std::string::npos) << "--order restricts the report";
    EXPECT_EQ(data_rows(file("pendulum-se_identify_mesh.csv")), 120u * 120u);
    EXPECT_EQ(data_rows(file("pendulum-se_conservation.csv")), 101u);
    const auto report = ssi::read_json_file(file("pendulum-se_identify_report.json"));
    EXPECT_LT(report["sigma_by_order"]["2"].get<double>(), 3e-3);
    EXPECT_EQ(run("identify --preset pendulum-se --order 3" + out_flag()).code, 2);
}

TEST_F(CliTest, StatsSummarisesAndCentresOnRequest) {
    {
        std::ofstream os(file("e.csv"));
        os << "t,H\n0,1.0\n1,1.5\n2,2.0\n3,2.5\n";
    }
    auto r = run("stats \"" + file("e.csv").string() + "\"");
    ASSERT_EQ(r.code, 0) << r.out;
    const auto j = ssi::json::parse(r.out);
    EXPECT_DOUBLE_EQ(j["band"].get<double>(), 1.5);
    EXPECT_DOUBLE_EQ(j["slope"].get<double>(), 0.5);
    EXPECT_DOUBLE_EQ(j["mean"].get<double>(), 1.75);
    EXPECT_FALSE(fs::exists(file("e_centred.csv"))) << "raw files are never rewritten without the flag";
    r = run("stats \"" + file("e.csv").string() + "\" --subtract-mean" + out_flag());
    ASSERT_EQ(r.code, 0) << r.out;
    std::ifstream is(file("e_centred.csv"));
    const auto centred = ssi::read_energy_series(is);
    EXPECT_EQ(centred.values, (std::vector<double>{-0.75, -0.25, 0.25, 0.75}));
}

TEST_F(CliTest, BaselinesRun) {
    auto r = run("baseline-direct --preset pendulum-se --steps 40" + out_flag());
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_EQ(data_rows(file("pendulum-se_direct_trajectory.csv")), 41u);
    r = run("baseline-flowmap --preset pendulum-se --steps 40" + out_flag());
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_EQ(data_rows(file("pendulum-se_flowmap_trajectory.csv")), 41u);
    const auto report = ssi::read_json_file(file("pendulum-se_flowmap_stats.json"));
    EXPECT_TRUE(report.contains("max_training_error"));
}

TEST_F(CliTest, ConfigFileWorksLikeAPreset) {
    auto cfg = ssi::load_config(fs::path(SSI_PRESET_DIR) / "pendulum-se.json");
    cfg.name = "custom";
    cfg.N = 30;
    ssi::write_json(file("custom.json"), ssi::config_to_json(cfg));
    const auto r = run("train --config \"" + file("custom.json").string() + "\"" + out_flag());
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("system: 61x30"), std::string::npos) << r.out;
}

TEST_F(CliTest, ConfigAndParseErrorsExitWithTwo) {
    EXPECT_EQ(run("").code, 2);
    EXPECT_EQ(run("frobnicate").code, 2);
    EXPECT_EQ(run("train --preset no-such-preset" + out_flag()).code, 2);
    EXPECT_EQ(run("train" + out_flag()).code, 2) << "needs --config or --preset";
    EXPECT_EQ(run("predict --preset pendulum-se --steps many" + out_flag()).code, 2);
    EXPECT_EQ(run("baseline-direct --preset pendulum-se --z0 1,2,3" + out_flag()).code, 2);
    {
        std::ofstream os(file("bad.csv"));
        os << "q1,p1\n0.1,oops\n";
    }
    EXPECT_EQ(run("train --preset pendulum-se --data \"" + file("bad.csv").string() + "\"" + out_flag()).code, 2);
    {
        std::ofstream os(file("bad.json"));
        os << "{\"system\": ";
    }
    EXPECT_EQ(run("gen-data --config \"" + file("bad.json").string() + "\"" + out_flag()).code, 2);
    EXPECT_EQ(run("predict --preset pendulum-se --model \"" + file("missing.json").string() + "\"" + out_flag()).code, 2);
}

TEST_F(CliTest, NumericalFailureExitsWithThree) {
    // The learned field makes the step implicit. One fixed-point sweep with no
    // fallback cannot meet 1e-12.
    auto cfg = ssi::load_config(fs::path(SSI_PRESET_DIR) / "pendulum-se.json");
    cfg.name = "strict";
    cfg.solver.max_iterations = 1;
    cfg.solver.strategy = ssi::SolveStrategy::FixedPoint;
    cfg.solver.stagnation_tolerance = 0.0;
    ssi::write_json(file("strict.json"), ssi::config_to_json(cfg));
    const std::string conf = " --config \"" + file("strict.json").string() + "\"";
    ASSERT_EQ(run("train" + conf + out_flag()).code, 0);
    const auto r = run("predict" + conf + " --steps 5" + out_flag());
    EXPECT_EQ(r.code, 3) << r.out;
    EXPECT_NE(r.out.find("numerical failure"), std::string::npos) << r.out;
}
