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

// Command-line front end: every subcommand reads a config (file or named
// preset) and writes plot-ready CSV/JSON under --out.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <ssi/ssi.hpp>

#ifndef SSI_PRESET_DIR
#define SSI_PRESET_DIR "presets"
#endif

namespace fs = std::filesystem;
using namespace ssi;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Options {
    std::string config_path;
    std::string preset;
    std::string out = ".";
    std::optional<int> order;
    std::optional<std::size_t> steps;
    std::string z0;
    std::string data;
    std::string model;
    std::string input;
    std::string column;
    bool subtract_mean = false;
};

fs::path preset_dir() {
    if (const char* env = std::getenv("SSI_PRESET_DIR")) return env;
    return SSI_PRESET_DIR;
}

ExperimentConfig resolve_config(const Options& o) {
    if (o.config_path.empty() == o.preset.empty())
        throw ContractViolation("exactly one of --config or --preset is required");
    if (!o.preset.empty()) {
        const fs::path p = preset_dir() / (o.preset + ".json");
        if (!fs::exists(p)) throw ContractViolation("unknown preset '" + o.preset + "' (looked in " + preset_dir().string() + ")");
        return load_config(p);
    }
    return load_config(o.config_path);
}

std::optional<Vector> parse_z0(const std::string& text, Index dof) {
    if (text.empty()) return std::nullopt;
    std::vector<double> vals;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        double v = 0.0;
        if (!detail::parse_number(detail::trim(item), v)) throw ContractViolation("--z0: '" + item + "' is not a number");
        vals.push_back(v);
    }
    if (static_cast<Index>(vals.size()) != 2 * dof)
        throw ContractViolation("--z0 needs " + std::to_string(2 * dof) + " comma-separated values");
    return Eigen::Map<Vector>(vals.data(), static_cast<Index>(vals.size()));
}

class Outputs {
public:
    Outputs(fs::path dir, std::string name) : dir_(std::move(dir)), name_(std::move(name)) {}
    fs::path file(const std::string& suffix) const { return dir_ / (name_ + "_" + suffix); }

private:
    fs::path dir_;
    std::string name_;
};

FlowDataset load_or_generate(const ExperimentConfig& cfg, const Options& o, const Outputs& out) {
    const fs::path path = o.data.empty() ? out.file("dataset.csv") : fs::path(o.data);
    if (fs::exists(path)) {
        auto is = open_input(path);
        return read_dataset(is);
    }
    if (!o.data.empty()) throw IoError("dataset '" + path.string() + "' not found");
    std::cerr << "dataset " << path << " missing; generating it\n";
    auto data = experiment::generate_data(cfg);
    write_file(path, [&](std::ostream& os) { write_dataset(os, data); });
    return data;
}

GpHamiltonianModel load_model(const Options& o, const Outputs& out) {
    const fs::path path = o.model.empty() ? out.file("model.json") : fs::path(o.model);
    return model_from_json(read_json_file(path));
}

json run_summary(const experiment::TrajectoryRun& run) {
    json j = experiment::stats_to_json(run.energy);
    j["steps_taken"] = run.steps_taken;
    j["escaped"] = run.escaped;
    if (run.escaped) j["escape_time"] = run.escape_time;
    return j;
}

void write_run(const experiment::TrajectoryRun& run, const Outputs& out, const std::string& label) {
    write_file(out.file(label + "_trajectory.csv"),
               [&](std::ostream& os) { write_trajectory(os, run.record, run.columns); });
    EnergySeries energy;
    energy.name = "H";
    for (std::size_t k = 0; k < run.record.size(); ++k) energy.t.push_back(run.record.time(k));
    energy.values = run.columns.front().values;
    write_file(out.file(label + "_energy.csv"), [&](std::ostream& os) { write_energy_series(os, energy); });
    write_json(out.file(label + "_stats.json"), run_summary(run));
    std::cout << label << ": steps=" << run.steps_taken << " band=" << sci(run.energy.band())
              << " mean=" << sci(run.energy.mean()) << " slope=" << sci(run.energy.slope());
    if (run.escaped) std::cout << " escaped at t=" << run.escape_time;
    std::cout << '\n';
}

int cmd_gen_data(const Options& o) {
    const auto cfg = resolve_config(o);
    const Outputs out(o.out, cfg.name);
    const auto data = experiment::generate_data(cfg);
    write_file(out.file("dataset.csv"), [&](std::ostream& os) { write_dataset(os, data); });
    std::cout << "dataset: " << data.size() << " rows -> " << out.file("dataset.csv").string() << '\n';
    return 0;
}

int cmd_train(const Options& o) {
    const auto cfg = resolve_config(o);
    const Outputs out(o.out, cfg.name);
    const auto data = load_or_generate(cfg, o, out);
    const auto model = experiment::train_model(cfg, data);
    write_json(out.file("model.json"), model_to_json(model));
    const auto& d = model.diagnostics();
    std::cout << "system: " << d.rows << "x" << d.cols << " rank=" << d.rank << " residual=" << sci(d.residual)
              << " sigma=" << sci(model.sigma()) << '\n';
    for (const auto& w : d.warnings) std::cerr << "warning: " << w << '\n';
    return 0;
}

int cmd_predict(const Options& o) {
    const auto cfg = resolve_config(o);
    const Outputs out(o.out, cfg.name);
    const auto model = load_model(o, out);
    const auto system = make_system(cfg.system);
    const Vector z0 = parse_z0(o.z0, cfg.dof()).value_or(cfg.z0);
    const auto run = experiment::predict(model, PhaseState(z0), o.steps.value_or(cfg.steps), cfg.solver, system.get(),
                                         {cfg.output_stride, cfg.escape_threshold});
    write_run(run, out, "ssi");
    return 0;
}

int cmd_baseline_direct(const Options& o) {
    const auto cfg = resolve_config(o);
    const Outputs out(o.out, cfg.name);
    const auto run = experiment::baseline_direct(cfg, o.steps, parse_z0(o.z0, cfg.dof()));
    write_run(run, out, "direct");
    return 0;
}

int cmd_baseline_flowmap(const Options& o) {
    const auto cfg = resolve_config(o);
    const Outputs out(o.out, cfg.name);
    const auto data = load_or_generate(cfg, o, out);
    const auto fm = experiment::baseline_flowmap(cfg, data, o.steps, parse_z0(o.z0, cfg.dof()));
    write_run(fm.run, out, "flowmap");
    json report = run_summary(fm.run);
    report["kernel"] = {{"k_c", fm.model.params().k_c}, {"e", fm.model.params().e}};
    report["noise"] = fm.model.noise();
    report["log_marginal_likelihood"] = fm.model.log_marginal_likelihood();
    report["max_training_error"] = fm.max_training_error;
    write_json(out.file("flowmap_stats.json"), report);
    std::cout << "flowmap fit: k_c=" << fm.model.params().k_c << " e=" << fm.model.params().e
              << " noise=" << sci(fm.model.noise()) << " max training error=" << sci(fm.max_training_error) << '\n';
    return 0;
}

int cmd_identify(const Options& o) {
    const auto cfg = resolve_config(o);
    const Outputs out(o.out, cfg.name);
    const auto model = load_model(o, out);
    const int top = max_order(model.integrator());
    if (o.order && (*o.order < 0 || *o.order > top))
        throw ContractViolation("--order must lie in [0, " + std::to_string(top) + "] for " + to_string(model.integrator()));
    const auto result = experiment::identify(model, cfg);
    write_file(out.file("identify_mesh.csv"), [&](std::ostream& os) { write_csv(os, result.mesh_table); });
    json report;
    report["integrator"] = to_string(model.integrator());
    report["mesh_points"] = cfg.mesh_points;
    json sig = json::object();
    for (int k = 0; k <= top; ++k) {
        if (o.order && k != *o.order) continue;
        sig[std::to_string(k)] = result.sigma_by_order[static_cast<std::size_t>(k)];
        std::cout << "sigma(H - Htilde^[" << k << "]) = " << sci(result.sigma_by_order[static_cast<std::size_t>(k)]) << '\n';
    }
    report["sigma_by_order"] = sig;
    if (result.potential_table) {
        write_file(out.file("potential.csv"), [&](std::ostream& os) { write_csv(os, *result.potential_table); });
        report["potential_sigma"] = *result.potential_sigma;
        std::cout << "potential sigma = " << sci(*result.potential_sigma) << '\n';
    }
    const fs::path traj_path = o.input.empty() ? out.file("ssi_trajectory.csv") : fs::path(o.input);
    if (fs::exists(traj_path)) {
        auto is = open_input(traj_path);
        const auto traj = read_trajectory(is);
        const auto system = make_system(cfg.system);
        const auto cons = experiment::conservation_along(model, traj, system.get());
        write_file(out.file("conservation.csv"), [&](std::ostream& os) { write_csv(os, cons.table); });
        report["conservation_band_by_order"] = cons.band_by_order;
        report["conservation_variance_by_order"] = cons.variance_by_order;
    } else {
        std::cerr << "no trajectory at " << traj_path << "; skipping conservation table (run predict first)\n";
    }
    write_json(out.file("identify_report.json"), report);
    return 0;
}

int cmd_stats(const Options& o) {
    if (o.input.empty()) throw ContractViolation("stats needs an energy CSV path");
    auto is = open_input(o.input);
    const auto series = read_energy_series(is, o.column);
    const auto s = series_stats(series.t, series.values);
    json j = experiment::stats_to_json(s);
    j["column"] = series.name;
    if (o.subtract_mean) {
        // Files keep raw values; the centred copy is written on request only.
        EnergySeries centred = series;
        centred.name = series.name + "_centred";
        for (double& v : centred.values) v -= s.mean();
        const fs::path dest = fs::path(o.out) / (fs::path(o.input).stem().string() + "_centred.csv");
        write_file(dest, [&](std::ostream& os) { write_energy_series(os, centred); });
        j["centred_file"] = dest.string();
    }
    std::cout << j.dump(2) << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Symplectic shadow integration: learn, integrate and identify Hamiltonians from flow data"};
    app.require_subcommand(1);
    Options o;
    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config_path, "experiment config JSON");
        sub->add_option("--preset", o.preset, "named preset from the preset directory");
        sub->add_option("--out", o.out, "output directory")->capture_default_str();
    };
    auto* gen = app.add_subcommand("gen-data", "generate the Halton/reference-flow training set");
    auto* trn = app.add_subcommand("train", "learn the inverse modified Hamiltonian");
    auto* prd = app.add_subcommand("predict", "integrate the learned Hamiltonian");
    auto* idf = app.add_subcommand("identify", "recover H by backward error analysis");
    auto* sts = app.add_subcommand("stats", "band width, mean and trend of an energy CSV");
    auto* dir = app.add_subcommand("baseline-direct", "integrator applied to the exact Hamiltonian");
    auto* fmp = app.add_subcommand("baseline-flowmap", "GP fitted directly to the flow map");
    for (auto* s : {gen, trn, prd, idf, dir, fmp}) add_common(s);
    for (auto* s : {trn, fmp}) s->add_option("--data", o.data, "dataset CSV (default: <out>/<name>_dataset.csv)");
    for (auto* s : {prd, idf}) s->add_option("--model", o.model, "model JSON (default: <out>/<name>_model.json)");
    for (auto* s : {prd, dir, fmp}) {
        s->add_option("--steps", o.steps, "number of steps (overrides the config)");
        s->add_option("--z0", o.z0, "initial state as a comma list q1,..,p1,..");
    }
    idf->add_option("--order", o.order, "report only this truncation order");
    idf->add_option("--trajectory", o.input, "trajectory CSV for the conservation table");
    sts->add_option("input", o.input, "energy CSV")->required();
    sts->add_option("--column", o.column, "column to summarize (default: last)");
    sts->add_flag("--subtract-mean", o.subtract_mean, "also write the mean-subtracted series to --out");
    sts->add_option("--out", o.out, "directory for the mean-subtracted series");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (gen->parsed()) return cmd_gen_data(o);
        if (trn->parsed()) return cmd_train(o);
        if (prd->parsed()) return cmd_predict(o);
        if (idf->parsed()) return cmd_identify(o);
        if (sts->parsed()) return cmd_stats(o);
        if (dir->parsed()) return cmd_baseline_direct(o);
        if (fmp->parsed()) return cmd_baseline_flowmap(o);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ContractViolation& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const DomainError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
    return kExitConfig;
}
