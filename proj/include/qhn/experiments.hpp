#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qhn/binn.hpp"
#include "qhn/datasets.hpp"
#include "qhn/fourier.hpp"
#include "qhn/io.hpp"
#include "qhn/kde.hpp"
#include "qhn/lbfgs.hpp"
#include "qhn/objective.hpp"
#include "qhn/oracle.hpp"
#include "qhn/parallel.hpp"

namespace qhn {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Tasks and ansatz naming.
// ---------------------------------------------------------------------------

enum class Task { gaussian_act, gaussian_act_width, mnist_logreg };

inline std::string task_name(Task t) {
    switch (t) {
        case Task::gaussian_act: return "gaussian-act";
        case Task::gaussian_act_width: return "gaussian-act-width";
        case Task::mnist_logreg: return "mnist-logreg";
    }
    throw std::invalid_argument("unknown task");
}

inline Task task_from_name(const std::string& name) {
    if (name == "gaussian-act") return Task::gaussian_act;
    if (name == "gaussian-act-width") return Task::gaussian_act_width;
    if (name == "mnist-logreg") return Task::mnist_logreg;
    throw std::invalid_argument("unknown task: " + name);
}

inline BinnSpec spec_for_task(Task t) {
    switch (t) {
        case Task::gaussian_act: return BinnSpec::gaussian_act();
        case Task::gaussian_act_width: return BinnSpec::gaussian_act_width();
        case Task::mnist_logreg: return BinnSpec::mnist_logreg();
    }
    throw std::invalid_argument("unknown task");
}

inline double default_epsilon(Task t) { return t == Task::mnist_logreg ? 5e-5 : 0.03; }

// Ansatz depth: 0 is the product circuit, k >= 1 a k-layer circuit.
inline std::string ansatz_name(int n_layers) {
    return n_layers == 0 ? "product" : "layers" + std::to_string(n_layers);
}

inline int ansatz_from_name(const std::string& name) {
    if (name == "product") return 0;
    if (name.rfind("layers", 0) == 0) {
        const int k = std::stoi(name.substr(6));
        if (k >= 1) return k;
    }
    throw std::invalid_argument("unknown ansatz: " + name);
}

// ---------------------------------------------------------------------------
// Configuration and manifests.
// ---------------------------------------------------------------------------

struct DatasetConfig {
    // Gaussian tasks.
    int n_samples = 60;
    double blue_scale = 1.0;
    // MNIST task; empty paths select the bundled synthetic digits.
    int per_class_cap = 100;
    std::string images_path;
    std::string labels_path;
    // Shared.
    std::uint64_t seed = 1;
};

struct ExperimentConfig {
    Task task = Task::gaussian_act;
    std::vector<int> ansatz{0, 1, 2, 3, 4};
    int n_optim = 200;
    double epsilon = 0.03;
    std::uint64_t init_seed = 1000;
    LbfgsConfig optimizer;
    DatasetConfig dataset;
    int top_k = 200;
    int kde_points = 512;
    // Execution-only knobs, excluded from the manifest: results do not depend
    // on them.
    int threads = default_threads();
    std::string out_dir;
};

struct OverfitConfig {
    Task task = Task::gaussian_act;
    int ansatz = 1;
    std::vector<int> sizes{2, 4, 6, 8, 1000};
    int realizations = 100;
    int iterations = 50;
    int valid_n = 1000;
    double blue_scale = 0.4;
    int gaussian_extra_samples = 0;  // reserved
    std::uint64_t dataset_seed = 1;
    std::uint64_t init_seed = 2000;
    LbfgsConfig optimizer;
    int threads = default_threads();
    std::string out_dir;
};

inline json optimizer_to_json(const LbfgsConfig& cfg) {
    return json{{"memory", cfg.memory},
                {"c1", cfg.c1},
                {"c2", cfg.c2},
                {"max_iterations", cfg.max_iterations},
                {"grad_tolerance", cfg.grad_tolerance},
                {"max_linesearch", cfg.max_linesearch}};
}

inline LbfgsConfig optimizer_from_json(const json& j) {
    LbfgsConfig cfg;
    cfg.memory = j.at("memory").get<int>();
    cfg.c1 = j.at("c1").get<double>();
    cfg.c2 = j.at("c2").get<double>();
    cfg.max_iterations = j.at("max_iterations").get<int>();
    cfg.grad_tolerance = j.at("grad_tolerance").get<double>();
    cfg.max_linesearch = j.at("max_linesearch").get<int>();
    return cfg;
}

inline json dataset_to_json(Task task, const DatasetConfig& d) {
    json j{{"seed", d.seed}};
    if (task == Task::mnist_logreg) {
        j["kind"] = "mnist";
        j["per_class_cap"] = d.per_class_cap;
        j["images_path"] = d.images_path;
        j["labels_path"] = d.labels_path;
    } else {
        j["kind"] = "gaussian";
        j["n_samples"] = d.n_samples;
        j["blue_scale"] = d.blue_scale;
    }
    return j;
}

inline DatasetConfig dataset_from_json(const json& j) {
    DatasetConfig d;
    d.seed = j.at("seed").get<std::uint64_t>();
    if (j.at("kind") == "mnist") {
        d.per_class_cap = j.at("per_class_cap").get<int>();
        d.images_path = j.at("images_path").get<std::string>();
        d.labels_path = j.at("labels_path").get<std::string>();
    } else {
        d.n_samples = j.at("n_samples").get<int>();
        d.blue_scale = j.at("blue_scale").get<double>();
    }
    return d;
}

inline json manifest_for(const ExperimentConfig& cfg) {
    json ansatz = json::array();
    for (int a : cfg.ansatz) ansatz.push_back(ansatz_name(a));
    return json{{"kind", "run"},
                {"task", task_name(cfg.task)},
                {"ansatz", ansatz},
                {"n_optim", cfg.n_optim},
                {"epsilon", cfg.epsilon},
                {"init_seed", cfg.init_seed},
                {"top_k", cfg.top_k},
                {"kde_points", cfg.kde_points},
                {"optimizer", optimizer_to_json(cfg.optimizer)},
                {"dataset", dataset_to_json(cfg.task, cfg.dataset)}};
}

inline ExperimentConfig experiment_from_manifest(const json& j) {
    ExperimentConfig cfg;
    cfg.task = task_from_name(j.at("task").get<std::string>());
    cfg.ansatz.clear();
    for (const auto& a : j.at("ansatz")) cfg.ansatz.push_back(ansatz_from_name(a.get<std::string>()));
    cfg.n_optim = j.at("n_optim").get<int>();
    cfg.epsilon = j.at("epsilon").get<double>();
    cfg.init_seed = j.at("init_seed").get<std::uint64_t>();
    cfg.top_k = j.at("top_k").get<int>();
    cfg.kde_points = j.at("kde_points").get<int>();
    cfg.optimizer = optimizer_from_json(j.at("optimizer"));
    cfg.dataset = dataset_from_json(j.at("dataset"));
    return cfg;
}

inline json manifest_for(const OverfitConfig& cfg) {
    return json{{"kind", "overfit"},
                {"task", task_name(cfg.task)},
                {"ansatz", ansatz_name(cfg.ansatz)},
                {"sizes", cfg.sizes},
                {"realizations", cfg.realizations},
                {"iterations", cfg.iterations},
                {"valid_n", cfg.valid_n},
                {"blue_scale", cfg.blue_scale},
                {"dataset_seed", cfg.dataset_seed},
                {"init_seed", cfg.init_seed},
                {"optimizer", optimizer_to_json(cfg.optimizer)}};
}

inline OverfitConfig overfit_from_manifest(const json& j) {
    OverfitConfig cfg;
    cfg.task = task_from_name(j.at("task").get<std::string>());
    cfg.ansatz = ansatz_from_name(j.at("ansatz").get<std::string>());
    cfg.sizes = j.at("sizes").get<std::vector<int>>();
    cfg.realizations = j.at("realizations").get<int>();
    cfg.iterations = j.at("iterations").get<int>();
    cfg.valid_n = j.at("valid_n").get<int>();
    cfg.blue_scale = j.at("blue_scale").get<double>();
    cfg.dataset_seed = j.at("dataset_seed").get<std::uint64_t>();
    cfg.init_seed = j.at("init_seed").get<std::uint64_t>();
    cfg.optimizer = optimizer_from_json(j.at("optimizer"));
    return cfg;
}

// ---------------------------------------------------------------------------
// Dataset construction.
// ---------------------------------------------------------------------------

inline LabeledDataset build_dataset(Task task, const DatasetConfig& cfg) {
    if (task == Task::mnist_logreg) {
        if (cfg.images_path.empty() && cfg.labels_path.empty())
            return synthetic_reduced_mnist(cfg.per_class_cap, cfg.seed);
        MnistReductionSpec spec;
        spec.images_path = cfg.images_path;
        spec.labels_path = cfg.labels_path;
        spec.per_class_cap = cfg.per_class_cap;
        spec.seed = cfg.seed;
        return load_reduced_mnist(spec);
    }
    return sample_gaussian_mixture(GaussianMixtureSpec::four_gaussians(cfg.blue_scale), cfg.n_samples,
                                   cfg.seed);
}

// ---------------------------------------------------------------------------
// Record serialization (JSON lines).
// ---------------------------------------------------------------------------

inline json record_to_json(const RunRecord& r) {
    json j{{"seed", r.seed},
           {"initial_energy", r.initial_energy},
           {"final_energy", r.final_energy},
           {"iterations", r.iterations},
           {"termination", termination_name(r.termination)},
           {"theta0", r.theta0},
           {"theta", r.theta}};
    if (!r.trace.empty()) j["trace"] = r.trace;
    return j;
}

inline RunRecord record_from_json(const json& j) {
    RunRecord r;
    r.seed = j.at("seed").get<std::uint64_t>();
    r.initial_energy = j.at("initial_energy").get<double>();
    r.final_energy = j.at("final_energy").get<double>();
    r.iterations = j.at("iterations").get<int>();
    const std::string term = j.at("termination").get<std::string>();
    if (term == "gradient_tolerance") r.termination = Termination::gradient_tolerance;
    else if (term == "max_iterations") r.termination = Termination::max_iterations;
    else if (term == "line_search_failure") r.termination = Termination::line_search_failure;
    else r.termination = Termination::non_finite;
    r.theta0 = j.at("theta0").get<std::vector<double>>();
    r.theta = j.at("theta").get<std::vector<double>>();
    if (j.contains("trace")) r.trace = j.at("trace").get<std::vector<double>>();
    return r;
}

inline void write_records_jsonl(const std::filesystem::path& path, std::span<const RunRecord> records) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    for (const RunRecord& r : records) out << record_to_json(r).dump() << '\n';
}

inline std::vector<RunRecord> read_records_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::vector<RunRecord> records;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        records.push_back(record_from_json(json::parse(line)));
    }
    return records;
}

// ---------------------------------------------------------------------------
// Figure-style experiment: oracle + per-ansatz restart sweeps + statistics.
// ---------------------------------------------------------------------------

inline void write_kde_csv(const std::filesystem::path& path, const KdeEstimate& est) {
    CsvWriter csv(path);
    csv.row({"x", "density"});
    for (std::size_t i = 0; i < est.grid.size(); ++i)
        csv.row({fmt_double(est.grid[i]), fmt_double(est.density[i])});
}

inline void write_spectrum_csv(const std::filesystem::path& path, std::span<const double> w) {
    CsvWriter csv(path);
    csv.row({"S", "W"});
    for (std::size_t s = 0; s < w.size(); ++s) csv.row({std::to_string(s), fmt_double(w[s])});
}

// Per-ansatz sweep base seed; restart r inside the sweep uses base + r.
inline std::uint64_t sweep_seed(std::uint64_t init_seed, std::size_t ansatz_index) {
    return init_seed + 1000000ull * ansatz_index;
}

inline std::filesystem::path run_task(const ExperimentConfig& cfg) {
    const std::filesystem::path dir(cfg.out_dir.empty() ? "artifacts" : cfg.out_dir);
    std::filesystem::create_directories(dir);

    const BinnSpec spec = spec_for_task(cfg.task);
    const LabeledDataset data = build_dataset(cfg.task, cfg.dataset);
    auto table = std::make_shared<const CostTable>(build_cost_table(spec, data, cfg.threads));

    // Oracle report.
    const OptimumReport opt = find_optimum(*table, spec, cfg.top_k);
    {
        json j{{"best_index", opt.best_index},
               {"best_cost", opt.best_cost},
               {"n_qubits", table->n},
               {"dataset_size", data.size()},
               {"activation", activation_name(opt.best.activation)},
               {"n_hid", opt.best.n_hid}};
        write_file(dir / "oracle.json", j.dump(2) + "\n");

        CsvWriter csv(dir / "density_of_configurations.csv");
        csv.row({"rank", "index", "cost"});
        for (std::size_t i = 0; i < opt.lowest.size(); ++i)
            csv.row({std::to_string(i), std::to_string(opt.lowest[i].second),
                     fmt_double(opt.lowest[i].first)});

        std::vector<double> dens(opt.lowest.size());
        for (std::size_t i = 0; i < dens.size(); ++i) dens[i] = opt.lowest[i].first;
        write_kde_csv(dir / "kde_density_of_configurations.csv", kde(dens, kde_grid(dens, cfg.kde_points)));
    }

    // Fourier weight spectrum of the cost operator.
    write_spectrum_csv(dir / "spectrum.csv", weight_spectrum(walsh_transform(*table)));

    // Restart sweeps per ansatz.
    CsvWriter success_csv(dir / "success.csv");
    success_csv.row({"ansatz", "n_runs", "n_success", "p_success"});
    CsvWriter summary_csv(dir / "summary.csv");
    summary_csv.row({"ansatz", "seed", "final_energy", "iterations", "termination", "success"});

    for (std::size_t ai = 0; ai < cfg.ansatz.size(); ++ai) {
        const int layers = cfg.ansatz[ai];
        const CircuitSpec circuit =
            layers == 0 ? CircuitSpec::product(table->n) : CircuitSpec::layered(table->n, layers);
        const ObjectiveContext ctx = ObjectiveContext::exact(circuit, table);
        const std::vector<RunRecord> records =
            restart_sweep(ctx, cfg.n_optim, sweep_seed(cfg.init_seed, ai), cfg.optimizer, cfg.threads);

        const std::string name = ansatz_name(layers);
        write_records_jsonl(dir / ("records_" + name + ".jsonl"), records);

        std::vector<double> finals(records.size());
        for (std::size_t i = 0; i < records.size(); ++i) finals[i] = records[i].final_energy;
        write_kde_csv(dir / ("kde_" + name + ".csv"), kde(finals, kde_grid(finals, cfg.kde_points)));

        const double p = success_probability(records, opt.best_cost, cfg.epsilon);
        int n_success = 0;
        for (const RunRecord& r : records)
            if (r.final_energy - opt.best_cost < cfg.epsilon) ++n_success;
        success_csv.row({name, std::to_string(records.size()), std::to_string(n_success), fmt_double(p)});
        for (const RunRecord& r : records)
            summary_csv.row({name, std::to_string(r.seed), fmt_double(r.final_energy),
                             std::to_string(r.iterations), termination_name(r.termination),
                             (r.final_energy - opt.best_cost < cfg.epsilon) ? "1" : "0"});
    }

    write_file(dir / "manifest.json", manifest_for(cfg).dump(2) + "\n");
    return dir;
}

// ---------------------------------------------------------------------------
// Overfitting study: averaged train/validation E(theta) curves.
// ---------------------------------------------------------------------------

struct OverfitCurves {
    std::vector<double> train;  // E on the training table at every iterate, padded
    std::vector<double> valid;  // same iterates scored on the validation table
};

// Hold the last value so every curve spans [0, iterations].
inline std::vector<double> pad_curve(std::vector<double> v, int iterations) {
    if (v.empty()) throw std::invalid_argument("empty curve");
    while (static_cast<int>(v.size()) < iterations + 1) v.push_back(v.back());
    return v;
}

inline std::uint64_t overfit_train_seed(const OverfitConfig& cfg, std::size_t size_idx, int realization) {
    return cfg.dataset_seed + 100000ull * size_idx + 2ull * static_cast<std::uint64_t>(realization);
}

inline OverfitCurves overfit_realization(const OverfitConfig& cfg, std::size_t size_idx, int realization,
                                         bool with_validation = true) {
    const BinnSpec spec = spec_for_task(cfg.task);
    const GaussianMixtureSpec mix = GaussianMixtureSpec::four_gaussians(cfg.blue_scale);
    const std::uint64_t train_seed = overfit_train_seed(cfg, size_idx, realization);

    const LabeledDataset train = sample_gaussian_mixture(mix, cfg.sizes[size_idx], train_seed);
    auto train_table = std::make_shared<const CostTable>(build_cost_table(spec, train, 1));

    const CircuitSpec circuit = cfg.ansatz == 0 ? CircuitSpec::product(spec.n_qubits())
                                                : CircuitSpec::layered(spec.n_qubits(), cfg.ansatz);
    LbfgsConfig opt = cfg.optimizer;
    opt.max_iterations = cfg.iterations;
    opt.record_trace = true;
    opt.record_iterates = with_validation;

    const std::uint64_t run_seed = cfg.init_seed + 10000ull * size_idx + realization;
    const RunRecord rec =
        minimize(ObjectiveContext::exact(circuit, train_table), random_theta(circuit, run_seed), opt);

    OverfitCurves curves;
    curves.train = pad_curve(rec.trace, cfg.iterations);
    if (with_validation) {
        const LabeledDataset valid = sample_gaussian_mixture(mix, cfg.valid_n, train_seed + 1);
        const CostTable valid_table = build_cost_table(spec, valid, 1);
        curves.valid.reserve(rec.iterates.size());
        for (const auto& theta : rec.iterates)
            curves.valid.push_back(energy_of_state(prepare(circuit, theta), valid_table));
        curves.valid = pad_curve(std::move(curves.valid), cfg.iterations);
    }
    return curves;
}

inline std::filesystem::path run_overfitting_study(const OverfitConfig& cfg) {
    if (cfg.task == Task::mnist_logreg)
        throw std::invalid_argument("overfitting study is defined for the Gaussian tasks");
    const std::filesystem::path dir(cfg.out_dir.empty() ? "artifacts-overfit" : cfg.out_dir);
    std::filesystem::create_directories(dir);

    const int T = cfg.iterations;
    std::vector<std::vector<double>> train_mean(cfg.sizes.size(), std::vector<double>(T + 1, 0.0));
    std::vector<std::vector<double>> valid_mean = train_mean;

    for (std::size_t si = 0; si < cfg.sizes.size(); ++si) {
        std::vector<OverfitCurves> curves(cfg.realizations);
        parallel_for(cfg.realizations, cfg.threads,
                     [&](std::uint64_t r) { curves[r] = overfit_realization(cfg, si, static_cast<int>(r)); });
        for (const OverfitCurves& c : curves)
            for (int t = 0; t <= T; ++t) {
                train_mean[si][t] += c.train[t] / cfg.realizations;
                valid_mean[si][t] += c.valid[t] / cfg.realizations;
            }
    }

    CsvWriter csv(dir / "overfit.csv");
    csv.row({"n_s", "iteration", "train_mean", "valid_mean"});
    for (std::size_t si = 0; si < cfg.sizes.size(); ++si)
        for (int t = 0; t <= T; ++t)
            csv.row({std::to_string(cfg.sizes[si]), std::to_string(t), fmt_double(train_mean[si][t]),
                     fmt_double(valid_mean[si][t])});

    write_file(dir / "manifest.json", manifest_for(cfg).dump(2) + "\n");
    return dir;
}

// ---------------------------------------------------------------------------
// Manifest-driven rerun.
// ---------------------------------------------------------------------------

inline std::filesystem::path rerun_manifest(const std::filesystem::path& manifest_path,
                                            const std::string& out_dir, int threads = default_threads()) {
    const json j = json::parse(read_file(manifest_path));
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "run") {
        ExperimentConfig cfg = experiment_from_manifest(j);
        cfg.out_dir = out_dir;
        cfg.threads = threads;
        return run_task(cfg);
    }
    if (kind == "overfit") {
        OverfitConfig cfg = overfit_from_manifest(j);
        cfg.out_dir = out_dir;
        cfg.threads = threads;
        return run_overfitting_study(cfg);
    }
    throw std::runtime_error("unknown manifest kind: " + kind);
}

}  // namespace qhn
