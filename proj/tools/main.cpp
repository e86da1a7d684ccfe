// Command-line front end: reproduce the depth studies, overfitting curves,
// oracle reports and Fourier spectra as CSV/JSONL artifact directories.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qhn/experiments.hpp"

namespace {

std::string default_out_dir(const std::string& fallback) {
    const char* env = std::getenv("QHN_OUT_DIR");
    return env && *env ? std::string(env) : fallback;
}

std::vector<int> parse_ansatz_list(const std::vector<std::string>& names) {
    std::vector<int> out;
    for (const std::string& n : names) out.push_back(qhn::ansatz_from_name(n));
    return out;
}

void add_optimizer_flags(CLI::App* cmd, qhn::LbfgsConfig& opt) {
    cmd->add_option("--lbfgs-memory", opt.memory, "L-BFGS history size");
    cmd->add_option("--max-iterations", opt.max_iterations, "iteration cap per restart");
    cmd->add_option("--grad-tolerance", opt.grad_tolerance, "gradient-norm stopping tolerance");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantum hypernetwork trainer for binary neural networks"};
    app.require_subcommand(1);
    app.set_config("--config", "", "read options from an INI/TOML file");

    // --- run ---------------------------------------------------------------
    qhn::ExperimentConfig run_cfg;
    std::vector<std::string> run_ansatz{"product", "layers1", "layers2", "layers3", "layers4"};
    std::string run_task_name = "gaussian-act";
    double run_epsilon = -1.0;  // sentinel: task default
    auto* run = app.add_subcommand("run", "oracle + restart sweeps for one task");
    run->add_option("--task", run_task_name, "gaussian-act | gaussian-act-width | mnist-logreg");
    run->add_option("--ansatz", run_ansatz, "circuits to sweep (product, layers1, ...)");
    run->add_option("--n-optim", run_cfg.n_optim, "independent restarts per ansatz");
    run->add_option("--epsilon", run_epsilon, "success threshold (default per task)");
    run->add_option("--seed", run_cfg.init_seed, "base seed for circuit initializations");
    run->add_option("--dataset-seed", run_cfg.dataset.seed, "dataset generation seed");
    run->add_option("--n-samples", run_cfg.dataset.n_samples, "gaussian dataset size");
    run->add_option("--blue-scale", run_cfg.dataset.blue_scale, "blue-cluster distance factor");
    run->add_option("--per-class", run_cfg.dataset.per_class_cap, "MNIST images kept per class");
    run->add_option("--mnist-images", run_cfg.dataset.images_path, "IDX image file (empty: synthetic)");
    run->add_option("--mnist-labels", run_cfg.dataset.labels_path, "IDX label file (empty: synthetic)");
    run->add_option("--top-k", run_cfg.top_k, "configurations kept in the density report");
    run->add_option("--kde-points", run_cfg.kde_points, "KDE grid resolution");
    run->add_option("--threads", run_cfg.threads, "worker threads");
    run->add_option("--out", run_cfg.out_dir, "output directory (env QHN_OUT_DIR)");
    add_optimizer_flags(run, run_cfg.optimizer);

    // --- overfit -----------------------------------------------------------
    qhn::OverfitConfig over_cfg;
    std::string over_ansatz = "layers1";
    auto* overfit = app.add_subcommand("overfit", "averaged train/validation curves");
    overfit->add_option("--sizes", over_cfg.sizes, "training-set sizes");
    overfit->add_option("--realizations", over_cfg.realizations, "dataset realizations per size");
    overfit->add_option("--iterations", over_cfg.iterations, "circuit training iterations");
    overfit->add_option("--valid-n", over_cfg.valid_n, "validation-set size");
    overfit->add_option("--blue-scale", over_cfg.blue_scale, "blue-cluster distance factor");
    overfit->add_option("--ansatz", over_ansatz, "circuit used for every run");
    overfit->add_option("--dataset-seed", over_cfg.dataset_seed, "base dataset seed");
    overfit->add_option("--seed", over_cfg.init_seed, "base seed for circuit initializations");
    overfit->add_option("--threads", over_cfg.threads, "worker threads");
    overfit->add_option("--out", over_cfg.out_dir, "output directory (env QHN_OUT_DIR)");
    add_optimizer_flags(overfit, over_cfg.optimizer);

    // --- oracle ------------------------------------------------------------
    qhn::ExperimentConfig oracle_cfg;
    std::string oracle_task_name = "gaussian-act";
    std::string oracle_table_path;
    auto* oracle = app.add_subcommand("oracle", "enumerate all configurations and report the optimum");
    oracle->add_option("--task", oracle_task_name, "task to enumerate");
    oracle->add_option("--k", oracle_cfg.top_k, "lowest-cost configurations to keep");
    oracle->add_option("--dataset-seed", oracle_cfg.dataset.seed, "dataset generation seed");
    oracle->add_option("--n-samples", oracle_cfg.dataset.n_samples, "gaussian dataset size");
    oracle->add_option("--blue-scale", oracle_cfg.dataset.blue_scale, "blue-cluster distance factor");
    oracle->add_option("--per-class", oracle_cfg.dataset.per_class_cap, "MNIST images kept per class");
    oracle->add_option("--mnist-images", oracle_cfg.dataset.images_path, "IDX image file");
    oracle->add_option("--mnist-labels", oracle_cfg.dataset.labels_path, "IDX label file");
    oracle->add_option("--save-table", oracle_table_path, "write the cost table cache here");
    oracle->add_option("--threads", oracle_cfg.threads, "worker threads");
    oracle->add_option("--out", oracle_cfg.out_dir, "output directory (env QHN_OUT_DIR)");

    // --- spectrum ----------------------------------------------------------
    qhn::ExperimentConfig spectrum_cfg;
    std::string spectrum_task_name = "gaussian-act";
    auto* spectrum = app.add_subcommand("spectrum", "Fourier weight spectrum W(S) of the cost");
    spectrum->add_option("--task", spectrum_task_name, "task to analyze");
    spectrum->add_option("--dataset-seed", spectrum_cfg.dataset.seed, "dataset generation seed");
    spectrum->add_option("--n-samples", spectrum_cfg.dataset.n_samples, "gaussian dataset size");
    spectrum->add_option("--blue-scale", spectrum_cfg.dataset.blue_scale, "blue-cluster distance factor");
    spectrum->add_option("--per-class", spectrum_cfg.dataset.per_class_cap, "MNIST images kept per class");
    spectrum->add_option("--mnist-images", spectrum_cfg.dataset.images_path, "IDX image file");
    spectrum->add_option("--mnist-labels", spectrum_cfg.dataset.labels_path, "IDX label file");
    spectrum->add_option("--threads", spectrum_cfg.threads, "worker threads");
    spectrum->add_option("--out", spectrum_cfg.out_dir, "output directory (env QHN_OUT_DIR)");

    // --- dataset -----------------------------------------------------------
    qhn::ExperimentConfig data_cfg;
    std::string data_task_name = "gaussian-act";
    std::string data_csv;
    std::string data_idx_dir;
    int data_n = 500;
    auto* dataset = app.add_subcommand("dataset", "generate/export datasets");
    dataset->add_option("--task", data_task_name, "task whose dataset to build");
    dataset->add_option("--n", data_n, "points to draw (gaussian tasks)");
    dataset->add_option("--dataset-seed", data_cfg.dataset.seed, "generation seed");
    dataset->add_option("--blue-scale", data_cfg.dataset.blue_scale, "blue-cluster distance factor");
    dataset->add_option("--per-class", data_cfg.dataset.per_class_cap, "MNIST images kept per class");
    dataset->add_option("--csv", data_csv, "write the reduced dataset as CSV here");
    dataset->add_option("--write-idx", data_idx_dir,
                        "write synthetic digits as IDX files into this directory");

    // --- rerun -------------------------------------------------------------
    std::string rerun_path;
    std::string rerun_out;
    int rerun_threads = qhn::default_threads();
    auto* rerun = app.add_subcommand("rerun", "re-execute a manifest");
    rerun->add_option("manifest", rerun_path, "path to manifest.json")->required();
    rerun->add_option("--out", rerun_out, "output directory (env QHN_OUT_DIR)")->required(false);
    rerun->add_option("--threads", rerun_threads, "worker threads");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            run_cfg.task = qhn::task_from_name(run_task_name);
            run_cfg.ansatz = parse_ansatz_list(run_ansatz);
            run_cfg.epsilon = run_epsilon > 0.0 ? run_epsilon : qhn::default_epsilon(run_cfg.task);
            if (run_cfg.out_dir.empty()) run_cfg.out_dir = default_out_dir("artifacts-" + run_task_name);
            const auto dir = qhn::run_task(run_cfg);
            std::cout << "artifacts written to " << dir.string() << "\n";
        } else if (overfit->parsed()) {
            over_cfg.ansatz = qhn::ansatz_from_name(over_ansatz);
            if (over_cfg.out_dir.empty()) over_cfg.out_dir = default_out_dir("artifacts-overfit");
            const auto dir = qhn::run_overfitting_study(over_cfg);
            std::cout << "artifacts written to " << dir.string() << "\n";
        } else if (oracle->parsed()) {
            const qhn::Task task = qhn::task_from_name(oracle_task_name);
            const qhn::BinnSpec spec = qhn::spec_for_task(task);
            const qhn::LabeledDataset data = qhn::build_dataset(task, oracle_cfg.dataset);
            const qhn::CostTable table = qhn::build_cost_table(spec, data, oracle_cfg.threads);
            const qhn::OptimumReport rep = qhn::find_optimum(table, spec, oracle_cfg.top_k);
            if (!oracle_table_path.empty())
                qhn::save_cost_table(oracle_table_path, table, data.size(), qhn::spec_hash(spec));
            std::cout << "best index " << rep.best_index << "\nbest cost " << rep.best_cost
                      << "\nactivation " << qhn::activation_name(rep.best.activation) << "\nn_hid "
                      << rep.best.n_hid << "\n";
            if (!oracle_cfg.out_dir.empty()) {
                std::filesystem::create_directories(oracle_cfg.out_dir);
                qhn::CsvWriter csv(std::filesystem::path(oracle_cfg.out_dir) /
                                   "density_of_configurations.csv");
                csv.row({"rank", "index", "cost"});
                for (std::size_t i = 0; i < rep.lowest.size(); ++i)
                    csv.row({std::to_string(i), std::to_string(rep.lowest[i].second),
                             qhn::fmt_double(rep.lowest[i].first)});
            }
        } else if (spectrum->parsed()) {
            const qhn::Task task = qhn::task_from_name(spectrum_task_name);
            const qhn::BinnSpec spec = qhn::spec_for_task(task);
            const qhn::LabeledDataset data = qhn::build_dataset(task, spectrum_cfg.dataset);
            const qhn::CostTable table = qhn::build_cost_table(spec, data, spectrum_cfg.threads);
            const std::vector<double> w = qhn::weight_spectrum(qhn::walsh_transform(table));
            const std::string out = spectrum_cfg.out_dir.empty() ? default_out_dir(".") : spectrum_cfg.out_dir;
            std::filesystem::create_directories(out);
            qhn::write_spectrum_csv(std::filesystem::path(out) / "spectrum.csv", w);
            for (std::size_t s = 0; s < w.size(); ++s) std::cout << s << " " << w[s] << "\n";
        } else if (dataset->parsed()) {
            const qhn::Task task = qhn::task_from_name(data_task_name);
            if (!data_idx_dir.empty()) {
                std::filesystem::create_directories(data_idx_dir);
                auto [imgs, labels] =
                    qhn::synthesize_digits(data_cfg.dataset.per_class_cap, data_cfg.dataset.seed);
                qhn::write_idx_images((std::filesystem::path(data_idx_dir) / "images.idx").string(), imgs);
                qhn::write_idx_labels((std::filesystem::path(data_idx_dir) / "labels.idx").string(), labels);
                std::cout << "IDX files written to " << data_idx_dir << "\n";
            }
            if (!data_csv.empty()) {
                qhn::DatasetConfig dc = data_cfg.dataset;
                dc.n_samples = data_n;
                const qhn::LabeledDataset d = qhn::build_dataset(task, dc);
                qhn::CsvWriter csv(data_csv);
                std::vector<std::string> header;
                for (int c = 0; c < d.dim; ++c) header.push_back("x" + std::to_string(c));
                header.push_back("y");
                csv.row(header);
                for (std::size_t i = 0; i < d.size(); ++i) {
                    std::vector<std::string> cells;
                    for (double v : d.x(i)) cells.push_back(qhn::fmt_double(v));
                    cells.push_back(std::to_string(d.ys[i]));
                    csv.row(cells);
                }
                std::cout << "dataset written to " << data_csv << "\n";
            }
        } else if (rerun->parsed()) {
            if (rerun_out.empty()) rerun_out = default_out_dir("artifacts-rerun");
            const auto dir = qhn::rerun_manifest(rerun_path, rerun_out, rerun_threads);
            std::cout << "artifacts written to " << dir.string() << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
