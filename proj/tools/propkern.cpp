// propkern: propagation-kernel Gram matrices and a small evaluation harness.
//
// Subcommands:
//   compute  label propagation kernel over a TU-format graph database
//   p2k      label+attribute propagation kernel (Gaussian mixture densities)
//   grid     propagation kernel over PGM images via filter convolution
//   mask     unlabel a random fraction of nodes in a TU database
//   eval     stratified k-fold kernel k-NN cross-validation of a Gram matrix
//
// Exit codes: 0 on success, 2 on input errors.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "propkern/propkern.hpp"

namespace fs = std::filesystem;
using namespace propkern;

namespace {

struct ComputeArgs {
    std::string dataset;
    std::string format = "tu";
    Scheme scheme = Scheme::diffusion;
    int tmax = 10;
    double w = 1e-5;
    Metric metric = Metric::tv;
    bool normalize = false;
    std::uint64_t seed = 0;
    std::string out;
    bool degree = false;
    bool symmetrize = false;
    std::string classes_out;

    // p2k extras
    double w_attr = 1.0;
    Metric metric_attr = Metric::l1;
    index_t samples = 100;
};

const std::map<std::string, Metric> kLabelMetrics{{"tv", Metric::tv}, {"h", Metric::hellinger}};
const std::map<std::string, Metric> kAttrMetrics{{"l1", Metric::l1}, {"l2", Metric::l2}};
const std::map<std::string, Scheme> kSchemes{{"diffusion", Scheme::diffusion},
                                             {"labelprop", Scheme::label_propagation}};
const std::map<std::string, GridFilter> kFilters{
    {"n1_4", GridFilter::n1_4}, {"n1_8", GridFilter::n1_8}, {"n2_16", GridFilter::n2_16}};
const std::map<std::string, Padding> kPaddings{{"renorm", Padding::renormalized_zero},
                                               {"circular", Padding::circular}};

void add_common_options(CLI::App* cmd, ComputeArgs& a) {
    cmd->add_option("--dataset", a.dataset, "TU-format dataset directory")->required();
    cmd->add_option("--format", a.format, "dataset format (tu)")
        ->check(CLI::IsMember({"tu"}));
    cmd->add_option("--scheme", a.scheme, "propagation scheme")
        ->transform(CLI::CheckedTransformer(kSchemes));
    cmd->add_option("--tmax", a.tmax, "last propagation iteration (contributions 0..tmax)");
    cmd->add_option("--w", a.w, "label hash bin width");
    cmd->add_option("--metric", a.metric, "label hash metric (tv|h)")
        ->transform(CLI::CheckedTransformer(kLabelMetrics));
    cmd->add_flag("--normalize", a.normalize, "cosine-normalize the Gram matrix");
    cmd->add_option("--seed", a.seed, "random seed");
    cmd->add_option("--out", a.out, "output Gram file")->required();
    cmd->add_flag("--degree-labels", a.degree, "relabel nodes by weighted out-degree");
    cmd->add_flag("--symmetrize", a.symmetrize, "add the reverse of every listed edge");
    cmd->add_option("--classes-out", a.classes_out, "also write graph classes to this file");
}

GraphDatabase load_for_compute(const ComputeArgs& a) {
    GraphDatabase db = load_tu_dataset(a.dataset, a.symmetrize);
    if (a.degree) db = degree_labels(db);
    return db;
}

PKConfig pk_config(const ComputeArgs& a) {
    PKConfig cfg;
    cfg.t_max = a.tmax;
    cfg.w_label = a.w;
    cfg.metric_label = a.metric;
    cfg.scheme = a.scheme;
    cfg.normalize = a.normalize;
    cfg.seed = a.seed;
    return cfg;
}

void finish(const GraphDatabase& db, const KernelMatrix& k, const ComputeArgs& a) {
    write_kernel(k.values, a.out);
    if (!a.classes_out.empty()) write_classes(db, a.classes_out);
    std::printf("wrote %s: n=%lld %s\n", a.out.c_str(),
                static_cast<long long>(k.values.rows()), k.config_echo.c_str());
}

int run_compute(const ComputeArgs& a) {
    const GraphDatabase db = load_for_compute(a);
    finish(db, propagation_kernel(db, pk_config(a)), a);
    return 0;
}

int run_p2k(const ComputeArgs& a) {
    const GraphDatabase db = load_for_compute(a);
    P2KConfig cfg;
    static_cast<PKConfig&>(cfg) = pk_config(a);
    cfg.w_attr = a.w_attr;
    cfg.metric_attr = a.metric_attr;
    cfg.num_samples = a.samples;
    finish(db, p2k(db, cfg), a);
    return 0;
}

int run_grid(const std::string& images, GridFilter filter, Padding padding, int levels,
             const ComputeArgs& a) {
    std::vector<fs::path> files;
    require(fs::is_directory(images), images + " is not a directory");
    for (const auto& entry : fs::directory_iterator(images))
        if (entry.path().extension() == ".pgm") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    require(!files.empty(), images + " holds no .pgm images");

    std::vector<GridGraph> grids;
    grids.reserve(files.size());
    for (const fs::path& f : files) {
        const PgmImage img = load_pgm(f);
        const std::vector<int> labels = quantize_grayscale(img.pixels, levels);
        grids.push_back(grid_from_labels(labels, img.height, img.width, levels));
    }

    GridKernelConfig cfg;
    static_cast<PKConfig&>(cfg) = pk_config(a);
    cfg.filter = filter_matrix(filter);
    cfg.padding = padding;
    const KernelMatrix k = grid_kernel(grids, cfg);
    write_kernel(k.values, a.out);
    std::printf("wrote %s: n=%lld %s filter=%s\n", a.out.c_str(),
                static_cast<long long>(k.values.rows()), k.config_echo.c_str(),
                filter_name(filter));
    return 0;
}

int run_mask(const std::string& dataset, double fraction, std::uint64_t seed,
             const std::string& out) {
    const GraphDatabase db = load_tu_dataset(dataset);
    const GraphDatabase masked = mask_labels(db, fraction, seed);
    write_tu_dataset(masked, out, tu_prefix(dataset));
    std::printf("wrote %s: masked %lld of %lld nodes\n", out.c_str(),
                static_cast<long long>(fraction * static_cast<double>(db.total_nodes())),
                static_cast<long long>(db.total_nodes()));
    return 0;
}

int run_eval(const std::string& kernel_file, const std::string& classes_file, int folds,
             int runs, int knn, std::uint64_t seed) {
    const Matrix k = read_kernel(kernel_file);
    const std::vector<int> classes = read_classes(classes_file);
    const EvalReport report = evaluate(k, classes, folds, runs, knn, seed);
    for (const auto& row : report.rows)
        std::printf("%d,%d,%.6f\n", row.fold, row.run, row.accuracy);
    std::printf("# mean_accuracy=%.6f std_error=%.6f\n", report.mean_accuracy,
                report.std_error);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"propagation-kernel graph similarity"};
    app.require_subcommand(1);

    ComputeArgs ca;
    CLI::App* compute = app.add_subcommand("compute", "label propagation kernel");
    add_common_options(compute, ca);

    ComputeArgs pa;
    CLI::App* p2k_cmd = app.add_subcommand("p2k", "label+attribute propagation kernel");
    add_common_options(p2k_cmd, pa);
    p2k_cmd->add_option("--w-attr", pa.w_attr, "attribute hash bin width");
    p2k_cmd->add_option("--metric-attr", pa.metric_attr, "attribute hash metric (l1|l2)")
        ->transform(CLI::CheckedTransformer(kAttrMetrics));
    p2k_cmd->add_option("--samples", pa.samples, "number of mixture sample points");

    ComputeArgs ga;
    std::string images;
    GridFilter filter = GridFilter::n1_4;
    Padding padding = Padding::renormalized_zero;
    int levels = 2;
    CLI::App* grid = app.add_subcommand("grid", "propagation kernel over PGM images");
    grid->add_option("--images", images, "directory of .pgm images")->required();
    grid->add_option("--filter", filter, "neighborhood filter")
        ->transform(CLI::CheckedTransformer(kFilters));
    grid->add_option("--padding", padding, "padding mode (renorm|circular)")
        ->transform(CLI::CheckedTransformer(kPaddings));
    grid->add_option("--levels", levels, "grayscale quantization levels");
    grid->add_option("--tmax", ga.tmax, "last propagation iteration");
    grid->add_option("--w", ga.w, "label hash bin width");
    grid->add_option("--metric", ga.metric, "label hash metric (tv|h)")
        ->transform(CLI::CheckedTransformer(kLabelMetrics));
    grid->add_flag("--normalize", ga.normalize, "cosine-normalize the Gram matrix");
    grid->add_option("--seed", ga.seed, "random seed");
    grid->add_option("--out", ga.out, "output Gram file")->required();

    std::string mask_dataset, mask_out;
    double fraction = 0.0;
    std::uint64_t mask_seed = 0;
    CLI::App* mask = app.add_subcommand("mask", "unlabel a random fraction of nodes");
    mask->add_option("--dataset", mask_dataset, "TU-format dataset directory")->required();
    mask->add_option("--fraction", fraction, "fraction of nodes to unlabel")->required();
    mask->add_option("--seed", mask_seed, "random seed");
    mask->add_option("--out", mask_out, "output dataset directory")->required();

    std::string kernel_file, classes_file;
    int folds = 10, runs = 10, knn = 1;
    std::uint64_t eval_seed = 0;
    CLI::App* eval_cmd = app.add_subcommand("eval", "kernel k-NN cross-validation");
    eval_cmd->add_option("--kernel", kernel_file, "Gram matrix file")->required();
    eval_cmd->add_option("--classes", classes_file, "graph class file (one per line)")
        ->required();
    eval_cmd->add_option("--folds", folds, "cross-validation folds");
    eval_cmd->add_option("--runs", runs, "restratification runs");
    eval_cmd->add_option("--knn", knn, "neighbors in the vote");
    eval_cmd->add_option("--seed", eval_seed, "random seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*compute) return run_compute(ca);
        if (*p2k_cmd) return run_p2k(pa);
        if (*grid) return run_grid(images, filter, padding, levels, ga);
        if (*mask) return run_mask(mask_dataset, fraction, mask_seed, mask_out);
        if (*eval_cmd) return run_eval(kernel_file, classes_file, folds, runs, knn, eval_seed);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "propkern: %s\n", e.what());
        return 2;
    }
    return 0;
}
