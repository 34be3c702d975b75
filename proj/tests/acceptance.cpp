// Acceptance gate: eleven checks, one [PASS]/[FAIL] line each, nonzero exit
// on any failure. Tolerances are pinned here, next to the check they guard.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "propkern/propkern.hpp"
#include "support/oracles.hpp"

using namespace propkern;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

int g_failures = 0;

void report(int idx, const char* name, bool ok, const std::string& detail) {
    std::printf("[%s] %2d. %s (%s)\n", ok ? "PASS" : "FAIL", idx, name, detail.c_str());
    if (!ok) ++g_failures;
}

// The two six-node graphs whose t=0 count features are (2,1,3) and (2,2,2).
GraphDatabase figure_pair() {
    Graph a;
    a.n = 6;
    std::vector<Triplet> ea;
    for (const auto& [u, v] : std::vector<std::pair<index_t, index_t>>{
             {0, 1}, {1, 2}, {1, 3}, {0, 4}, {1, 4}, {3, 4}, {3, 5}}) {
        ea.push_back({u, v, 1.0});
        ea.push_back({v, u, 1.0});
    }
    a.adjacency = CsrMatrix::from_triplets(6, std::move(ea));
    a.labels = {0, 0, kUnlabeled, 1, kUnlabeled, kUnlabeled};
    Graph b;
    b.n = 6;
    std::vector<Triplet> eb;
    for (const auto& [u, v] : std::vector<std::pair<index_t, index_t>>{
             {0, 1}, {0, 4}, {2, 4}, {3, 4}, {2, 5}, {3, 5}}) {
        eb.push_back({u, v, 1.0});
        eb.push_back({v, u, 1.0});
    }
    b.adjacency = CsrMatrix::from_triplets(6, std::move(eb));
    b.labels = {kUnlabeled, 1, 0, kUnlabeled, 1, 0};
    return make_database({std::move(a), std::move(b)}, 2);
}

// ---- 1. counting path vs quadratic reference --------------------------------

void criterion_oracle_equivalence() {
    const auto start = Clock::now();
    Rng gen(1001);
    bool all_equal = true;
    for (int rep = 0; rep < 100 && all_equal; ++rep) {
        oracles::RandomDbSpec spec;
        spec.num_graphs = 1 + rep % 10;
        spec.min_nodes = 1;
        spec.max_nodes = 12;
        spec.num_labels = 1 + rep % 4;
        spec.edge_prob = 0.3;
        spec.unlabeled_prob = 0.25 * (rep % 3);
        spec.directed = rep % 5 == 0;
        const auto db = oracles::random_database(spec, gen);

        PKConfig cfg;
        cfg.t_max = rep % 4;
        cfg.w_label = (rep % 2) ? 1e-5 : 1e-3;
        cfg.metric_label = (rep % 2) ? Metric::tv : Metric::hellinger;
        cfg.scheme = (rep / 2) % 2 ? Scheme::label_propagation : Scheme::diffusion;
        Rng hrng(gen());
        const auto hashes =
            draw_label_hashes(db.num_labels, cfg.t_max, cfg.w_label, cfg.metric_label, hrng);
        const auto fast = propagation_kernel(db, cfg, hashes);
        const Matrix slow = kernel_bruteforce(db, cfg, hashes);
        all_equal = oracles::bitwise_equal(fast.values, slow);
    }
    const double elapsed = seconds_since(start);
    char detail[96];
    std::snprintf(detail, sizeof detail, "100 databases, exact equality, %.2fs < 10s", elapsed);
    report(1, "counting path equals quadratic reference", all_equal && elapsed < 10.0, detail);
}

// ---- 2. six-node golden pair -------------------------------------------------

void criterion_golden_pair() {
    const auto db = figure_pair();
    const auto stacked = stack_database(db);
    const Matrix p0 = init_label_distributions(db);
    int good = 0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        Rng rng(seed);
        const HashFunction h = draw_hash(2, 1e-5, Metric::tv, rng);
        const auto bins = apply_hash(h, p0);
        const auto fc = count_features(bins, stacked.graph_of, 2);
        std::vector<index_t> c0, c1;
        for (const auto& [bin, count] : fc.counts[0]) c0.push_back(count);
        for (const auto& [bin, count] : fc.counts[1]) c1.push_back(count);
        std::sort(c0.begin(), c0.end());
        std::sort(c1.begin(), c1.end());
        const Matrix k = contribution(fc);
        if (c0 == std::vector<index_t>{1, 2, 3} && c1 == std::vector<index_t>{2, 2, 2} &&
            k(0, 1) == 12.0)
            ++good;
    }
    char detail[96];
    std::snprintf(detail, sizeof detail,
                  "counts (2,1,3)/(2,2,2), cross value 12: %d/1000 seeds (need 999)", good);
    report(2, "six-node golden pair at t=0", good >= 999, detail);
}

// ---- 3. positive semidefiniteness ---------------------------------------------

void criterion_psd() {
    Rng gen(3003);
    double worst = 0.0;  // most negative eigenvalue relative to trace
    bool ok = true;
    for (int rep = 0; rep < 200; ++rep) {
        Matrix k;
        const int kind = rep % 3;
        if (kind == 0) {
            oracles::RandomDbSpec spec;
            spec.num_graphs = 2 + rep % 29;
            spec.max_nodes = 8;
            spec.num_labels = 1 + rep % 3;
            spec.unlabeled_prob = 0.2;
            const auto db = oracles::random_database(spec, gen);
            PKConfig cfg;
            cfg.t_max = rep % 5;
            cfg.scheme = rep % 2 ? Scheme::label_propagation : Scheme::diffusion;
            cfg.metric_label = rep % 4 < 2 ? Metric::tv : Metric::hellinger;
            cfg.normalize = rep % 7 == 0;
            cfg.seed = static_cast<std::uint64_t>(rep);
            k = propagation_kernel(db, cfg).values;
        } else if (kind == 1) {
            oracles::RandomDbSpec spec;
            spec.num_graphs = 2 + rep % 12;
            spec.max_nodes = 7;
            spec.attr_dim = 1 + rep % 3;
            spec.unlabeled_prob = rep % 4 == 0 ? 1.0 : 0.3;
            const auto db = oracles::random_database(spec, gen);
            P2KConfig cfg;
            cfg.t_max = rep % 4;
            cfg.num_samples = 2 + rep % 7;
            cfg.per_dimension_hash = rep % 2 == 0;
            cfg.metric_attr = rep % 4 < 2 ? Metric::l1 : Metric::l2;
            cfg.seed = static_cast<std::uint64_t>(rep);
            k = p2k(db, cfg).values;
        } else {
            std::vector<GridGraph> grids;
            const int n = 2 + rep % 7;
            for (int i = 0; i < n; ++i) {
                std::vector<int> labels(25);
                for (int& l : labels) l = static_cast<int>(uniform_index(gen, 2));
                grids.push_back(grid_from_labels(labels, 5, 5, 2));
            }
            GridKernelConfig cfg;
            cfg.t_max = rep % 4;
            cfg.filter = filter_matrix(static_cast<GridFilter>(rep % 3));
            cfg.padding = rep % 2 ? Padding::circular : Padding::renormalized_zero;
            cfg.seed = static_cast<std::uint64_t>(rep);
            k = grid_kernel(grids, cfg).values;
        }
        double trace = 0.0;
        for (index_t i = 0; i < k.rows(); ++i) trace += k(i, i);
        const double mineig = oracles::min_eigenvalue_sym(k);
        worst = std::min(worst, mineig / std::max(trace, 1e-300));
        ok = ok && mineig >= -1e-8 * trace;
    }
    char detail[96];
    std::snprintf(detail, sizeof detail, "200 configs, min eig/trace >= -1e-8, worst %.2e", worst);
    report(3, "every Gram matrix is positive semidefinite", ok, detail);
}

// ---- 4. stochasticity over long runs ------------------------------------------

void criterion_stochasticity() {
    Rng gen(4004);
    double worst = 0.0;
    oracles::RandomDbSpec spec;
    spec.num_graphs = 6;
    spec.max_nodes = 10;
    spec.num_labels = 3;
    spec.unlabeled_prob = 0.4;
    const auto db = oracles::random_database(spec, gen);
    const auto stacked = stack_database(db);
    const auto mask = labeled_mask(db);
    const Matrix p0 = init_label_distributions(db);
    Matrix diff = p0, lp = p0;
    for (int step = 0; step < 50; ++step) {
        diff = diffusion_step(stacked.transition, diff);
        lp = label_propagation_step(stacked.transition, std::move(lp), p0, mask);
        for (const Matrix* m : {&diff, &lp})
            for (index_t i = 0; i < m->rows(); ++i) {
                double s = 0.0;
                for (index_t j = 0; j < m->cols(); ++j) s += (*m)(i, j);
                worst = std::max(worst, std::fabs(s - 1.0));
            }
    }
    for (const Padding padding : {Padding::renormalized_zero, Padding::circular}) {
        for (const GridFilter f : {GridFilter::n1_4, GridFilter::n1_8, GridFilter::n2_16}) {
            std::vector<int> labels(42);
            for (int& l : labels) l = static_cast<int>(uniform_index(gen, 3));
            GridGraph g = grid_from_labels(labels, 6, 7, 3);
            const Matrix filter = filter_matrix(f);
            for (int step = 0; step < 50; ++step) {
                g = convolve_step(g, filter, padding);
                for (index_t i = 0; i < g.rows; ++i)
                    for (index_t j = 0; j < g.cols; ++j) {
                        double s = 0.0;
                        for (const Matrix& plane : g.planes) s += plane(i, j);
                        worst = std::max(worst, std::fabs(s - 1.0));
                    }
            }
        }
    }
    char detail[64];
    std::snprintf(detail, sizeof detail, "50 steps, worst |sum-1| = %.2e <= 1e-9", worst);
    report(4, "distributions stay stochastic", worst <= 1e-9, detail);
}

// ---- 5. push-back vs absorbing walk ---------------------------------------------

void criterion_absorbing_equivalence() {
    Rng gen(5005);
    bool ok = true;
    for (int rep = 0; rep < 50 && ok; ++rep) {
        oracles::RandomDbSpec spec;
        spec.num_graphs = 1;
        spec.min_nodes = 2;
        spec.max_nodes = 14;
        spec.num_labels = 2 + rep % 3;
        spec.unlabeled_prob = 0.5;
        const auto db = oracles::random_database(spec, gen);
        const auto stacked = stack_database(db);
        const auto mask = labeled_mask(db);
        const Matrix p0 = init_label_distributions(db);
        const auto absorbing = absorbing_transition(stacked.transition, mask);
        Matrix lp = p0, ab = p0;
        for (int step = 0; step < 8 && ok; ++step) {
            lp = label_propagation_step(stacked.transition, std::move(lp), p0, mask);
            ab = diffusion_step(absorbing, ab);
            Matrix pushed = lp;
            push_back_labels(pushed, p0, mask);
            ok = oracles::bitwise_equal(pushed, ab);
        }
    }
    report(5, "push-back iteration equals the absorbing walk", ok,
           "50 graphs, 8 steps, exact matrix equality");
}

// ---- 6. grid engine vs general engine ---------------------------------------------

void criterion_cross_engine() {
    Rng gen(6006);
    const Matrix filter = filter_matrix(GridFilter::n1_4);
    std::vector<GridGraph> grids;
    std::vector<Graph> graphs;
    for (int i = 0; i < 20; ++i) {
        std::vector<int> labels(256);
        for (int& l : labels) l = static_cast<int>(uniform_index(gen, 2));
        grids.push_back(grid_from_labels(labels, 16, 16, 2));
        graphs.push_back(oracles::grid_neighborhood_graph(labels, 16, 16, filter));
    }
    const auto db = make_database(std::move(graphs), 2);
    GridKernelConfig gcfg;
    gcfg.t_max = 3;
    gcfg.filter = filter;
    gcfg.padding = Padding::renormalized_zero;
    PKConfig pcfg;
    pcfg.t_max = 3;
    Rng hrng(61);
    const auto hashes = draw_label_hashes(2, 3, 1e-5, Metric::tv, hrng);
    const auto kg = grid_kernel(grids, gcfg, hashes);
    const auto kp = propagation_kernel(db, pcfg, hashes);
    const double diff = oracles::max_abs_diff(kg.values, kp.values);
    char detail[80];
    std::snprintf(detail, sizeof detail, "20 16x16 grids, max entry diff %.2e <= 1e-8", diff);
    report(6, "grid engine equals the neighborhood-graph engine", diff <= 1e-8, detail);
}

// ---- 7. translation and rotation invariance -----------------------------------------

std::vector<std::int64_t> sorted_raw_bins(const HashFunction& h, const GridGraph& g) {
    const Matrix x = stack_grid_fibers(std::span<const GridGraph>(&g, 1));
    std::vector<std::int64_t> raw = raw_bins(h, x);
    std::sort(raw.begin(), raw.end());
    return raw;
}

void criterion_invariances() {
    Rng gen(7007);
    bool ok = true;
    int checked = 0;
    for (const GridFilter f : {GridFilter::n1_4, GridFilter::n1_8, GridFilter::n2_16}) {
        const Matrix filter = filter_matrix(f);
        for (int rep = 0; rep < 20 && ok; ++rep) {
            const index_t side = 4 + rep % 5;
            const int k = 2 + rep % 2;
            std::vector<int> labels(static_cast<size_t>(side * side));
            for (int& l : labels) l = static_cast<int>(uniform_index(gen, k));

            std::vector<int> moved(labels.size());
            const index_t di = 1 + uniform_index(gen, side - 1);
            const index_t dj = 1 + uniform_index(gen, side - 1);
            for (index_t i = 0; i < side; ++i)
                for (index_t j = 0; j < side; ++j)
                    moved[static_cast<size_t>(((i + di) % side) * side + (j + dj) % side)] =
                        labels[static_cast<size_t>(i * side + j)];
            std::vector<int> rot(labels.size());
            for (index_t i = 0; i < side; ++i)
                for (index_t j = 0; j < side; ++j)
                    rot[static_cast<size_t>(j * side + (side - 1 - i))] =
                        labels[static_cast<size_t>(i * side + j)];

            GridGraph base = grid_from_labels(labels, side, side, k);
            GridGraph shifted = grid_from_labels(moved, side, side, k);
            GridGraph rotated = grid_from_labels(rot, side, side, k);
            GridGraph rot_renorm = rotated, base_renorm = base;

            Rng hrng(static_cast<std::uint64_t>(rep) * 31 + static_cast<std::uint64_t>(f));
            const auto hashes = draw_label_hashes(k, 3, 1e-5, Metric::tv, hrng);
            for (int t = 0; t <= 3 && ok; ++t) {
                const auto& h = hashes[static_cast<size_t>(t)];
                ok = sorted_raw_bins(h, base) == sorted_raw_bins(h, shifted) &&
                     sorted_raw_bins(h, base) == sorted_raw_bins(h, rotated) &&
                     sorted_raw_bins(h, base_renorm) == sorted_raw_bins(h, rot_renorm);
                if (t < 3) {
                    base = convolve_step(base, filter, Padding::circular);
                    shifted = convolve_step(shifted, filter, Padding::circular);
                    rotated = convolve_step(rotated, filter, Padding::circular);
                    base_renorm = convolve_step(base_renorm, filter, Padding::renormalized_zero);
                    rot_renorm = convolve_step(rot_renorm, filter, Padding::renormalized_zero);
                }
                ++checked;
            }
        }
    }
    char detail[96];
    std::snprintf(detail, sizeof detail,
                  "%d iteration checks over 20 grids x 3 filters, count features identical",
                  checked);
    report(7, "translation and 90-degree rotation invariance", ok, detail);
}

// ---- 8. hash collision statistics and metric identities --------------------------------

void criterion_lsh_statistics() {
    const std::vector<double> base{0.25, 0.25, 0.25, 0.25};
    const std::vector<double> near{0.30, 0.20, 0.25, 0.25};  // tv = 0.05
    const std::vector<double> far_a{1.0, 0.0, 0.0, 0.0};
    const std::vector<double> far_b{0.2, 0.8, 0.0, 0.0};     // tv = 0.8
    Rng rng(8008);
    int near_hits = 0, far_hits = 0;
    const int draws = 2000;
    for (int i = 0; i < draws; ++i) {
        const HashFunction h = draw_hash(4, 1.0, Metric::tv, rng);
        near_hits += raw_bin(h, base) == raw_bin(h, near);
        far_hits += raw_bin(h, far_a) == raw_bin(h, far_b);
    }
    const double gap = static_cast<double>(near_hits - far_hits) / draws;

    double worst = 0.0;
    for (int rep = 0; rep < 1000; ++rep) {
        const index_t d = 2 + uniform_index(rng, 5);
        std::vector<double> p(static_cast<size_t>(d)), q(static_cast<size_t>(d));
        double sp = 0.0, sq = 0.0;
        for (index_t i = 0; i < d; ++i) {
            p[static_cast<size_t>(i)] = uniform01(rng) + 1e-6;
            q[static_cast<size_t>(i)] = uniform01(rng) + 1e-6;
            sp += p[static_cast<size_t>(i)];
            sq += q[static_cast<size_t>(i)];
        }
        long double l1 = 0.0L, hell = 0.0L;
        for (index_t i = 0; i < d; ++i) {
            p[static_cast<size_t>(i)] /= sp;
            q[static_cast<size_t>(i)] /= sq;
            l1 += std::fabs(static_cast<long double>(p[static_cast<size_t>(i)]) -
                            static_cast<long double>(q[static_cast<size_t>(i)]));
            const long double dr = std::sqrt(static_cast<long double>(p[static_cast<size_t>(i)])) -
                                   std::sqrt(static_cast<long double>(q[static_cast<size_t>(i)]));
            hell += dr * dr;
        }
        worst = std::max(worst, std::fabs(tv_distance(p, q) - static_cast<double>(0.5L * l1)));
        worst = std::max(worst,
                         std::fabs(hellinger_distance(p, q) -
                                   static_cast<double>(std::sqrt(0.5L * hell))));
    }
    char detail[120];
    std::snprintf(detail, sizeof detail,
                  "collision gap %.3f >= 0.3 (near %.3f, far %.3f); identity error %.1e <= 1e-12",
                  gap, near_hits / static_cast<double>(draws),
                  far_hits / static_cast<double>(draws), worst);
    report(8, "hash collisions track total variation; metric identities", gap >= 0.3 && worst <= 1e-12,
           detail);
}

// ---- 9. density propagation vs materialized powers ---------------------------------------

void criterion_density_recurrence() {
    Rng gen(9009);
    double worst = 0.0;
    for (int rep = 0; rep < 50; ++rep) {
        oracles::RandomDbSpec spec;
        spec.num_graphs = 1;
        spec.min_nodes = 2;
        spec.max_nodes = 20;
        spec.attr_dim = 1 + rep % 3;
        spec.unlabeled_prob = 1.0;
        const auto db = oracles::random_database(spec, gen);
        const auto stacked = stack_database(db);
        const Graph& g = db.graphs[0];

        const Standardized s = standardize_attributes(g.attributes);
        Rng mix(gen());
        const AttributeModel model = fit_mixture(s.z, 1 + rep % 10, mix);
        const Matrix q0 = init_pdf_matrix(s.z, model);

        const int t_max = rep % 6;
        Matrix q = q0;
        for (int t = 0; t < t_max; ++t) q = attribute_step(stacked.transition, q);

        Matrix w = oracles::dense_identity(g.n);
        const Matrix t_dense = oracles::csr_to_dense(stacked.transition);
        for (int t = 0; t < t_max; ++t) w = oracles::dense_matmul(t_dense, w);
        const Matrix want = oracles::dense_matmul(w, q0);
        worst = std::max(worst, oracles::max_abs_diff(q, want));
    }
    char detail[80];
    std::snprintf(detail, sizeof detail, "50 graphs, t <= 5, max diff %.2e <= 1e-10", worst);
    report(9, "density propagation equals materialized walk powers", worst <= 1e-10, detail);
}

// ---- 10. classification gap on structured data ---------------------------------------------

double mean_cv_accuracy(const Matrix& k, const std::vector<int>& classes, std::uint64_t seed) {
    return evaluate(k, classes, 10, 1, 1, seed).mean_accuracy;
}

void criterion_classification_gap() {
    Rng gen(42424242ULL);
    const auto db = oracles::sbm_two_class_database(60, 20, gen);
    std::vector<int> classes;
    for (const Graph& g : db.graphs) classes.push_back(*g.cls);

    double pk_sum = 0.0, labels_sum = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        PKConfig pk_cfg;
        pk_cfg.t_max = 5;
        pk_cfg.seed = seed;
        pk_sum += mean_cv_accuracy(propagation_kernel(db, pk_cfg).values, classes, seed);
        PKConfig l_cfg;
        l_cfg.t_max = 0;
        l_cfg.seed = seed;
        labels_sum += mean_cv_accuracy(propagation_kernel(db, l_cfg).values, classes, seed);
    }
    const double pk_acc = pk_sum / 10.0, labels_acc = labels_sum / 10.0;
    const double gap = (pk_acc - labels_acc) * 100.0;
    char detail[120];
    std::snprintf(detail, sizeof detail,
                  "propagated %.1f%% vs histogram baseline %.1f%%, gap %.1f >= 15 points",
                  pk_acc * 100.0, labels_acc * 100.0, gap);
    report(10, "propagation beats the label histogram baseline", gap >= 15.0, detail);
}

// Optional benchmark check, only when a local copy of the dataset exists.
void optional_benchmark_note() {
    std::vector<std::filesystem::path> candidates;
    if (const char* env = std::getenv("MUTAG_DIR")) candidates.push_back(env);
    candidates.push_back(std::filesystem::path(TESTS_DATA_DIR) / "MUTAG");
    candidates.push_back("/root/data/MUTAG");
    std::filesystem::path found;
    for (const auto& c : candidates)
        if (std::filesystem::is_directory(c)) {
            found = c;
            break;
        }
    if (found.empty()) {
        std::printf("[NOTE]  10. optional external benchmark skipped (no local dataset; "
                    "set MUTAG_DIR to enable)\n");
        return;
    }

    const auto db = load_tu_dataset(found, true);
    std::vector<int> classes;
    for (const Graph& g : db.graphs) classes.push_back(*g.cls);

    // One kernel per t in 0..10 from a single run's per-iteration terms.
    PKConfig cfg;
    cfg.t_max = 10;
    cfg.seed = 1;
    cfg.record_contributions = true;
    const auto run = propagation_kernel(db, cfg);
    std::vector<Matrix> k_of_t;
    Matrix running(run.values.rows(), run.values.cols());
    for (const Matrix& term : run.contributions) {
        add_inplace(running, term);
        k_of_t.push_back(running);
    }

    // Stratified 10-fold; t chosen per fold by accuracy on the training part
    // (leave-one-out within the fold's training graphs).
    const index_t n = db.size();
    std::map<int, std::vector<index_t>> members;
    for (index_t i = 0; i < n; ++i) members[classes[static_cast<size_t>(i)]].push_back(i);
    Rng rng(7);
    std::vector<int> fold_of(static_cast<size_t>(n));
    for (auto& [cls, list] : members) {
        for (size_t i = 0; i + 1 < list.size(); ++i) {
            const size_t j =
                i + static_cast<size_t>(uniform_index(rng, static_cast<index_t>(list.size() - i)));
            std::swap(list[i], list[j]);
        }
        for (size_t i = 0; i < list.size(); ++i)
            fold_of[static_cast<size_t>(list[i])] = static_cast<int>(i) % 10;
    }
    auto nn_class = [&](const Matrix& k, index_t q, const std::vector<index_t>& pool) {
        index_t best = pool[0];
        double best_d = 1e300;
        for (const index_t c : pool) {
            const double d2 = k(q, q) + k(c, c) - 2.0 * k(q, c);
            const double d = std::sqrt(std::max(0.0, d2));
            if (d < best_d || (d == best_d && c < best)) {
                best_d = d;
                best = c;
            }
        }
        return classes[static_cast<size_t>(best)];
    };
    double fold_acc_sum = 0.0;
    for (int fold = 0; fold < 10; ++fold) {
        std::vector<index_t> train, test;
        for (index_t i = 0; i < n; ++i)
            (fold_of[static_cast<size_t>(i)] == fold ? test : train).push_back(i);
        size_t best_t = 0;
        double best_train = -1.0;
        for (size_t t = 0; t < k_of_t.size(); ++t) {
            index_t correct = 0;
            for (const index_t q : train) {
                std::vector<index_t> pool;
                for (const index_t c : train)
                    if (c != q) pool.push_back(c);
                if (nn_class(k_of_t[t], q, pool) == classes[static_cast<size_t>(q)]) ++correct;
            }
            const double acc_t = static_cast<double>(correct) / static_cast<double>(train.size());
            if (acc_t > best_train) {
                best_train = acc_t;
                best_t = t;
            }
        }
        index_t correct = 0;
        for (const index_t q : test)
            if (nn_class(k_of_t[best_t], q, train) == classes[static_cast<size_t>(q)]) ++correct;
        fold_acc_sum += static_cast<double>(correct) / static_cast<double>(test.size());
    }
    const double acc = fold_acc_sum / 10.0;
    std::printf("[%s]  10. optional external benchmark: %.1f%% (need 78%%)\n",
                acc >= 0.78 ? "PASS" : "FAIL", acc * 100.0);
    if (acc < 0.78) ++g_failures;
}

// ---- 11. scaling in the iteration count --------------------------------------------------

void criterion_scaling() {
    Rng gen(111111);
    oracles::RandomDbSpec spec;
    spec.num_graphs = 100;
    spec.min_nodes = 20;
    spec.max_nodes = 50;
    spec.num_labels = 8;
    spec.edge_prob = 0.3;
    const auto db = oracles::random_database(spec, gen);

    auto time_kernel = [&](int t_max) {
        PKConfig cfg;
        cfg.t_max = t_max;
        cfg.seed = 3;
        const auto start = Clock::now();
        const auto k = propagation_kernel(db, cfg);
        if (k.values(0, 0) < 0.0) std::abort();  // keep the run observable
        return seconds_since(start);
    };
    // Base t_max large enough that per-iteration work dominates the fixed
    // database stacking cost; interleaved best-of-five so clock drift hits
    // both measurements alike.
    time_kernel(50);
    time_kernel(100);
    double t_single = 1e300, t_double = 1e300;
    for (int rep = 0; rep < 5; ++rep) {
        t_single = std::min(t_single, time_kernel(50));
        t_double = std::min(t_double, time_kernel(100));
    }
    const double ratio = t_double / t_single;
    char detail[96];
    std::snprintf(detail, sizeof detail,
                  "t_max 50 -> 100: %.1fms -> %.1fms, ratio %.2f in [1.5, 3.5]",
                  t_single * 1e3, t_double * 1e3, ratio);
    report(11, "wall time scales linearly with iterations", ratio >= 1.5 && ratio <= 3.5, detail);
}

}  // namespace

int main() {
    const auto start = Clock::now();
    criterion_oracle_equivalence();
    criterion_golden_pair();
    criterion_psd();
    criterion_stochasticity();
    criterion_absorbing_equivalence();
    criterion_cross_engine();
    criterion_invariances();
    criterion_lsh_statistics();
    criterion_density_recurrence();
    criterion_classification_gap();
    optional_benchmark_note();
    criterion_scaling();
    std::printf("%d/11 criteria passed in %.1fs\n", 11 - g_failures, seconds_since(start));
    return g_failures == 0 ? 0 : 1;
}
