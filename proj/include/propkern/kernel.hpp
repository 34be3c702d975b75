#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "graph.hpp"
#include "lsh.hpp"
#include "matrix.hpp"
#include "propagation.hpp"
#include "random.hpp"

namespace propkern {

struct PKConfig {
    int t_max = 0;                      // iterations 0..t_max all contribute
    double w_label = 1e-5;
    Metric metric_label = Metric::tv;
    Scheme scheme = Scheme::diffusion;
    bool normalize = false;
    std::uint64_t seed = 0;
    std::vector<double> prior;          // empty = uniform over the label alphabet
    bool record_contributions = false;  // keep per-iteration Gram terms for diagnostics
};

// Per-graph sparse bin-count vectors for one iteration.
struct FeatureCounts {
    index_t num_graphs = 0;
    index_t num_bins = 0;
    // counts[g]: (bin, count) pairs sorted by bin; counts sum to the node count of g.
    std::vector<std::vector<std::pair<index_t, index_t>>> counts;
};

inline FeatureCounts count_features(const BinAssignment& bins,
                                    std::span<const index_t> graph_of, index_t num_graphs) {
    require(bins.size() == static_cast<index_t>(graph_of.size()),
            "bin assignment and node map sizes differ");
    FeatureCounts fc;
    fc.num_graphs = num_graphs;
    fc.num_bins = bins.num_bins;
    std::vector<std::unordered_map<index_t, index_t>> acc(static_cast<size_t>(num_graphs));
    for (size_t u = 0; u < graph_of.size(); ++u) {
        const index_t g = graph_of[u];
        require(g >= 0 && g < num_graphs, "node maps to an out-of-range graph");
        ++acc[static_cast<size_t>(g)][bins.bins[u]];
    }
    fc.counts.resize(static_cast<size_t>(num_graphs));
    for (index_t g = 0; g < num_graphs; ++g) {
        auto& dst = fc.counts[static_cast<size_t>(g)];
        dst.assign(acc[static_cast<size_t>(g)].begin(), acc[static_cast<size_t>(g)].end());
        std::sort(dst.begin(), dst.end());
    }
    return fc;
}

// One iteration's Gram term: K_t[i][j] = <phi_i, phi_j> over bin counts.
// Work is sum over bins of (graphs sharing the bin)^2.
inline Matrix contribution(const FeatureCounts& fc) {
    std::vector<std::vector<std::pair<index_t, index_t>>> by_bin(
        static_cast<size_t>(fc.num_bins));
    for (index_t g = 0; g < fc.num_graphs; ++g)
        for (const auto& [bin, count] : fc.counts[static_cast<size_t>(g)])
            by_bin[static_cast<size_t>(bin)].push_back({g, count});

    Matrix k(fc.num_graphs, fc.num_graphs);
    for (const auto& members : by_bin) {
        for (size_t a = 0; a < members.size(); ++a) {
            const auto [ga, ca] = members[a];
            k(ga, ga) += static_cast<double>(ca * ca);
            for (size_t b = a + 1; b < members.size(); ++b) {
                const auto [gb, cb] = members[b];
                const double v = static_cast<double>(ca * cb);
                k(ga, gb) += v;
                k(gb, ga) += v;
            }
        }
    }
    return k;
}

// Cosine normalization K'[i][j] = K[i][j] / sqrt(K[i][i] K[j][j]).
// The diagonal is set to exactly 1.
inline Matrix normalize_kernel(const Matrix& k) {
    require(k.rows() == k.cols(), "kernel matrix must be square");
    const index_t n = k.rows();
    std::vector<double> d(static_cast<size_t>(n));
    for (index_t i = 0; i < n; ++i) {
        require(k(i, i) > 0.0,
                "cannot normalize: self-similarity of graph " + std::to_string(i) +
                    " is not positive");
        d[static_cast<size_t>(i)] = std::sqrt(k(i, i));
    }
    Matrix out(n, n);
    for (index_t i = 0; i < n; ++i) {
        out(i, i) = 1.0;
        for (index_t j = i + 1; j < n; ++j) {
            const double v = k(i, j) / (d[static_cast<size_t>(i)] * d[static_cast<size_t>(j)]);
            out(i, j) = v;
            out(j, i) = v;
        }
    }
    return out;
}

// Gram matrix plus optional diagnostics.
struct KernelMatrix {
    Matrix values;
    std::vector<Matrix> contributions;  // per-iteration terms when recorded
    std::string config_echo;
};

// The t_max+1 label hashes of one kernel run, freshly drawn per iteration and
// shared across the stacked database.
inline std::vector<HashFunction> draw_label_hashes(index_t dim, int t_max, double w,
                                                   Metric metric, Rng& rng) {
    require(t_max >= 0, "t_max must be non-negative");
    std::vector<HashFunction> hashes;
    hashes.reserve(static_cast<size_t>(t_max) + 1);
    for (int t = 0; t <= t_max; ++t) hashes.push_back(draw_hash(dim, w, metric, rng));
    return hashes;
}

inline std::string pk_config_echo(const PKConfig& cfg) {
    std::ostringstream os;
    os << "scheme=" << scheme_name(cfg.scheme) << " tmax=" << cfg.t_max
       << " w=" << cfg.w_label << " metric=" << metric_name(cfg.metric_label)
       << " normalize=" << (cfg.normalize ? 1 : 0) << " seed=" << cfg.seed;
    return os.str();
}

namespace detail {

inline void validate_pk_inputs(const GraphDatabase& db, const PKConfig& cfg) {
    require(db.size() >= 1, "database is empty");
    require(db.num_labels >= 1,
            "database carries no labels; derive them first (degree labels)");
    require(cfg.t_max >= 0, "t_max must be non-negative");
    require(cfg.w_label > 0.0 && std::isfinite(cfg.w_label),
            "bin width must be positive and finite");
}

inline Matrix advance(const CsrMatrix& transition, Matrix p, const Matrix& p0,
                      std::span<const char> mask, Scheme scheme) {
    if (scheme == Scheme::label_propagation)
        return label_propagation_step(transition, std::move(p), p0, mask);
    return diffusion_step(transition, p);
}

}  // namespace detail

// Propagation kernel over the label distributions of a graph database.
// Each iteration t = 0..t_max hashes the current distributions with hashes[t],
// counts bins per graph, and adds the linear base kernel on the counts; the
// distributions then advance by the configured scheme.
inline KernelMatrix propagation_kernel(const GraphDatabase& db, const PKConfig& cfg,
                                       std::span<const HashFunction> hashes) {
    detail::validate_pk_inputs(db, cfg);
    require(static_cast<int>(hashes.size()) == cfg.t_max + 1,
            "need exactly t_max+1 hash functions");
    for (const HashFunction& h : hashes)
        require(h.dim() == db.num_labels, "hash dimension does not match label alphabet");

    const StackedDatabase stacked = stack_database(db);
    Matrix p = init_label_distributions(db, cfg.prior);
    Matrix p0;
    std::vector<char> mask;
    if (cfg.scheme == Scheme::label_propagation) {
        p0 = p;
        mask = labeled_mask(db);
    }

    const index_t n = db.size();
    KernelMatrix out;
    out.values = Matrix(n, n);
    out.config_echo = pk_config_echo(cfg);
    for (int t = 0; t <= cfg.t_max; ++t) {
        const BinAssignment bins = apply_hash(hashes[static_cast<size_t>(t)], p);
        const FeatureCounts fc = count_features(bins, stacked.graph_of, n);
        Matrix term = contribution(fc);
        add_inplace(out.values, term);
        if (cfg.record_contributions) out.contributions.push_back(std::move(term));
        if (t < cfg.t_max)
            p = detail::advance(stacked.transition, std::move(p), p0, mask, cfg.scheme);
    }
    if (cfg.normalize) out.values = normalize_kernel(out.values);
    return out;
}

inline KernelMatrix propagation_kernel(const GraphDatabase& db, const PKConfig& cfg) {
    detail::validate_pk_inputs(db, cfg);
    Rng rng(cfg.seed);
    const std::vector<HashFunction> hashes =
        draw_label_hashes(db.num_labels, cfg.t_max, cfg.w_label, cfg.metric_label, rng);
    return propagation_kernel(db, cfg, hashes);
}

// Reference evaluation: the same iteration, but each Gram entry is the double
// sum of bin collisions over node pairs. Quadratic in nodes; used as an oracle
// against the counting path, with which it agrees exactly under shared hashes.
inline Matrix kernel_bruteforce(const GraphDatabase& db, const PKConfig& cfg,
                                std::span<const HashFunction> hashes) {
    detail::validate_pk_inputs(db, cfg);
    require(static_cast<int>(hashes.size()) == cfg.t_max + 1,
            "need exactly t_max+1 hash functions");

    const StackedDatabase stacked = stack_database(db);
    Matrix p = init_label_distributions(db, cfg.prior);
    Matrix p0;
    std::vector<char> mask;
    if (cfg.scheme == Scheme::label_propagation) {
        p0 = p;
        mask = labeled_mask(db);
    }

    const index_t n = db.size();
    const index_t total = db.total_nodes();
    Matrix k(n, n);
    for (int t = 0; t <= cfg.t_max; ++t) {
        const BinAssignment bins = apply_hash(hashes[static_cast<size_t>(t)], p);
        Matrix term(n, n);
        for (index_t u = 0; u < total; ++u)
            for (index_t v = 0; v < total; ++v)
                if (bins.bins[static_cast<size_t>(u)] == bins.bins[static_cast<size_t>(v)])
                    term(stacked.graph_of[static_cast<size_t>(u)],
                         stacked.graph_of[static_cast<size_t>(v)]) += 1.0;
        add_inplace(k, term);
        if (t < cfg.t_max)
            p = detail::advance(stacked.transition, std::move(p), p0, mask, cfg.scheme);
    }
    if (cfg.normalize) k = normalize_kernel(k);
    return k;
}

}  // namespace propkern
