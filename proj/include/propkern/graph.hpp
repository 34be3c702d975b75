#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"
#include "matrix.hpp"

namespace propkern {

inline constexpr int kUnlabeled = -1;

// One graph: non-negative weighted adjacency, optional node labels, optional
// node attributes, optional classification target.
struct Graph {
    index_t n = 0;
    CsrMatrix adjacency;          // n x n; possibly non-symmetric (directed)
    std::vector<int> labels;      // size n; kUnlabeled marks a missing label
    Matrix attributes;            // n x attr_dim, or empty when absent
    std::optional<int> cls;       // classification target
};

// A batch of graphs sharing one label alphabet and one attribute width.
struct GraphDatabase {
    std::vector<Graph> graphs;
    int num_labels = 0;           // k; label values lie in [0, k)
    index_t attr_dim = 0;         // 0 when the database carries no attributes

    index_t size() const { return static_cast<index_t>(graphs.size()); }
    index_t total_nodes() const {
        index_t n = 0;
        for (const Graph& g : graphs) n += g.n;
        return n;
    }
};

// Validates per-graph shapes, derives the label alphabet size when not given,
// and fixes empty label vectors up to all-unlabeled.
inline GraphDatabase make_database(std::vector<Graph> graphs,
                                   std::optional<int> num_labels = {}) {
    GraphDatabase db;
    int max_label = -1;
    bool first = true;
    for (size_t gi = 0; gi < graphs.size(); ++gi) {
        Graph& g = graphs[gi];
        const std::string where = "graph " + std::to_string(gi) + ": ";
        require(g.n >= 0, where + "negative node count");
        require(g.adjacency.size() == g.n, where + "adjacency size does not match node count");
        for (double w : g.adjacency.values())
            require(w >= 0.0 && std::isfinite(w), where + "adjacency weights must be finite and non-negative");
        if (g.labels.empty()) g.labels.assign(static_cast<size_t>(g.n), kUnlabeled);
        require(static_cast<index_t>(g.labels.size()) == g.n,
                where + "label vector size does not match node count");
        for (int l : g.labels) {
            require(l >= kUnlabeled, where + "label values must be >= -1");
            max_label = std::max(max_label, l);
        }
        const index_t d = g.attributes.empty() ? 0 : g.attributes.cols();
        if (!g.attributes.empty())
            require(g.attributes.rows() == g.n, where + "attribute rows do not match node count");
        if (first) {
            db.attr_dim = d;
            first = false;
        } else {
            require(d == db.attr_dim, where + "attribute width differs across the database");
        }
    }
    db.graphs = std::move(graphs);
    if (num_labels) {
        require(*num_labels >= 0, "label alphabet size must be non-negative");
        require(*num_labels > max_label, "declared label alphabet smaller than observed labels");
        db.num_labels = *num_labels;
    } else {
        db.num_labels = max_label + 1;
    }
    return db;
}

// Row-normalized transition matrix of a non-negative adjacency.
// Zero-degree rows become identity rows (random walk stays put).
inline CsrMatrix build_transition(const CsrMatrix& adjacency) {
    const index_t n = adjacency.size();
    const auto& row_ptr = adjacency.row_ptr();
    const auto& col = adjacency.col_index();
    const auto& val = adjacency.values();
    std::vector<Triplet> out;
    out.reserve(val.size() + static_cast<size_t>(n));
    for (index_t r = 0; r < n; ++r) {
        double s = 0.0;
        for (index_t i = row_ptr[r]; i < row_ptr[r + 1]; ++i) {
            require(val[i] >= 0.0 && std::isfinite(val[i]),
                    "adjacency weights must be finite and non-negative");
            s += val[i];
        }
        if (s > 0.0) {
            for (index_t i = row_ptr[r]; i < row_ptr[r + 1]; ++i)
                out.push_back({r, col[i], val[i] / s});
        } else {
            out.push_back({r, r, 1.0});
        }
    }
    return CsrMatrix::from_triplets(n, std::move(out));
}

// Replaces the rows flagged in `absorbing` by identity rows.
inline CsrMatrix absorbing_transition(const CsrMatrix& transition,
                                      std::span<const char> absorbing) {
    const index_t n = transition.size();
    require(static_cast<index_t>(absorbing.size()) == n,
            "absorbing flag vector size does not match matrix");
    const auto& row_ptr = transition.row_ptr();
    const auto& col = transition.col_index();
    const auto& val = transition.values();
    std::vector<Triplet> out;
    out.reserve(val.size());
    for (index_t r = 0; r < n; ++r) {
        if (absorbing[r]) {
            out.push_back({r, r, 1.0});
        } else {
            for (index_t i = row_ptr[r]; i < row_ptr[r + 1]; ++i)
                out.push_back({r, col[i], val[i]});
        }
    }
    return CsrMatrix::from_triplets(n, std::move(out));
}

// Block-diagonal transition over all graphs plus the node-to-graph map.
// Node order is graph-major: graph g occupies rows [offsets[g], offsets[g+1]).
struct StackedDatabase {
    CsrMatrix transition;
    std::vector<index_t> graph_of;   // size N
    std::vector<index_t> offsets;    // size n_graphs + 1
};

inline StackedDatabase stack_database(const GraphDatabase& db) {
    StackedDatabase s;
    s.offsets.reserve(db.graphs.size() + 1);
    s.offsets.push_back(0);
    const index_t total = db.total_nodes();
    s.graph_of.reserve(static_cast<size_t>(total));
    std::vector<Triplet> entries;
    for (size_t gi = 0; gi < db.graphs.size(); ++gi) {
        const Graph& g = db.graphs[gi];
        const index_t base = s.offsets.back();
        const CsrMatrix t = build_transition(g.adjacency);
        const auto& row_ptr = t.row_ptr();
        const auto& col = t.col_index();
        const auto& val = t.values();
        for (index_t r = 0; r < g.n; ++r)
            for (index_t i = row_ptr[r]; i < row_ptr[r + 1]; ++i)
                entries.push_back({base + r, base + col[i], val[i]});
        for (index_t u = 0; u < g.n; ++u) s.graph_of.push_back(static_cast<index_t>(gi));
        s.offsets.push_back(base + g.n);
    }
    s.transition = CsrMatrix::from_triplets(total, std::move(entries));
    return s;
}

// Initial label distributions, one row per node across the whole database:
// delta rows for labeled nodes, the prior for unlabeled ones.
// An empty prior means uniform; a custom prior must be a distribution.
inline Matrix init_label_distributions(const GraphDatabase& db,
                                       std::span<const double> prior = {}) {
    const int k = db.num_labels;
    require(k >= 1, "database carries no labels; derive them first (degree labels)");
    std::vector<double> p;
    if (prior.empty()) {
        p.assign(static_cast<size_t>(k), 1.0 / static_cast<double>(k));
    } else {
        require(static_cast<int>(prior.size()) == k, "prior size does not match label alphabet");
        double s = 0.0;
        for (double x : prior) {
            require(x >= 0.0 && std::isfinite(x), "prior entries must be finite and non-negative");
            s += x;
        }
        require(std::fabs(s - 1.0) <= 1e-9, "prior must sum to 1");
        p.assign(prior.begin(), prior.end());
    }
    Matrix m(db.total_nodes(), k);
    index_t row = 0;
    for (const Graph& g : db.graphs) {
        for (index_t u = 0; u < g.n; ++u, ++row) {
            const int l = g.labels[static_cast<size_t>(u)];
            if (l == kUnlabeled) {
                for (int c = 0; c < k; ++c) m(row, c) = p[static_cast<size_t>(c)];
            } else {
                m(row, l) = 1.0;
            }
        }
    }
    return m;
}

// Rounds to `digits` significant decimal digits; used to deduplicate
// floating-point degrees before they become labels.
inline double round_sig(double v, int digits) {
    if (v == 0.0 || !std::isfinite(v)) return v;
    const double mag = std::floor(std::log10(std::fabs(v)));
    const double scale = std::pow(10.0, static_cast<double>(digits - 1) - mag);
    return std::round(v * scale) / scale;
}

// Relabels every node by its weighted out-degree: distinct degrees across the
// whole database (rounded to 12 significant digits) are sorted ascending and
// mapped to contiguous label indices. All nodes end up labeled.
inline GraphDatabase degree_labels(const GraphDatabase& db) {
    std::vector<std::vector<double>> degrees(db.graphs.size());
    std::map<double, int> index_of;
    for (size_t gi = 0; gi < db.graphs.size(); ++gi) {
        const Graph& g = db.graphs[gi];
        degrees[gi].resize(static_cast<size_t>(g.n));
        for (index_t u = 0; u < g.n; ++u) {
            const double d = round_sig(g.adjacency.row_sum(u), 12);
            degrees[gi][static_cast<size_t>(u)] = d;
            index_of.emplace(d, 0);
        }
    }
    int next = 0;
    for (auto& [degree, idx] : index_of) idx = next++;

    GraphDatabase out = db;
    for (size_t gi = 0; gi < out.graphs.size(); ++gi) {
        Graph& g = out.graphs[gi];
        for (index_t u = 0; u < g.n; ++u)
            g.labels[static_cast<size_t>(u)] = index_of.at(degrees[gi][static_cast<size_t>(u)]);
    }
    out.num_labels = next;
    return out;
}

// Per-node flags marking observed labels; the push-back scheme resets these rows.
inline std::vector<char> labeled_mask(const GraphDatabase& db) {
    std::vector<char> mask;
    mask.reserve(static_cast<size_t>(db.total_nodes()));
    for (const Graph& g : db.graphs)
        for (int l : g.labels) mask.push_back(l != kUnlabeled ? 1 : 0);
    return mask;
}

}  // namespace propkern
