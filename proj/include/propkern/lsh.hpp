#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "error.hpp"
#include "matrix.hpp"
#include "random.hpp"

namespace propkern {

// Metric the hash family is sensitive to. tv and hellinger address
// distributions (tv via L1, hellinger via L2 on elementwise square roots);
// l1 and l2 address raw vectors.
enum class Metric { tv, hellinger, l1, l2 };

inline const char* metric_name(Metric m) {
    switch (m) {
        case Metric::tv: return "tv";
        case Metric::hellinger: return "h";
        case Metric::l1: return "l1";
        case Metric::l2: return "l2";
    }
    return "?";
}

// Quantization-grid hash: bin(x) = floor((<v, x'> + b) / w), where x' is
// sqrt(x) entrywise under hellinger and x itself otherwise. v is i.i.d.
// standard normal for {hellinger, l2} (L2-sensitive) and standard Cauchy for
// {tv, l1} (L1-sensitive); b is uniform in [0, w).
struct HashFunction {
    Metric metric = Metric::tv;
    double w = 1.0;
    double b = 0.0;
    std::vector<double> v;

    index_t dim() const { return static_cast<index_t>(v.size()); }
};

// Draw order is fixed: the dim components of v first, then b.
inline HashFunction draw_hash(index_t dim, double w, Metric metric, Rng& rng) {
    require(dim >= 1, "hash dimension must be positive");
    require(w > 0.0 && std::isfinite(w), "bin width must be positive and finite");
    HashFunction h;
    h.metric = metric;
    h.w = w;
    h.v.resize(static_cast<size_t>(dim));
    const bool cauchy = (metric == Metric::tv || metric == Metric::l1);
    for (double& c : h.v) c = cauchy ? std_cauchy(rng) : std_normal(rng);
    h.b = w * uniform01(rng);
    return h;
}

// Raw (uncompacted) bin of a single vector. Raw bins are canonical values:
// they depend only on the hash and the vector, never on evaluation order.
inline std::int64_t raw_bin(const HashFunction& h, std::span<const double> x) {
    require(static_cast<index_t>(x.size()) == h.dim(), "vector does not match hash dimension");
    double s = h.b;
    if (h.metric == Metric::hellinger) {
        for (size_t d = 0; d < x.size(); ++d) {
            require(x[d] >= 0.0, "hellinger hashing needs non-negative entries");
            s += h.v[d] * std::sqrt(x[d]);
        }
    } else {
        for (size_t d = 0; d < x.size(); ++d) s += h.v[d] * x[d];
    }
    const double f = std::floor(s / h.w);
    // Cauchy projections have heavy tails; clamp instead of overflowing.
    if (f >= 9.2e18) return INT64_MAX;
    if (f <= -9.2e18) return INT64_MIN;
    return static_cast<std::int64_t>(f);
}

inline std::vector<std::int64_t> raw_bins(const HashFunction& h, const Matrix& x) {
    std::vector<std::int64_t> out(static_cast<size_t>(x.rows()));
    for (index_t r = 0; r < x.rows(); ++r) out[static_cast<size_t>(r)] = raw_bin(h, x.row(r));
    return out;
}

// Node-to-bin map with bins compacted to [0, num_bins).
struct BinAssignment {
    std::vector<index_t> bins;
    index_t num_bins = 0;

    index_t size() const { return static_cast<index_t>(bins.size()); }
};

// Compacts raw bins to dense indices in first-occurrence order.
inline BinAssignment compact_bins(std::span<const std::int64_t> raw) {
    BinAssignment out;
    out.bins.resize(raw.size());
    std::unordered_map<std::int64_t, index_t> seen;
    seen.reserve(raw.size());
    for (size_t i = 0; i < raw.size(); ++i) {
        auto [it, fresh] = seen.emplace(raw[i], out.num_bins);
        if (fresh) ++out.num_bins;
        out.bins[i] = it->second;
    }
    return out;
}

// Hashes every row of x and compacts the result.
inline BinAssignment apply_hash(const HashFunction& h, const Matrix& x) {
    const std::vector<std::int64_t> raw = raw_bins(h, x);
    return compact_bins(raw);
}

// ---- distances ------------------------------------------------------------

inline double l1_distance(std::span<const double> p, std::span<const double> q) {
    require(p.size() == q.size(), "distance needs equal-length vectors");
    double s = 0.0;
    for (size_t i = 0; i < p.size(); ++i) s += std::fabs(p[i] - q[i]);
    return s;
}

inline double l2_distance(std::span<const double> p, std::span<const double> q) {
    require(p.size() == q.size(), "distance needs equal-length vectors");
    double s = 0.0;
    for (size_t i = 0; i < p.size(); ++i) s += (p[i] - q[i]) * (p[i] - q[i]);
    return std::sqrt(s);
}

// Total variation: half the L1 distance between distributions.
inline double tv_distance(std::span<const double> p, std::span<const double> q) {
    return 0.5 * l1_distance(p, q);
}

// Hellinger: L2 distance of elementwise square roots, scaled by 1/sqrt(2).
inline double hellinger_distance(std::span<const double> p, std::span<const double> q) {
    require(p.size() == q.size(), "distance needs equal-length vectors");
    double s = 0.0;
    for (size_t i = 0; i < p.size(); ++i) {
        require(p[i] >= 0.0 && q[i] >= 0.0, "hellinger distance needs non-negative entries");
        const double d = std::sqrt(p[i]) - std::sqrt(q[i]);
        s += d * d;
    }
    return std::sqrt(0.5 * s);
}

}  // namespace propkern
