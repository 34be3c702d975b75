#pragma once

#include <cmath>
#include <numbers>
#include <numeric>
#include <span>
#include <vector>

#include "error.hpp"
#include "kernel.hpp"
#include "matrix.hpp"
#include "random.hpp"

namespace propkern {

// ---- attribute preprocessing -----------------------------------------------

struct Standardized {
    Matrix z;                    // column-wise zero mean, unit standard deviation
    std::vector<double> mean;
    std::vector<double> scale;   // population std; zero-variance columns keep scale 1
};

inline Standardized standardize_attributes(const Matrix& x) {
    require(x.rows() >= 1 && x.cols() >= 1, "attribute matrix is empty");
    const index_t n = x.rows(), d = x.cols();
    Standardized out;
    out.mean.assign(static_cast<size_t>(d), 0.0);
    out.scale.assign(static_cast<size_t>(d), 1.0);
    for (index_t c = 0; c < d; ++c) {
        double m = 0.0;
        for (index_t r = 0; r < n; ++r) m += x(r, c);
        m /= static_cast<double>(n);
        double var = 0.0;
        for (index_t r = 0; r < n; ++r) {
            const double dv = x(r, c) - m;
            var += dv * dv;
        }
        var /= static_cast<double>(n);
        out.mean[static_cast<size_t>(c)] = m;
        if (var > 0.0) out.scale[static_cast<size_t>(c)] = std::sqrt(var);
    }
    out.z = Matrix(n, d);
    for (index_t r = 0; r < n; ++r)
        for (index_t c = 0; c < d; ++c)
            out.z(r, c) = (x(r, c) - out.mean[static_cast<size_t>(c)]) /
                          out.scale[static_cast<size_t>(c)];
    return out;
}

// Per-column population standard deviations with zero mapped to 1; used to
// rescale density columns so a unit bin width is meaningful.
inline std::vector<double> column_scales(const Matrix& x) {
    const index_t n = x.rows(), d = x.cols();
    require(n >= 1, "cannot scale an empty matrix");
    std::vector<double> scale(static_cast<size_t>(d), 1.0);
    for (index_t c = 0; c < d; ++c) {
        double m = 0.0;
        for (index_t r = 0; r < n; ++r) m += x(r, c);
        m /= static_cast<double>(n);
        double var = 0.0;
        for (index_t r = 0; r < n; ++r) {
            const double dv = x(r, c) - m;
            var += dv * dv;
        }
        var /= static_cast<double>(n);
        if (var > 0.0) scale[static_cast<size_t>(c)] = std::sqrt(var);
    }
    return scale;
}

// Gaussian mixture placed on the standardized attributes: one shared
// covariance and a set of sample points drawn from the data rows.
struct AttributeModel {
    Matrix sigma;           // D x D covariance with a relative ridge
    Matrix chol;            // lower-triangular factor of sigma
    Matrix sample_points;   // S x D evaluation points
};

// Covariance is the unbiased (N-1) estimator plus a ridge of
// 1e-6 * (trace/D); a degenerate trace falls back to an absolute 1e-6 so the
// factorization stays positive definite. Sample points are drawn uniformly
// without replacement from the rows of z (with replacement once S > N).
inline AttributeModel fit_mixture(const Matrix& z, index_t num_samples, Rng& rng) {
    require(z.rows() >= 1 && z.cols() >= 1, "attribute matrix is empty");
    require(num_samples >= 1, "need at least one sample point");
    const index_t n = z.rows(), d = z.cols();

    AttributeModel model;
    model.sigma = Matrix(d, d);
    if (n >= 2) {
        std::vector<double> mean(static_cast<size_t>(d), 0.0);
        for (index_t c = 0; c < d; ++c) {
            for (index_t r = 0; r < n; ++r) mean[static_cast<size_t>(c)] += z(r, c);
            mean[static_cast<size_t>(c)] /= static_cast<double>(n);
        }
        for (index_t a = 0; a < d; ++a)
            for (index_t b = a; b < d; ++b) {
                double s = 0.0;
                for (index_t r = 0; r < n; ++r)
                    s += (z(r, a) - mean[static_cast<size_t>(a)]) *
                         (z(r, b) - mean[static_cast<size_t>(b)]);
                s /= static_cast<double>(n - 1);
                model.sigma(a, b) = s;
                model.sigma(b, a) = s;
            }
    }
    double trace = 0.0;
    for (index_t c = 0; c < d; ++c) trace += model.sigma(c, c);
    double ridge_scale = trace / static_cast<double>(d);
    if (!(ridge_scale > 0.0)) ridge_scale = 1.0;
    const double ridge = 1e-6 * ridge_scale;
    for (index_t c = 0; c < d; ++c) model.sigma(c, c) += ridge;
    model.chol = cholesky(model.sigma);

    model.sample_points = Matrix(num_samples, d);
    if (num_samples <= n) {
        std::vector<index_t> idx(static_cast<size_t>(n));
        std::iota(idx.begin(), idx.end(), index_t{0});
        for (index_t i = 0; i < num_samples; ++i) {
            const index_t j = i + uniform_index(rng, n - i);
            std::swap(idx[static_cast<size_t>(i)], idx[static_cast<size_t>(j)]);
            for (index_t c = 0; c < d; ++c)
                model.sample_points(i, c) = z(idx[static_cast<size_t>(i)], c);
        }
    } else {
        for (index_t i = 0; i < num_samples; ++i) {
            const index_t j = uniform_index(rng, n);
            for (index_t c = 0; c < d; ++c) model.sample_points(i, c) = z(j, c);
        }
    }
    return model;
}

// Q0[u][s]: density of N(x_u, sigma) at sample point s, evaluated through the
// triangular factor in log space for stability.
inline Matrix init_pdf_matrix(const Matrix& x, const AttributeModel& model) {
    const index_t n = x.rows(), d = x.cols(), s_count = model.sample_points.rows();
    require(model.sigma.rows() == d && model.sample_points.cols() == d,
            "model dimensions do not match attributes");
    double logdet = 0.0;
    for (index_t c = 0; c < d; ++c) logdet += 2.0 * std::log(model.chol(c, c));
    const double log_norm =
        -0.5 * (static_cast<double>(d) * std::log(2.0 * std::numbers::pi) + logdet);

    Matrix q(n, s_count);
    std::vector<double> diff(static_cast<size_t>(d));
    for (index_t u = 0; u < n; ++u) {
        for (index_t s = 0; s < s_count; ++s) {
            for (index_t c = 0; c < d; ++c) diff[static_cast<size_t>(c)] =
                model.sample_points(s, c) - x(u, c);
            solve_lower_inplace(model.chol, diff);
            double maha = 0.0;
            for (double v : diff) maha += v * v;
            q(u, s) = std::exp(log_norm - 0.5 * maha);
        }
    }
    return q;
}

// Attribute distributions diffuse with the plain transition; no push-back.
inline Matrix attribute_step(const CsrMatrix& transition, const Matrix& q) {
    return diffusion_step(transition, q);
}

// ---- bin combination --------------------------------------------------------

// Joint bins across two assignments over the same nodes: nodes collide only if
// they collide in both. Pair codes are compacted in first-occurrence order.
inline BinAssignment combine_bins(const BinAssignment& a, const BinAssignment& b) {
    require(a.size() == b.size(), "bin assignments cover different node sets");
    std::vector<std::int64_t> paired(static_cast<size_t>(a.size()));
    for (size_t i = 0; i < paired.size(); ++i)
        paired[i] = a.bins[i] * b.num_bins + b.bins[i];
    return compact_bins(paired);
}

// One scalar hash per column, combined into joint tuple bins. Used both for
// raw attribute vectors and for density columns. Hashes are drawn in column
// order from rng.
inline BinAssignment hash_attributes_per_dim(const Matrix& x, double w, Metric metric,
                                             Rng& rng) {
    require(x.cols() >= 1, "attribute matrix is empty");
    const index_t n = x.rows();
    BinAssignment joint;
    std::vector<std::int64_t> raw(static_cast<size_t>(n));
    for (index_t c = 0; c < x.cols(); ++c) {
        const HashFunction h = draw_hash(1, w, metric, rng);
        for (index_t r = 0; r < n; ++r) {
            const double value = x(r, c);
            raw[static_cast<size_t>(r)] = raw_bin(h, {&value, 1});
        }
        const BinAssignment bins = compact_bins(raw);
        joint = (c == 0) ? bins : combine_bins(joint, bins);
    }
    return joint;
}

// ---- the propagating attribute kernel ---------------------------------------

struct P2KConfig : PKConfig {
    double w_attr = 1.0;
    Metric metric_attr = Metric::l1;
    index_t num_samples = 100;
    // true: one scalar hash per sample point, joint tuple bins;
    // false: a single hash over the whole density vector.
    bool per_dimension_hash = true;
};

inline std::string p2k_config_echo(const P2KConfig& cfg) {
    std::ostringstream os;
    os << pk_config_echo(cfg) << " w_attr=" << cfg.w_attr
       << " metric_attr=" << metric_name(cfg.metric_attr) << " samples=" << cfg.num_samples;
    return os.str();
}

// Propagation kernel over label and attribute distributions. Per node, the
// label bin and the attribute bin combine into a joint bin; an unlabeled
// database (k = 0) drops the label factor. Randomness is consumed in a fixed
// order: mixture sampling first, then per iteration the label hash (when
// labeled) followed by the attribute hashes in sample-point order. Density
// columns are rescaled by their t=0 standard deviations for every iteration.
inline KernelMatrix p2k(const GraphDatabase& db, const P2KConfig& cfg) {
    require(db.size() >= 1, "database is empty");
    require(db.attr_dim >= 1, "database carries no attributes");
    require(cfg.t_max >= 0, "t_max must be non-negative");
    require(cfg.w_attr > 0.0 && std::isfinite(cfg.w_attr),
            "bin width must be positive and finite");
    require(cfg.num_samples >= 1, "need at least one sample point");
    const int k = db.num_labels;
    if (k >= 1)
        require(cfg.w_label > 0.0 && std::isfinite(cfg.w_label),
                "bin width must be positive and finite");

    const StackedDatabase stacked = stack_database(db);
    const index_t total = db.total_nodes();
    Matrix attrs(total, db.attr_dim);
    index_t row = 0;
    for (const Graph& g : db.graphs)
        for (index_t u = 0; u < g.n; ++u, ++row)
            for (index_t c = 0; c < db.attr_dim; ++c) attrs(row, c) = g.attributes(u, c);

    Rng rng(cfg.seed);
    const Standardized std_attrs = standardize_attributes(attrs);
    const AttributeModel model = fit_mixture(std_attrs.z, cfg.num_samples, rng);
    Matrix q = init_pdf_matrix(std_attrs.z, model);
    const std::vector<double> q_scale = column_scales(q);

    Matrix p, p0;
    std::vector<char> mask;
    if (k >= 1) {
        p = init_label_distributions(db, cfg.prior);
        if (cfg.scheme == Scheme::label_propagation) {
            p0 = p;
            mask = labeled_mask(db);
        }
    }

    const index_t n = db.size();
    KernelMatrix out;
    out.values = Matrix(n, n);
    out.config_echo = p2k_config_echo(cfg);
    Matrix scaled(total, cfg.num_samples);
    for (int t = 0; t <= cfg.t_max; ++t) {
        BinAssignment label_bins;
        if (k >= 1) {
            const HashFunction h = draw_hash(k, cfg.w_label, cfg.metric_label, rng);
            label_bins = apply_hash(h, p);
        }
        for (index_t u = 0; u < total; ++u)
            for (index_t s = 0; s < cfg.num_samples; ++s)
                scaled(u, s) = q(u, s) / q_scale[static_cast<size_t>(s)];
        BinAssignment attr_bins;
        if (cfg.per_dimension_hash) {
            attr_bins = hash_attributes_per_dim(scaled, cfg.w_attr, cfg.metric_attr, rng);
        } else {
            const HashFunction h =
                draw_hash(cfg.num_samples, cfg.w_attr, cfg.metric_attr, rng);
            attr_bins = apply_hash(h, scaled);
        }
        const BinAssignment joint =
            (k >= 1) ? combine_bins(label_bins, attr_bins) : attr_bins;

        const FeatureCounts fc = count_features(joint, stacked.graph_of, n);
        Matrix term = contribution(fc);
        add_inplace(out.values, term);
        if (cfg.record_contributions) out.contributions.push_back(std::move(term));

        if (t < cfg.t_max) {
            if (k >= 1)
                p = detail::advance(stacked.transition, std::move(p), p0, mask, cfg.scheme);
            q = attribute_step(stacked.transition, q);
        }
    }
    if (cfg.normalize) out.values = normalize_kernel(out.values);
    return out;
}

}  // namespace propkern
