#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"
#include "kernel.hpp"
#include "matrix.hpp"

namespace propkern {

// Regular-lattice graph: one plane per label, fibers across planes are the
// per-pixel label distributions and sum to 1.
struct GridGraph {
    index_t rows = 0;
    index_t cols = 0;
    int num_labels = 0;
    std::vector<Matrix> planes;

    index_t pixels() const { return rows * cols; }
};

// Delta fibers from a row-major label image.
inline GridGraph grid_from_labels(std::span<const int> labels, index_t rows, index_t cols,
                                  int num_labels) {
    require(rows >= 1 && cols >= 1, "grid must have positive dimensions");
    require(num_labels >= 1, "grid needs at least one label");
    require(static_cast<index_t>(labels.size()) == rows * cols,
            "label image size does not match grid dimensions");
    GridGraph g;
    g.rows = rows;
    g.cols = cols;
    g.num_labels = num_labels;
    g.planes.assign(static_cast<size_t>(num_labels), Matrix(rows, cols));
    for (index_t i = 0; i < rows; ++i)
        for (index_t j = 0; j < cols; ++j) {
            const int l = labels[static_cast<size_t>(i * cols + j)];
            require(l >= 0 && l < num_labels, "grid label out of range");
            g.planes[static_cast<size_t>(l)](i, j) = 1.0;
        }
    return g;
}

enum class Padding { renormalized_zero, circular };

inline const char* padding_name(Padding p) {
    return p == Padding::renormalized_zero ? "renorm" : "circular";
}

// Circular symmetric neighbor sets approximated as filter matrices. The
// off-lattice sets do not sum to 1; renormalization keeps fibers stochastic.
enum class GridFilter { n1_4, n1_8, n2_16 };

inline const char* filter_name(GridFilter f) {
    switch (f) {
        case GridFilter::n1_4: return "n1_4";
        case GridFilter::n1_8: return "n1_8";
        case GridFilter::n2_16: return "n2_16";
    }
    return "?";
}

inline Matrix filter_matrix(GridFilter f) {
    auto fill = [](std::initializer_list<double> vals, index_t side) {
        Matrix m(side, side);
        index_t i = 0;
        for (double v : vals) {
            m(i / side, i % side) = v;
            ++i;
        }
        return m;
    };
    switch (f) {
        case GridFilter::n1_4:
            return fill({0.00, 0.25, 0.00,
                         0.25, 0.00, 0.25,
                         0.00, 0.25, 0.00}, 3);
        case GridFilter::n1_8:
            return fill({0.06, 0.17, 0.06,
                         0.17, 0.05, 0.17,
                         0.06, 0.17, 0.06}, 3);
        case GridFilter::n2_16:
            return fill({0.01, 0.06, 0.09, 0.06, 0.01,
                         0.06, 0.04, 0.00, 0.04, 0.06,
                         0.09, 0.00, 0.00, 0.00, 0.09,
                         0.06, 0.04, 0.00, 0.04, 0.06,
                         0.01, 0.06, 0.09, 0.06, 0.01}, 5);
    }
    throw Error("unknown grid filter");
}

// One propagation step by discrete convolution (correlation with the
// 180-degree-flipped filter; the shipped filters are symmetric, so the flip is
// a no-op). Under renormalized_zero, out-of-range neighbors are dropped and
// each fiber is divided by the in-range filter mass, which reproduces
// row-normalized transition semantics; under circular, indices wrap and the
// division is by the constant filter mass. A pixel with no reachable mass
// (e.g. a single-pixel grid under a zero-center filter) keeps its fiber.
inline GridGraph convolve_step(const GridGraph& g, const Matrix& filter, Padding padding) {
    require(g.num_labels >= 1 && !g.planes.empty(), "grid has no planes");
    const index_t side = filter.rows();
    require(side == filter.cols(), "filter must be square");
    require(side % 2 == 1, "filter side must be odd");
    for (index_t a = 0; a < side; ++a)
        for (index_t b = 0; b < side; ++b)
            require(std::isfinite(filter(a, b)), "filter entries must be finite");
    const index_t half = side / 2;
    const index_t rows = g.rows, cols = g.cols;

    Matrix flipped(side, side);
    for (index_t a = 0; a < side; ++a)
        for (index_t b = 0; b < side; ++b)
            flipped(a, b) = filter(side - 1 - a, side - 1 - b);

    Matrix den(rows, cols);
    if (padding == Padding::circular) {
        double total = 0.0;
        for (index_t a = 0; a < side; ++a)
            for (index_t b = 0; b < side; ++b) total += flipped(a, b);
        for (index_t i = 0; i < rows; ++i)
            for (index_t j = 0; j < cols; ++j) den(i, j) = total;
    } else {
        for (index_t i = 0; i < rows; ++i)
            for (index_t j = 0; j < cols; ++j) {
                double s = 0.0;
                for (index_t a = 0; a < side; ++a) {
                    const index_t si = i + a - half;
                    if (si < 0 || si >= rows) continue;
                    for (index_t b = 0; b < side; ++b) {
                        const index_t sj = j + b - half;
                        if (sj < 0 || sj >= cols) continue;
                        s += flipped(a, b);
                    }
                }
                den(i, j) = s;
            }
    }

    GridGraph out = g;
    for (int plane = 0; plane < g.num_labels; ++plane) {
        const Matrix& src = g.planes[static_cast<size_t>(plane)];
        Matrix& dst = out.planes[static_cast<size_t>(plane)];
        for (index_t i = 0; i < rows; ++i)
            for (index_t j = 0; j < cols; ++j) {
                double s = 0.0;
                if (padding == Padding::circular) {
                    for (index_t a = 0; a < side; ++a) {
                        const index_t si = (i + a - half + rows * side) % rows;
                        for (index_t b = 0; b < side; ++b) {
                            const index_t sj = (j + b - half + cols * side) % cols;
                            s += flipped(a, b) * src(si, sj);
                        }
                    }
                } else {
                    for (index_t a = 0; a < side; ++a) {
                        const index_t si = i + a - half;
                        if (si < 0 || si >= rows) continue;
                        for (index_t b = 0; b < side; ++b) {
                            const index_t sj = j + b - half;
                            if (sj < 0 || sj >= cols) continue;
                            s += flipped(a, b) * src(si, sj);
                        }
                    }
                }
                dst(i, j) = s;
            }
    }
    for (index_t i = 0; i < rows; ++i)
        for (index_t j = 0; j < cols; ++j) {
            const double d = den(i, j);
            if (d > 0.0) {
                for (int plane = 0; plane < g.num_labels; ++plane)
                    out.planes[static_cast<size_t>(plane)](i, j) /= d;
            } else {
                for (int plane = 0; plane < g.num_labels; ++plane)
                    out.planes[static_cast<size_t>(plane)](i, j) =
                        g.planes[static_cast<size_t>(plane)](i, j);
            }
        }
    return out;
}

// Quantizes 8-bit grayscale values into `levels` equal-width label buckets.
inline std::vector<int> quantize_grayscale(std::span<const int> pixels, int levels) {
    require(levels >= 1 && levels <= 256, "levels must lie in [1, 256]");
    std::vector<int> out(pixels.size());
    for (size_t i = 0; i < pixels.size(); ++i) {
        require(pixels[i] >= 0 && pixels[i] <= 255, "pixel values must lie in [0, 255]");
        out[i] = pixels[i] * levels / 256;
    }
    return out;
}

struct GridKernelConfig : PKConfig {
    Matrix filter = filter_matrix(GridFilter::n1_4);
    Padding padding = Padding::renormalized_zero;
};

// Flattened per-pixel distributions, grids stacked in order, pixels row-major.
inline Matrix stack_grid_fibers(std::span<const GridGraph> grids) {
    require(!grids.empty(), "no grids given");
    const int k = grids[0].num_labels;
    index_t total = 0;
    for (const GridGraph& g : grids) {
        require(g.num_labels == k, "grids must share one label alphabet");
        total += g.pixels();
    }
    Matrix x(total, k);
    index_t row = 0;
    for (const GridGraph& g : grids)
        for (index_t i = 0; i < g.rows; ++i)
            for (index_t j = 0; j < g.cols; ++j, ++row)
                for (int c = 0; c < k; ++c) x(row, c) = g.planes[static_cast<size_t>(c)](i, j);
    return x;
}

// Propagation kernel over grid graphs: identical hashing and counting to the
// general engine, with convolution as the propagation step.
inline KernelMatrix grid_kernel(std::span<const GridGraph> grids, const GridKernelConfig& cfg,
                                std::span<const HashFunction> hashes) {
    require(!grids.empty(), "no grids given");
    const int k = grids[0].num_labels;
    require(k >= 1, "grids carry no labels");
    require(cfg.t_max >= 0, "t_max must be non-negative");
    require(static_cast<int>(hashes.size()) == cfg.t_max + 1,
            "need exactly t_max+1 hash functions");
    for (const HashFunction& h : hashes)
        require(h.dim() == k, "hash dimension does not match label alphabet");

    const index_t n = static_cast<index_t>(grids.size());
    std::vector<index_t> graph_of;
    for (index_t g = 0; g < n; ++g)
        for (index_t p = 0; p < grids[static_cast<size_t>(g)].pixels(); ++p)
            graph_of.push_back(g);

    std::vector<GridGraph> state(grids.begin(), grids.end());
    KernelMatrix out;
    out.values = Matrix(n, n);
    {
        std::ostringstream os;
        os << pk_config_echo(cfg) << " padding=" << padding_name(cfg.padding);
        out.config_echo = os.str();
    }
    for (int t = 0; t <= cfg.t_max; ++t) {
        const Matrix x = stack_grid_fibers(state);
        const BinAssignment bins = apply_hash(hashes[static_cast<size_t>(t)], x);
        const FeatureCounts fc = count_features(bins, graph_of, n);
        Matrix term = contribution(fc);
        add_inplace(out.values, term);
        if (cfg.record_contributions) out.contributions.push_back(std::move(term));
        if (t < cfg.t_max)
            for (GridGraph& g : state) g = convolve_step(g, cfg.filter, cfg.padding);
    }
    if (cfg.normalize) out.values = normalize_kernel(out.values);
    return out;
}

inline KernelMatrix grid_kernel(std::span<const GridGraph> grids,
                                const GridKernelConfig& cfg) {
    require(!grids.empty(), "no grids given");
    require(cfg.t_max >= 0, "t_max must be non-negative");
    Rng rng(cfg.seed);
    const std::vector<HashFunction> hashes = draw_label_hashes(
        grids[0].num_labels, cfg.t_max, cfg.w_label, cfg.metric_label, rng);
    return grid_kernel(grids, cfg, hashes);
}

}  // namespace propkern
