#pragma once

#include <span>

#include "error.hpp"
#include "matrix.hpp"

namespace propkern {

enum class Scheme { diffusion, label_propagation };

inline const char* scheme_name(Scheme s) {
    return s == Scheme::diffusion ? "diffusion" : "labelprop";
}

// One diffusion step: P <- T * P. With row-stochastic T and row-stochastic P
// the result stays row-stochastic up to rounding.
inline Matrix diffusion_step(const CsrMatrix& transition, const Matrix& p) {
    require(transition.size() == p.rows(), "transition and distribution sizes differ");
    return transition.multiply(p);
}

// Overwrites the rows flagged in mask with the corresponding rows of p0.
inline void push_back_labels(Matrix& p, const Matrix& p0, std::span<const char> mask) {
    require(p.rows() == p0.rows() && p.cols() == p0.cols(), "shape mismatch in push-back");
    require(static_cast<index_t>(mask.size()) == p.rows(), "mask size mismatch in push-back");
    for (index_t r = 0; r < p.rows(); ++r) {
        if (!mask[static_cast<size_t>(r)]) continue;
        std::span<double> dst = p.row(r);
        std::span<const double> src = p0.row(r);
        for (index_t c = 0; c < p.cols(); ++c) dst[c] = src[c];
    }
}

// Push-back scheme: the originally observed rows are reset to their initial
// distributions, then one diffusion step runs. Iterating this map visits the
// same states as diffusing with the absorbing transition whose absorbing set
// is the mask, once the push-back is applied to the iterate.
inline Matrix label_propagation_step(const CsrMatrix& transition, Matrix p, const Matrix& p0,
                                     std::span<const char> mask) {
    push_back_labels(p, p0, mask);
    return transition.multiply(p);
}

}  // namespace propkern
