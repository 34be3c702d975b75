#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "error.hpp"
#include "matrix.hpp"
#include "random.hpp"

namespace propkern {

struct EvalReport {
    struct Row {
        int run;
        int fold;
        double accuracy;
    };
    std::vector<Row> rows;     // run-major, then fold
    double mean_accuracy = 0;  // mean of per-run means
    double std_error = 0;      // sample std of per-run means / sqrt(runs)
    std::string config_echo;
};

// Stratified k-fold cross-validation with a kernel k-nearest-neighbor
// classifier under the kernel-induced distance
// d(i, j)^2 = K[i][i] + K[j][j] - 2 K[i][j].
// Folds are dealt per class after a seeded shuffle; majority vote over the
// k_nn nearest training graphs, ties broken by the smallest summed distance,
// then by the lowest class value. Deterministic given the seed.
inline EvalReport evaluate(const Matrix& k, std::span<const int> classes, int folds,
                           int runs, int k_nn, std::uint64_t seed) {
    require(k.rows() == k.cols(), "kernel matrix must be square");
    const index_t n = k.rows();
    require(static_cast<index_t>(classes.size()) == n,
            "class vector does not match kernel size");
    require(folds >= 2, "need at least two folds");
    require(runs >= 1, "need at least one run");
    require(k_nn >= 1, "need at least one neighbor");

    std::map<int, std::vector<index_t>> members;
    for (index_t i = 0; i < n; ++i) members[classes[static_cast<size_t>(i)]].push_back(i);
    for (const auto& [cls, list] : members)
        require(static_cast<int>(list.size()) >= folds,
                "class " + std::to_string(cls) + " has fewer members than folds");

    auto dist = [&](index_t a, index_t b) {
        const double d2 = k(a, a) + k(b, b) - 2.0 * k(a, b);
        return std::sqrt(std::max(0.0, d2));
    };

    EvalReport report;
    Rng rng(seed);
    std::vector<double> run_means;
    std::vector<int> fold_of(static_cast<size_t>(n));
    for (int run = 0; run < runs; ++run) {
        for (auto& [cls, list] : members) {
            // Fisher-Yates, then deal members round-robin into folds.
            for (size_t i = 0; i + 1 < list.size(); ++i) {
                const size_t j = i + static_cast<size_t>(
                                         uniform_index(rng, static_cast<index_t>(list.size() - i)));
                std::swap(list[i], list[j]);
            }
            for (size_t i = 0; i < list.size(); ++i)
                fold_of[static_cast<size_t>(list[i])] = static_cast<int>(i) % folds;
        }

        double run_sum = 0.0;
        for (int fold = 0; fold < folds; ++fold) {
            std::vector<index_t> train, test;
            for (index_t i = 0; i < n; ++i)
                (fold_of[static_cast<size_t>(i)] == fold ? test : train).push_back(i);

            index_t correct = 0;
            std::vector<std::pair<double, index_t>> order(train.size());
            for (index_t q : test) {
                for (size_t i = 0; i < train.size(); ++i)
                    order[i] = {dist(q, train[i]), train[i]};
                std::sort(order.begin(), order.end());
                const size_t take = std::min(static_cast<size_t>(k_nn), order.size());

                std::map<int, std::pair<index_t, double>> votes;  // class -> (count, dist sum)
                for (size_t i = 0; i < take; ++i) {
                    auto& v = votes[classes[static_cast<size_t>(order[i].second)]];
                    v.first += 1;
                    v.second += order[i].first;
                }
                int best_cls = 0;
                index_t best_count = -1;
                double best_dsum = 0.0;
                for (const auto& [cls, v] : votes) {
                    const bool better =
                        v.first > best_count ||
                        (v.first == best_count && v.second < best_dsum);
                    // std::map iterates classes in ascending order, so on full
                    // ties the lowest class value wins.
                    if (better) {
                        best_cls = cls;
                        best_count = v.first;
                        best_dsum = v.second;
                    }
                }
                if (best_cls == classes[static_cast<size_t>(q)]) ++correct;
            }
            const double acc =
                test.empty() ? 0.0
                             : static_cast<double>(correct) / static_cast<double>(test.size());
            report.rows.push_back({run, fold, acc});
            run_sum += acc;
        }
        run_means.push_back(run_sum / static_cast<double>(folds));
    }

    double mean = 0.0;
    for (double m : run_means) mean += m;
    mean /= static_cast<double>(runs);
    report.mean_accuracy = mean;
    if (runs > 1) {
        double var = 0.0;
        for (double m : run_means) var += (m - mean) * (m - mean);
        var /= static_cast<double>(runs - 1);
        report.std_error = std::sqrt(var / static_cast<double>(runs));
    }
    {
        std::ostringstream os;
        os << "folds=" << folds << " runs=" << runs << " knn=" << k_nn << " seed=" << seed;
        report.config_echo = os.str();
    }
    return report;
}

}  // namespace propkern
