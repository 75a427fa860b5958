#pragma once

// Independent reference computations used by the tests. Nothing here calls the
// library's inference code; the oracles rebuild each step from the model
// definition with dense matrices and explicit likelihood vectors.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <vector>

namespace oracle {

using Matrix = std::vector<std::vector<double>>;  // row = from, column = to

// Dense jump-back transition: row s sends gamma[s] to position 1 and
// 1 - gamma[s] to position s + 1. Index i is position i + 1.
inline Matrix jump_back_matrix(const std::vector<double>& gamma) {
    const std::size_t n = gamma.size();
    Matrix t(n, std::vector<double>(n, 0.0));
    for (std::size_t from = 0; from < n; ++from) {
        t[from][0] += gamma[from];
        if (from + 1 < n) {
            t[from][from + 1] += 1.0 - gamma[from];
        }
    }
    return t;
}

// p' = p^T T, accumulated with long double.
inline std::vector<double> propagate(const std::vector<double>& p, const Matrix& t) {
    const std::size_t n = p.size();
    std::vector<double> out(n, 0.0);
    for (std::size_t to = 0; to < n; ++to) {
        long double acc = 0.0L;
        for (std::size_t from = 0; from < n; ++from) {
            acc += static_cast<long double>(p[from]) * t[from][to];
        }
        out[to] = static_cast<double>(acc);
    }
    return out;
}

// Posterior from an explicit likelihood vector: b at the beat state when the
// gate opens, epsilon everywhere else.
inline std::vector<double> direct_update(const std::vector<double>& predicted, double b,
                                         double epsilon, double threshold,
                                         const std::vector<bool>& beat_states) {
    std::vector<long double> weighted(predicted.size());
    long double z = 0.0L;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const double likelihood = (beat_states[i] && b >= threshold) ? b : epsilon;
        weighted[i] = static_cast<long double>(likelihood) * predicted[i];
        z += weighted[i];
    }
    std::vector<double> out(predicted.size());
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        out[i] = static_cast<double>(weighted[i] / z);
    }
    return out;
}

inline std::vector<double> direct_update_1d(const std::vector<double>& predicted, double b,
                                            double epsilon, double threshold) {
    std::vector<bool> beat(predicted.size(), false);
    beat[0] = true;
    return direct_update(predicted, b, epsilon, threshold, beat);
}

// Dense 2D pointer transition for rows min_len..max_len, built state by
// state from (row, position) coordinates.
struct PointerOracle {
    int min_len;
    int max_len;
    double p_switch;
    std::vector<std::pair<int, int>> states;  // (row length, position)
    Matrix transition;
    std::vector<bool> row_starts;

    std::size_t find(int row, int pos) const {
        for (std::size_t i = 0; i < states.size(); ++i) {
            if (states[i].first == row && states[i].second == pos) {
                return i;
            }
        }
        return states.size();
    }
};

inline PointerOracle pointer_oracle(int min_len, int max_len, double p_switch) {
    PointerOracle o{min_len, max_len, p_switch, {}, {}, {}};
    for (int m = min_len; m <= max_len; ++m) {
        for (int j = 1; j <= m; ++j) {
            o.states.emplace_back(m, j);
            o.row_starts.push_back(j == 1);
        }
    }
    const std::size_t n = o.states.size();
    o.transition.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t from = 0; from < n; ++from) {
        const auto [m, j] = o.states[from];
        if (j < m) {
            o.transition[from][o.find(m, j + 1)] = 1.0;
            continue;
        }
        double stay = 1.0 - p_switch;
        if (m > min_len) {
            o.transition[from][o.find(m - 1, 1)] += p_switch / 2;
        } else {
            stay += p_switch / 2;
        }
        if (m < max_len) {
            o.transition[from][o.find(m + 1, 1)] += p_switch / 2;
        } else {
            stay += p_switch / 2;
        }
        o.transition[from][o.find(m, 1)] += stay;
    }
    return o;
}

// Maximum one-to-one matching within +-tolerance by augmenting paths. Used to
// confirm the greedy matcher is optimal on well-separated beat lists.
inline std::size_t max_matching(const std::vector<double>& est, const std::vector<double>& ref,
                                double tolerance) {
    std::vector<int> owner(ref.size(), -1);
    std::function<bool(std::size_t, std::vector<bool>&)> augment =
        [&](std::size_t e, std::vector<bool>& seen) {
            for (std::size_t r = 0; r < ref.size(); ++r) {
                if (seen[r] || std::abs(est[e] - ref[r]) > tolerance + 1e-9) {
                    continue;
                }
                seen[r] = true;
                if (owner[r] < 0 || augment(static_cast<std::size_t>(owner[r]), seen)) {
                    owner[r] = static_cast<int>(e);
                    return true;
                }
            }
            return false;
        };
    std::size_t matched = 0;
    for (std::size_t e = 0; e < est.size(); ++e) {
        std::vector<bool> seen(ref.size(), false);
        matched += augment(e, seen) ? 1 : 0;
    }
    return matched;
}

inline std::vector<double> random_simplex(std::size_t n, std::mt19937_64& rng) {
    std::exponential_distribution<double> exp1(1.0);
    std::vector<double> p(n);
    double total = 0.0;
    for (auto& v : p) {
        v = exp1(rng);
        total += v;
    }
    for (auto& v : p) {
        v /= total;
    }
    return p;
}

inline double sum(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0);
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        worst = std::max(worst, std::abs(a[i] - b[i]));
    }
    return worst;
}

}  // namespace oracle
