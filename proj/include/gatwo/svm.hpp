#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <list>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gatwo/error.hpp"
#include "gatwo/matrix.hpp"

namespace gatwo::svm {

struct Kernel {
    enum class Kind { Linear, Polynomial, Rbf };

    Kind kind = Kind::Rbf;
    int degree = 1;
    double gamma = 0.25;

    static Kernel linear() { return {Kind::Linear, 1, 0.0}; }
    static Kernel polynomial(int degree) {
        if (degree < 1) throw Error(ErrorKind::InvalidArgument, "polynomial degree must be >= 1");
        return {Kind::Polynomial, degree, 0.0};
    }
    static Kernel rbf(double gamma) {
        if (!(gamma > 0.0)) throw Error(ErrorKind::InvalidArgument, "rbf gamma must be > 0");
        return {Kind::Rbf, 1, gamma};
    }

    friend bool operator==(const Kernel&, const Kernel&) = default;
};

constexpr std::string_view to_string(Kernel::Kind kind) noexcept {
    switch (kind) {
    case Kernel::Kind::Linear: return "linear";
    case Kernel::Kind::Polynomial: return "polynomial";
    case Kernel::Kind::Rbf: return "rbf";
    }
    return "?";
}

inline double kernel_eval(const Kernel& k, std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw Error(ErrorKind::DimensionMismatch,
                    "kernel operands " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
    switch (k.kind) {
    case Kernel::Kind::Linear:
        return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
    case Kernel::Kind::Polynomial:
        return std::pow(std::inner_product(a.begin(), a.end(), b.begin(), 0.0) + 1.0, k.degree);
    case Kernel::Kind::Rbf: {
        double dist2 = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double d = a[i] - b[i];
            dist2 += d * d;
        }
        return std::exp(-k.gamma * dist2);
    }
    }
    return 0.0;
}

struct Config {
    Kernel kernel = Kernel::rbf(0.25);
    double cost = 1.0;
    /// Stopping tolerance on the maximal KKT violation.
    double tol = 1e-3;
    /// 0 selects the default of max(10 * N * d, 10^7) pair updates.
    std::size_t max_iterations = 0;
    std::size_t cache_megabytes = 256;
    /// Called after every pair update with (iteration, dual objective).
    std::function<void(std::size_t, double)> on_iteration;
};

/// Full dual solution in the caller's row order.
struct DualSolution {
    std::vector<double> alpha;
    double bias = 0.0;
    double objective = 0.0;
    std::size_t iterations = 0;
};

struct Model {
    Kernel kernel;
    double cost = 1.0;
    double bias = 0.0;
    FeatureMatrix support_vectors;
    /// alpha_i * y_i for each stored support vector.
    std::vector<double> dual_coefs;

    [[nodiscard]] std::size_t dimension() const noexcept { return support_vectors.cols(); }

    friend bool operator==(const Model&, const Model&) = default;
};

namespace detail {

/// Kernel rows computed on demand, least-recently-used rows evicted first.
class KernelRows {
public:
    KernelRows(const FeatureMatrix& x, const Kernel& kernel, std::size_t megabytes)
        : x_(x), kernel_(kernel), rows_(x.rows()), where_(x.rows()) {
        const std::size_t row_bytes = std::max<std::size_t>(1, x.rows() * sizeof(double));
        capacity_ = std::max<std::size_t>(2, megabytes * 1024 * 1024 / row_bytes);
        diagonal_.resize(x.rows());
        for (std::size_t i = 0; i < x.rows(); ++i) diagonal_[i] = kernel_eval(kernel_, x.row(i), x.row(i));
    }

    [[nodiscard]] double diagonal(std::size_t i) const { return diagonal_[i]; }

    /// The returned view stays valid until two further distinct rows are requested.
    std::span<const double> row(std::size_t i) {
        if (!rows_[i].empty()) {
            order_.splice(order_.begin(), order_, where_[i]);
            return rows_[i];
        }
        if (order_.size() >= capacity_) {
            const std::size_t victim = order_.back();
            order_.pop_back();
            std::vector<double>().swap(rows_[victim]);
        }
        auto& r = rows_[i];
        r.resize(x_.rows());
        const auto xi = x_.row(i);
        for (std::size_t t = 0; t < x_.rows(); ++t) r[t] = kernel_eval(kernel_, xi, x_.row(t));
        order_.push_front(i);
        where_[i] = order_.begin();
        return r;
    }

private:
    const FeatureMatrix& x_;
    Kernel kernel_;
    std::vector<std::vector<double>> rows_;
    std::vector<std::list<std::size_t>::iterator> where_;
    std::list<std::size_t> order_;
    std::vector<double> diagonal_;
    std::size_t capacity_ = 2;
};

/// Row order that depends only on the data, so any permutation of the
/// training rows produces the same solver trajectory.
inline std::vector<std::size_t> canonical_order(const FeatureMatrix& x, std::span<const int> y) {
    std::vector<std::size_t> order(x.rows());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto ra = x.row(a);
        const auto rb = x.row(b);
        if (std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end())) return true;
        if (std::lexicographical_compare(rb.begin(), rb.end(), ra.begin(), ra.end())) return false;
        return y[a] < y[b];
    });
    return order;
}

/// Pairwise coordinate ascent on the dual (SMO), working set chosen by the
/// maximal-violating pair with second-order gain. Works on the minimisation
/// form  f(a) = 1/2 a'Qa - e'a,  Q_ij = y_i y_j K_ij.
inline DualSolution smo(const FeatureMatrix& x, std::span<const int> y, const Config& config) {
    constexpr double kTau = 1e-12;
    const std::size_t n = x.rows();
    const double c = config.cost;
    const std::size_t max_iter =
        config.max_iterations != 0 ? config.max_iterations
                                   : std::max<std::size_t>(10 * n * std::max<std::size_t>(1, x.cols()), 10'000'000);

    KernelRows kernel(x, config.kernel, config.cache_megabytes);
    std::vector<double> alpha(n, 0.0);
    std::vector<double> grad(n, -1.0);
    auto yd = [&](std::size_t i) { return static_cast<double>(y[i]); };
    auto is_upper = [&](std::size_t i) { return alpha[i] >= c; };
    auto is_lower = [&](std::size_t i) { return alpha[i] <= 0.0; };

    std::size_t iter = 0;
    for (;;) {
        // i: maximal -y_t G_t over I_up.
        double gmax = -std::numeric_limits<double>::infinity();
        std::ptrdiff_t gmax_idx = -1;
        for (std::size_t t = 0; t < n; ++t) {
            if (y[t] == 1) {
                if (!is_upper(t) && -grad[t] >= gmax) {
                    gmax = -grad[t];
                    gmax_idx = static_cast<std::ptrdiff_t>(t);
                }
            } else if (!is_lower(t) && grad[t] >= gmax) {
                gmax = grad[t];
                gmax_idx = static_cast<std::ptrdiff_t>(t);
            }
        }

        // j: best second-order gain over I_low.
        double gmax2 = -std::numeric_limits<double>::infinity();
        std::ptrdiff_t gmin_idx = -1;
        double obj_diff_min = std::numeric_limits<double>::infinity();
        if (gmax_idx >= 0) {
            const auto i = static_cast<std::size_t>(gmax_idx);
            const auto k_i = kernel.row(i);
            const double kii = kernel.diagonal(i);
            for (std::size_t t = 0; t < n; ++t) {
                if (y[t] == 1) {
                    if (is_lower(t)) continue;
                    gmax2 = std::max(gmax2, grad[t]);
                    const double grad_diff = gmax + grad[t];
                    if (grad_diff > 0.0) {
                        const double quad = kii + kernel.diagonal(t) - 2.0 * yd(i) * k_i[t];
                        const double obj_diff = -(grad_diff * grad_diff) / (quad > 0.0 ? quad : kTau);
                        if (obj_diff <= obj_diff_min) {
                            gmin_idx = static_cast<std::ptrdiff_t>(t);
                            obj_diff_min = obj_diff;
                        }
                    }
                } else {
                    if (is_upper(t)) continue;
                    gmax2 = std::max(gmax2, -grad[t]);
                    const double grad_diff = gmax - grad[t];
                    if (grad_diff > 0.0) {
                        const double quad = kii + kernel.diagonal(t) + 2.0 * yd(i) * k_i[t];
                        const double obj_diff = -(grad_diff * grad_diff) / (quad > 0.0 ? quad : kTau);
                        if (obj_diff <= obj_diff_min) {
                            gmin_idx = static_cast<std::ptrdiff_t>(t);
                            obj_diff_min = obj_diff;
                        }
                    }
                }
            }
        }
        if (gmax_idx < 0 || gmin_idx < 0 || gmax + gmax2 < config.tol) break;
        if (iter >= max_iter)
            throw Error(ErrorKind::NoConvergence,
                        "SMO exceeded " + std::to_string(max_iter) + " iterations");
        ++iter;

        const auto i = static_cast<std::size_t>(gmax_idx);
        const auto j = static_cast<std::size_t>(gmin_idx);
        const auto k_i = kernel.row(i);
        const auto k_j = kernel.row(j);
        const double q_ij = yd(i) * yd(j) * k_i[j];
        const double old_ai = alpha[i];
        const double old_aj = alpha[j];

        if (y[i] != y[j]) {
            double quad = kernel.diagonal(i) + kernel.diagonal(j) + 2.0 * q_ij;
            if (quad <= 0.0) quad = kTau;
            const double delta = (-grad[i] - grad[j]) / quad;
            const double diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if (diff > 0.0) {
                if (alpha[j] < 0.0) {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if (alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if (diff > 0.0) {
                if (alpha[i] > c) {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if (alpha[j] > c) {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            double quad = kernel.diagonal(i) + kernel.diagonal(j) - 2.0 * q_ij;
            if (quad <= 0.0) quad = kTau;
            const double delta = (grad[i] - grad[j]) / quad;
            const double sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if (sum > c) {
                if (alpha[i] > c) {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if (alpha[j] < 0.0) {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if (sum > c) {
                if (alpha[j] > c) {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if (alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }

        const double d_ai = alpha[i] - old_ai;
        const double d_aj = alpha[j] - old_aj;
        for (std::size_t t = 0; t < n; ++t)
            grad[t] += yd(t) * (yd(i) * k_i[t] * d_ai + yd(j) * k_j[t] * d_aj);

        if (config.on_iteration) {
            double f = 0.0;
            for (std::size_t t = 0; t < n; ++t) f += alpha[t] * (grad[t] - 1.0);
            config.on_iteration(iter, -0.5 * f);
        }
    }

    // Bias: mean over free vectors, else the midpoint of the feasible interval.
    double upper = std::numeric_limits<double>::infinity();
    double lower = -std::numeric_limits<double>::infinity();
    double free_sum = 0.0;
    std::size_t free_count = 0;
    for (std::size_t t = 0; t < n; ++t) {
        const double yg = yd(t) * grad[t];
        if (is_upper(t)) {
            if (y[t] == -1) upper = std::min(upper, yg);
            else lower = std::max(lower, yg);
        } else if (is_lower(t)) {
            if (y[t] == 1) upper = std::min(upper, yg);
            else lower = std::max(lower, yg);
        } else {
            ++free_count;
            free_sum += yg;
        }
    }
    const double r = free_count > 0 ? free_sum / static_cast<double>(free_count) : (upper + lower) / 2.0;

    DualSolution out;
    out.alpha = std::move(alpha);
    out.bias = -r;
    out.iterations = iter;
    double f = 0.0;
    for (std::size_t t = 0; t < n; ++t) f += out.alpha[t] * (grad[t] - 1.0);
    out.objective = -0.5 * f;
    return out;
}

inline std::vector<int> signed_labels(std::span<const int> labels) {
    std::vector<int> y(labels.size());
    bool pos = false;
    bool neg = false;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != 0 && labels[i] != 1)
            throw Error(ErrorKind::InvalidArgument, "class labels must be 0 or 1");
        y[i] = labels[i] == 1 ? 1 : -1;
        (labels[i] == 1 ? pos : neg) = true;
    }
    if (!pos || !neg) throw Error(ErrorKind::SingleClassData, "training data has a single class");
    return y;
}

struct Canonical {
    std::vector<std::size_t> order;
    FeatureMatrix x;
    std::vector<int> y;
};

inline Canonical canonicalize(const FeatureMatrix& x, std::span<const int> labels) {
    if (x.rows() != labels.size())
        throw Error(ErrorKind::DimensionMismatch, std::to_string(x.rows()) + " rows vs " +
                                                      std::to_string(labels.size()) + " labels");
    if (x.cols() == 0) throw Error(ErrorKind::DimensionMismatch, "no features");
    const auto y = signed_labels(labels);
    Canonical out{canonical_order(x, y), FeatureMatrix(x.rows(), x.cols()), std::vector<int>(x.rows())};
    for (std::size_t k = 0; k < out.order.size(); ++k) {
        std::copy_n(x.row(out.order[k]).begin(), x.cols(), out.x.row(k).begin());
        out.y[k] = y[out.order[k]];
    }
    return out;
}

inline void check_config(const Config& config) {
    if (!(config.cost > 0.0)) throw Error(ErrorKind::InvalidArgument, "cost must be > 0");
    if (!(config.tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "tol must be > 0");
}

} // namespace detail

/// Solves the dual for labels in {0,1}; alpha is returned in the input row order.
inline DualSolution solve_dual(const FeatureMatrix& x, std::span<const int> labels, const Config& config) {
    detail::check_config(config);
    const auto canon = detail::canonicalize(x, labels);
    auto solution = detail::smo(canon.x, canon.y, config);
    std::vector<double> alpha(x.rows());
    for (std::size_t k = 0; k < canon.order.size(); ++k) alpha[canon.order[k]] = solution.alpha[k];
    solution.alpha = std::move(alpha);
    return solution;
}

/// Trains a soft-margin classifier on labels in {0,1}. Only vectors with a
/// positive multiplier are kept.
inline Model train(const FeatureMatrix& x, std::span<const int> labels, const Config& config = {}) {
    detail::check_config(config);
    const auto canon = detail::canonicalize(x, labels);
    const auto solution = detail::smo(canon.x, canon.y, config);
    Model model{config.kernel, config.cost, solution.bias, FeatureMatrix(), {}};
    for (std::size_t k = 0; k < canon.x.rows(); ++k) {
        if (solution.alpha[k] > 0.0) {
            model.support_vectors.append_row(canon.x.row(k));
            model.dual_coefs.push_back(solution.alpha[k] * static_cast<double>(canon.y[k]));
        }
    }
    return model;
}

inline double decision_value(const Model& model, std::span<const double> x) {
    if (!model.support_vectors.empty() && x.size() != model.dimension())
        throw Error(ErrorKind::DimensionMismatch, "input has " + std::to_string(x.size()) +
                                                      " features, model has " +
                                                      std::to_string(model.dimension()));
    double sum = 0.0;
    for (std::size_t k = 0; k < model.dual_coefs.size(); ++k)
        sum += model.dual_coefs[k] * kernel_eval(model.kernel, model.support_vectors.row(k), x);
    return sum + model.bias;
}

/// Class in {0,1}; a decision value of exactly 0 is class 1.
inline int predict(const Model& model, std::span<const double> x) {
    return decision_value(model, x) >= 0.0 ? 1 : 0;
}

inline std::vector<int> predict_all(const Model& model, const FeatureMatrix& x) {
    std::vector<int> out(x.rows());
    for (std::size_t r = 0; r < x.rows(); ++r) out[r] = predict(model, x.row(r));
    return out;
}

} // namespace gatwo::svm
