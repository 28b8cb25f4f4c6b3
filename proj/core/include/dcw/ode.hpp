#pragma once

#include "dcw/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace dcw {

struct IntegratorOptions {
    double rtol = 1e-9;
    double atol = 1e-12;
    double h_max = std::numeric_limits<double>::infinity();
    long max_steps = 50'000'000;
};

struct IntegratorStats {
    long steps = 0;
    long rejected = 0;
    double max_error_estimate = 0.0; // largest accepted scaled error
};

/// Embedded Dormand-Prince 5(4) stepper with the classic order-4 continuous
/// extension. The right-hand side is a callable f(t, y, dydt).
///
/// Usage: init(t0, y0, t_end), then step() until it returns false. After each
/// accepted step the interval [t_prev, t] can be interpolated with dense().
template <int N, class F>
class Dopri5 {
public:
    using State = std::array<double, N>;

    explicit Dopri5(F f, IntegratorOptions opts = {}) : f_(std::move(f)), opts_(opts) {}

    void init(double t0, const State& y0, double t_end) {
        t_ = t0;
        t_prev_ = t0;
        t_end_ = t_end;
        y_ = y0;
        y_prev_ = y0;
        f_(t_, y_, k_[0]); // FSAL slot
        h_ = initial_step();
        stats_ = {};
    }

    double t() const { return t_; }
    double t_prev() const { return t_prev_; }
    const State& y() const { return y_; }
    const State& y_prev() const { return y_prev_; }
    const IntegratorStats& stats() const { return stats_; }
    double suggested_step() const { return h_; }

    /// Advances by one accepted step, never past t_end. Returns false once
    /// t_end has been reached.
    bool step() {
        if (t_ >= t_end_) return false;
        const double uround = std::numeric_limits<double>::epsilon();
        bool rejected_last = false;
        for (;;) {
            if (stats_.steps + stats_.rejected > opts_.max_steps)
                throw NumericalFailure("ode: step budget exhausted at t=" + std::to_string(t_));
            if (h_ < 16.0 * uround * std::max(1.0, std::abs(t_)))
                throw NumericalFailure("ode: step size underflow at t=" + std::to_string(t_) +
                                       " (system too stiff for this explicit pair)");
            bool last = false;
            if (t_ + 1.01 * h_ >= t_end_) {
                h_ = t_end_ - t_;
                last = true;
            }

            const double err = attempt(h_);
            const double fac = std::clamp(0.9 * std::pow(std::max(err, 1e-32), -0.2), 0.2, 5.0);
            if (err <= 1.0) {
                accept(h_);
                stats_.steps++;
                stats_.max_error_estimate = std::max(stats_.max_error_estimate, err);
                // no growth right after a rejection
                double f_next = rejected_last ? std::min(fac, 1.0) : fac;
                h_ = std::min(h_ * f_next, opts_.h_max);
                if (last) t_ = t_end_; // absorb roundoff
                return true;
            }
            stats_.rejected++;
            rejected_last = true;
            h_ *= fac;
        }
    }

    /// Interpolates the solution inside the last accepted step.
    State dense(double ti) const {
        const double h = t_ - t_prev_;
        const double theta = h == 0.0 ? 0.0 : (ti - t_prev_) / h;
        State out;
        for (int i = 0; i < N; ++i) {
            out[i] = rcont_[0][i] +
                     theta * (rcont_[1][i] +
                              (1.0 - theta) * (rcont_[2][i] +
                                               theta * (rcont_[3][i] +
                                                        (1.0 - theta) * rcont_[4][i])));
        }
        return out;
    }

    /// Raw dense coefficients of the last step, for trajectory storage.
    const std::array<State, 5>& dense_coefficients() const { return rcont_; }

private:
    double initial_step() const {
        // Hairer-style hinit on the error weights.
        double d0 = 0.0, d1 = 0.0;
        for (int i = 0; i < N; ++i) {
            const double sc = opts_.atol + opts_.rtol * std::abs(y_[i]);
            d0 = std::max(d0, std::abs(y_[i]) / sc);
            d1 = std::max(d1, std::abs(k_[0][i]) / sc);
        }
        double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        h0 = std::min(h0, std::abs(t_end_ - t_));
        State y1, f1;
        for (int i = 0; i < N; ++i) y1[i] = y_[i] + h0 * k_[0][i];
        f_(t_ + h0, y1, f1);
        double d2 = 0.0;
        for (int i = 0; i < N; ++i) {
            const double sc = opts_.atol + opts_.rtol * std::abs(y_[i]);
            d2 = std::max(d2, std::abs(f1[i] - k_[0][i]) / sc / h0);
        }
        double h1 = (std::max(d1, d2) <= 1e-15)
                        ? std::max(1e-6, h0 * 1e-3)
                        : std::pow(0.01 / std::max(d1, d2), 0.2);
        return std::min({100.0 * h0, h1, std::abs(t_end_ - t_), opts_.h_max});
    }

    // Tries a step of size h from (t_, y_); fills k_, ynew_, err. Returns the
    // scaled error norm.
    double attempt(double h) {
        static constexpr double a21 = 1.0 / 5;
        static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
        static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
        static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                                a53 = 64448.0 / 6561, a54 = -212.0 / 729;
        static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                                a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                                a65 = -5103.0 / 18656;
        static constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                                a75 = -2187.0 / 6784, a76 = 11.0 / 84;
        static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                                e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

        State w;
        for (int i = 0; i < N; ++i) w[i] = y_[i] + h * a21 * k_[0][i];
        f_(t_ + h / 5.0, w, k_[1]);
        for (int i = 0; i < N; ++i) w[i] = y_[i] + h * (a31 * k_[0][i] + a32 * k_[1][i]);
        f_(t_ + 3.0 * h / 10.0, w, k_[2]);
        for (int i = 0; i < N; ++i)
            w[i] = y_[i] + h * (a41 * k_[0][i] + a42 * k_[1][i] + a43 * k_[2][i]);
        f_(t_ + 4.0 * h / 5.0, w, k_[3]);
        for (int i = 0; i < N; ++i)
            w[i] = y_[i] + h * (a51 * k_[0][i] + a52 * k_[1][i] + a53 * k_[2][i] +
                                a54 * k_[3][i]);
        f_(t_ + 8.0 * h / 9.0, w, k_[4]);
        for (int i = 0; i < N; ++i)
            w[i] = y_[i] + h * (a61 * k_[0][i] + a62 * k_[1][i] + a63 * k_[2][i] +
                                a64 * k_[3][i] + a65 * k_[4][i]);
        f_(t_ + h, w, k_[5]);
        for (int i = 0; i < N; ++i)
            ynew_[i] = y_[i] + h * (a71 * k_[0][i] + a73 * k_[2][i] + a74 * k_[3][i] +
                                    a75 * k_[4][i] + a76 * k_[5][i]);
        f_(t_ + h, ynew_, k_[6]);

        double err2 = 0.0;
        for (int i = 0; i < N; ++i) {
            const double e = h * (e1 * k_[0][i] + e3 * k_[2][i] + e4 * k_[3][i] +
                                  e5 * k_[4][i] + e6 * k_[5][i] + e7 * k_[6][i]);
            const double sc =
                opts_.atol + opts_.rtol * std::max(std::abs(y_[i]), std::abs(ynew_[i]));
            err2 += (e / sc) * (e / sc);
        }
        return std::sqrt(err2 / N);
    }

    void accept(double h) {
        static constexpr double d1 = -12715105075.0 / 11282082432.0;
        static constexpr double d3 = 87487479700.0 / 32700410799.0;
        static constexpr double d4 = -10690763975.0 / 1880347072.0;
        static constexpr double d5 = 701980252875.0 / 199316789632.0;
        static constexpr double d6 = -1453857185.0 / 822651844.0;
        static constexpr double d7 = 69997945.0 / 29380423.0;

        for (int i = 0; i < N; ++i) {
            const double ydiff = ynew_[i] - y_[i];
            const double bspl = h * k_[0][i] - ydiff;
            rcont_[0][i] = y_[i];
            rcont_[1][i] = ydiff;
            rcont_[2][i] = bspl;
            rcont_[3][i] = ydiff - h * k_[6][i] - bspl;
            rcont_[4][i] = h * (d1 * k_[0][i] + d3 * k_[2][i] + d4 * k_[3][i] +
                                d5 * k_[4][i] + d6 * k_[5][i] + d7 * k_[6][i]);
        }
        t_prev_ = t_;
        y_prev_ = y_;
        t_ += h;
        y_ = ynew_;
        k_[0] = k_[6]; // FSAL
    }

    F f_;
    IntegratorOptions opts_;
    double t_ = 0.0, t_prev_ = 0.0, t_end_ = 0.0, h_ = 0.0;
    State y_{}, y_prev_{}, ynew_{};
    std::array<State, 7> k_{};
    std::array<State, 5> rcont_{};
    IntegratorStats stats_;
};

/// Stored dense-output segment of one accepted step.
template <int N>
struct DenseSegment {
    double t0, t1;
    std::array<std::array<double, N>, 5> rcont;

    std::array<double, N> eval(double t) const {
        const double theta = t1 == t0 ? 0.0 : (t - t0) / (t1 - t0);
        std::array<double, N> out;
        for (int i = 0; i < N; ++i) {
            out[i] = rcont[0][i] +
                     theta * (rcont[1][i] +
                              (1.0 - theta) * (rcont[2][i] +
                                               theta * (rcont[3][i] +
                                                        (1.0 - theta) * rcont[4][i])));
        }
        return out;
    }
};

/// Piecewise dense-output trajectory over [t_begin, t_end].
template <int N>
class DenseTrajectory {
public:
    void reserve(std::size_t n) { segments_.reserve(n); }

    void push(const DenseSegment<N>& seg) { segments_.push_back(seg); }

    bool empty() const { return segments_.empty(); }
    double t_begin() const { return segments_.front().t0; }
    double t_end() const { return segments_.back().t1; }

    std::array<double, N> eval(double t) const {
        // binary search for the segment containing t
        std::size_t lo = 0, hi = segments_.size() - 1;
        while (lo < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (segments_[mid].t1 < t)
                lo = mid + 1;
            else
                hi = mid;
        }
        return segments_[lo].eval(t);
    }

    const std::vector<DenseSegment<N>>& segments() const { return segments_; }

private:
    std::vector<DenseSegment<N>> segments_;
};

} // namespace dcw
