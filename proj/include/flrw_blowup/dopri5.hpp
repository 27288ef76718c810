#pragma once

// Embedded Dormand-Prince 5(4) stepper with FSAL, max-norm error control and
// blow-up / step-collapse detection. State is a flat std::vector<double>.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace flrw {

enum class Termination { ReachedHorizon, BlowupThreshold, StepUnderflow, MaxSteps };

inline const char* to_string(Termination t) {
    switch (t) {
        case Termination::ReachedHorizon: return "ReachedHorizon";
        case Termination::BlowupThreshold: return "BlowupThreshold";
        case Termination::StepUnderflow: return "StepUnderflow";
        case Termination::MaxSteps: return "MaxSteps";
    }
    return "?";
}

struct StepControls {
    double rtol = 1e-10;
    double atol = 1e-12;
    double h_init = 0.0;  // 0: automatic
    double h_max = std::numeric_limits<double>::infinity();
    double fixed_step = 0.0;  // > 0 disables error control
    std::size_t max_steps = 50'000'000;
    double blowup_factor = 1e8;      // |y| > factor * max(1, |y0|)
    double underflow_factor = 1e-14; // step < factor * max(1, t)
};

class DormandPrince45 {
public:
    using State = std::vector<double>;

    explicit DormandPrince45(StepControls controls = {}) : ctl_(controls) {}

    const StepControls& controls() const { return ctl_; }
    double step_size() const { return h_; }
    double last_step() const { return last_h_; }
    std::size_t accepted() const { return accepted_; }
    std::size_t rejected() const { return rejected_; }

    /// Advances (t, y) towards t_target. `on_step(t, y)` runs after every accepted step.
    /// `magnitude(y)` is compared against `blowup_level` for blow-up declaration.
    template <class Rhs, class OnStep, class Magnitude>
    Termination advance(Rhs&& f, double& t, State& y, double t_target, OnStep&& on_step,
                        Magnitude&& magnitude, double blowup_level) {
        const std::size_t dim = y.size();
        resize(dim);
        if (!have_k1_ || k1_.size() != dim) {
            f(t, y, k1_);
            have_k1_ = true;
        }
        if (h_ <= 0.0) h_ = ctl_.fixed_step > 0.0 ? ctl_.fixed_step : initial_step(f, t, y);

        while (t < t_target) {
            if (accepted_ + rejected_ >= ctl_.max_steps) return Termination::MaxSteps;
            const double floor = ctl_.underflow_factor * std::max(1.0, std::abs(t));
            if (h_ < floor) {
                return magnitude(y) > blowup_level ? Termination::BlowupThreshold
                                                   : Termination::StepUnderflow;
            }
            double h = std::min({h_, ctl_.h_max, t_target - t});
            const bool last = h >= t_target - t;
            stage(f, t, y, h);
            double err = ctl_.fixed_step > 0.0 ? 0.0 : error_norm(y);
            if (!std::isfinite(err)) err = 1e10;
            if (err <= 1.0) {
                t = last ? t_target : t + h;
                y.swap(ynew_);
                k1_.swap(k7_);
                last_h_ = h;
                ++accepted_;
                if (ctl_.fixed_step <= 0.0) {
                    const double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
                    // keep the proposed step when the last step was clipped to the target
                    h_ = last && h < h_ ? std::max(h_, h * fac) : h * fac;
                }
                for (double v : y) {
                    if (!std::isfinite(v)) return Termination::StepUnderflow;
                }
                on_step(t, y);
                if (magnitude(y) > blowup_level &&
                    h_ < ctl_.underflow_factor * std::max(1.0, std::abs(t)))
                    return Termination::BlowupThreshold;
            } else {
                ++rejected_;
                h_ = h * std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
            }
        }
        return Termination::ReachedHorizon;
    }

private:
    void resize(std::size_t n) {
        for (auto* v : {&k1_, &k2_, &k3_, &k4_, &k5_, &k6_, &k7_, &tmp_, &ynew_, &err_}) {
            if (v->size() != n) {
                v->assign(n, 0.0);
                if (v == &k1_) have_k1_ = false;
            }
        }
    }

    template <class Rhs>
    double initial_step(Rhs&& f, double t, const State& y) {
        // Hairer-Norsett-Wanner starting step heuristic
        const std::size_t n = y.size();
        double d0 = 0.0, d1 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double sc = ctl_.atol + ctl_.rtol * std::abs(y[i]);
            d0 = std::max(d0, std::abs(y[i]) / sc);
            d1 = std::max(d1, std::abs(k1_[i]) / sc);
        }
        double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        h0 = std::min(h0, ctl_.h_max);
        for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + h0 * k1_[i];
        f(t + h0, tmp_, k2_);
        double d2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double sc = ctl_.atol + ctl_.rtol * std::abs(y[i]);
            d2 = std::max(d2, std::abs(k2_[i] - k1_[i]) / sc);
        }
        d2 /= h0;
        const double h1 = std::max(d1, d2) <= 1e-15 ? std::max(1e-6, h0 * 1e-3)
                                                     : std::pow(0.01 / std::max(d1, d2), 0.2);
        return std::min({100.0 * h0, h1, ctl_.h_max});
    }

    template <class Rhs>
    void stage(Rhs&& f, double t, const State& y, double h) {
        constexpr double a21 = 1.0 / 5.0;
        constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
        constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
        constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                         a54 = -212.0 / 729.0;
        constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                         a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
        constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                         b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
        constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                         e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
        const std::size_t n = y.size();
        for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + h * a21 * k1_[i];
        f(t + h / 5.0, tmp_, k2_);
        for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + h * (a31 * k1_[i] + a32 * k2_[i]);
        f(t + 0.3 * h, tmp_, k3_);
        for (std::size_t i = 0; i < n; ++i)
            tmp_[i] = y[i] + h * (a41 * k1_[i] + a42 * k2_[i] + a43 * k3_[i]);
        f(t + 0.8 * h, tmp_, k4_);
        for (std::size_t i = 0; i < n; ++i)
            tmp_[i] = y[i] + h * (a51 * k1_[i] + a52 * k2_[i] + a53 * k3_[i] + a54 * k4_[i]);
        f(t + 8.0 / 9.0 * h, tmp_, k5_);
        for (std::size_t i = 0; i < n; ++i)
            tmp_[i] = y[i] + h * (a61 * k1_[i] + a62 * k2_[i] + a63 * k3_[i] + a64 * k4_[i] + a65 * k5_[i]);
        f(t + h, tmp_, k6_);
        for (std::size_t i = 0; i < n; ++i)
            ynew_[i] = y[i] + h * (b1 * k1_[i] + b3 * k3_[i] + b4 * k4_[i] + b5 * k5_[i] + b6 * k6_[i]);
        f(t + h, ynew_, k7_);
        for (std::size_t i = 0; i < n; ++i)
            err_[i] = h * (e1 * k1_[i] + e3 * k3_[i] + e4 * k4_[i] + e5 * k5_[i] + e6 * k6_[i] + e7 * k7_[i]);
    }

    double error_norm(const State& y) const {
        double worst = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            const double sc = ctl_.atol + ctl_.rtol * std::max(std::abs(y[i]), std::abs(ynew_[i]));
            worst = std::max(worst, std::abs(err_[i]) / sc);
        }
        return worst;
    }

    StepControls ctl_;
    double h_ = 0.0;
    double last_h_ = 0.0;
    std::size_t accepted_ = 0;
    std::size_t rejected_ = 0;
    bool have_k1_ = false;
    State k1_, k2_, k3_, k4_, k5_, k6_, k7_, tmp_, ynew_, err_;
};

}  // namespace flrw
