#pragma once

// Small numeric helpers shared by the cosmology, certificate and solver headers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstddef>
#include <limits>
#include <numbers>
#include <utility>

#include <boost/math/tools/minima.hpp>

namespace flrw {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// x^e for x >= 0 and arbitrary real e > 0, computed as exp(e log x) with 0 -> 0.
inline double pow_nonneg(double x, double e) {
    if (x <= 0.0) return 0.0;
    return std::exp(e * std::log(x));
}

/// log(x) with log(0) = -inf and negative inputs clamped to -inf.
inline double safe_log(double x) {
    return x > 0.0 ? std::log(x) : -kInf;
}

/// Volume of the unit ball in R^n.
inline double unit_ball_volume(int n) {
    const double half = 0.5 * n;
    return std::pow(std::numbers::pi, half) / std::tgamma(half + 1.0);
}

/// Surface measure of the unit sphere, n * omega_n.
inline double unit_sphere_area(int n) { return n * unit_ball_volume(n); }

inline bool relative_close(double a, double b, double rel) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return std::abs(a - b) <= rel * scale;
}

enum class Sense { Minimize, Maximize };

struct Extremum {
    double value = 0.0;  // extremal value of the objective
    double arg = 0.0;    // location in t
};

/// Default node count of the coarse search grid.
inline constexpr std::size_t kDefaultGridNodes = 4096;

/// Global extremum of `objective` over the open interval (0, horizon).
///
/// The coarse search uses `nodes` points: uniform on [0, horizon (1 - 1e-9)] when the
/// horizon is finite, or uniform in s on [0, 1) with t = s / (1 - s) otherwise. The
/// endpoint limits are sampled one-sidedly at t = 1e-12 and at the compactified
/// boundary. The best bracket is refined with Brent's method to about 1e-10 relative.
/// The objective may return +-inf.
template <class F>
Extremum grid_extremum(F&& objective, double horizon, Sense sense,
                       std::size_t nodes = kDefaultGridNodes) {
    const bool finite = std::isfinite(horizon);
    const double t_last = finite ? horizon * (1.0 - 1e-9) : 0.0;
    const double s_last = 1.0 - 1e-12;
    auto to_t = [&](double s) {
        if (finite) return s * t_last;
        return s >= 1.0 ? std::numeric_limits<double>::max() : s / (1.0 - s);
    };
    // signed so that we always minimise
    const double sign = sense == Sense::Minimize ? 1.0 : -1.0;
    auto eval = [&](double s) {
        const double v = sign * objective(std::max(to_t(s), 1e-12));
        return std::isnan(v) ? kInf : v;
    };

    const std::size_t count = std::max<std::size_t>(nodes, 4);
    // s-nodes: 0 (evaluated at t=1e-12), uniform interior, and the boundary node
    std::size_t best = 0;
    double best_val = eval(0.0);
    auto node_s = [&](std::size_t i) {
        if (i + 1 == count) return finite ? 1.0 : s_last;
        return static_cast<double>(i) / static_cast<double>(count - 1);
    };
    for (std::size_t i = 1; i < count; ++i) {
        const double v = eval(node_s(i));
        if (v < best_val) {
            best_val = v;
            best = i;
        }
    }

    double best_s = node_s(best);
    if (std::isfinite(best_val)) {
        const double lo = best == 0 ? 0.0 : node_s(best - 1);
        const double hi = best + 1 == count ? node_s(best) : node_s(best + 1);
        const int bits = 34;  // ~ 1e-10 relative in the bracket coordinate
        std::uintmax_t iters = 200;
        const auto [s_ref, v_ref] =
            boost::math::tools::brent_find_minima(eval, lo, hi, bits, iters);
        if (v_ref < best_val) {
            best_val = v_ref;
            best_s = s_ref;
        }
    }
    return {sign * best_val, std::max(to_t(best_s), 1e-12)};
}

}  // namespace flrw
