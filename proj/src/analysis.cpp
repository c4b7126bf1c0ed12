#include "mwnc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mwnc {

namespace {

constexpr double kDriftEps = 1e-9;
constexpr double kRootTol = 1e-14;

void check_model(const WalkModel& m) {
    if (!(m.c_hat > 0.0 && m.c_hat <= 1.0))
        throw std::domain_error("WalkModel: c_hat must be in (0, 1]");
    if (!(m.v.num > 0 && m.v.num < m.v.den))
        throw std::domain_error("WalkModel: v must be in (0, 1)");
}

// E[exp(-theta X)] for the actual step distribution; the printed expansion of
// the step MGF is this with theta negated, so the nonzero root here is the
// negative of find_theta0's. Downstream formulas need this convention to
// agree with the Monte Carlo walk.
double mgf_h(double theta, const WalkModel& m) {
    return m.c_hat * std::exp(theta * m.d_l()) + (1.0 - m.c_hat) * std::exp(-theta * m.d_r());
}

// Sign-anchored bisection; a and b just need opposite signs of f, in any order.
double bisect(double a, double b, const auto& f) {
    double fa = f(a);
    for (int iter = 0; iter < 200 && std::abs(b - a) > kRootTol; ++iter) {
        const double mid = 0.5 * (a + b);
        const double fm = f(mid);
        if ((fm > 0) == (fa > 0)) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    return 0.5 * (a + b);
}

// Nonzero root of mgf_h = 1 (the drift-side root). The MGF minimizer sits
// strictly between the two roots, which gives a reliable bracket anchor.
double theta_h(const WalkModel& m) {
    if (m.c_hat >= 1.0) throw NumericError("step MGF has no nonzero root (c_hat = 1)");
    const auto f = [&](double th) { return mgf_h(th, m) - 1.0; };
    const double theta_star = std::log((1.0 - m.c_hat) * m.d_r() / (m.c_hat * m.d_l()));
    const double dir = theta_star < 0 ? -1.0 : 1.0;
    double span = std::max(1.0, 2.0 * std::abs(theta_star));
    while (f(theta_star + dir * span) < 0) {
        span *= 2.0;
        if (span > 1e8) throw NumericError("theta root bracketing failed");
    }
    return bisect(theta_star, theta_star + dir * span, f);
}

struct RootPair {
    double nu1;  // smaller root of mgf_h = target
    double nu2;  // larger root
};

RootPair mgf_roots(double target, const WalkModel& m) {
    if (target < 1.0) throw NumericError("mgf_roots: target below 1");
    if (m.c_hat >= 1.0) throw NumericError("mgf_roots: step MGF degenerate at c_hat = 1");
    // Minimizer of mgf_h.
    const double theta_star =
        std::log((1.0 - m.c_hat) * m.d_r() / (m.c_hat * m.d_l()));
    const auto f = [&](double th) { return mgf_h(th, m) - target; };
    if (f(theta_star) > 0) throw NumericError("mgf_roots: no real roots at this s");

    double hi = std::max(1.0, std::abs(theta_star) * 2);
    while (f(theta_star + hi) < 0) {
        hi *= 2.0;
        if (hi > 1e8) throw NumericError("mgf_roots: right bracket failed");
    }
    double lo = std::max(1.0, std::abs(theta_star) * 2);
    while (f(theta_star - lo) < 0) {
        lo *= 2.0;
        if (lo > 1e8) throw NumericError("mgf_roots: left bracket failed");
    }
    RootPair r;
    r.nu2 = bisect(theta_star, theta_star + hi, f);
    r.nu1 = bisect(theta_star, theta_star - lo, f);
    if (r.nu1 > r.nu2) std::swap(r.nu1, r.nu2);
    return r;
}

struct SplitMgf {
    double x;  // P_A * E_A(s^N)
    double y;  // P_B * E_B(s^N)
};

// Solves the 2x2 martingale system for the exit-side contributions to
// E[s^N]. Written so every exponent is non-positive: nu1 < 0 < nu2 in the
// regimes we evaluate, so nothing overflows even for far barriers.
SplitMgf split_mgf(double a, double b, const RootPair& r) {
    const double diff = r.nu1 - r.nu2;  // < 0
    const double denom = 1.0 - std::exp(diff * (a + b));
    SplitMgf out;
    out.x = std::exp(r.nu1 * a) * (1.0 - std::exp(diff * b)) / denom;
    out.y = std::exp(-r.nu2 * b) * (1.0 - std::exp(diff * a)) / denom;
    return out;
}

SplitMgf split_at(double s, double a, double b, const WalkModel& m) {
    if (s >= 1.0) {
        RootPair r{theta_h(m), 0.0};
        if (r.nu1 > r.nu2) std::swap(r.nu1, r.nu2);
        return split_mgf(a, b, r);
    }
    return split_mgf(a, b, mgf_roots(1.0 / s, m));
}

}  // namespace

double step_mgf(double theta, const WalkModel& m) {
    check_model(m);
    return m.c_hat * std::exp(-theta * m.d_l()) + (1.0 - m.c_hat) * std::exp(theta * m.d_r());
}

std::optional<double> find_theta0(const WalkModel& m) {
    check_model(m);
    if (std::abs(m.mu()) <= kDriftEps) return std::nullopt;
    // step_mgf(theta) = mgf_h(-theta), so the printed-form root is the
    // negated drift-side root.
    return -theta_h(m);
}

AbsorptionProbs absorption_probs(double a, double b, const WalkModel& m) {
    check_model(m);
    if (!(a > 0.0 && b > 0.0)) throw std::domain_error("absorption_probs: barriers must be positive");
    AbsorptionProbs out;
    if (std::abs(m.mu()) <= kDriftEps) {
        out.p_upper = b / (a + b);
        out.p_lower = 1.0 - out.p_upper;
        return out;
    }
    const double th = theta_h(m);
    if (th < 0) {
        // multiply through by exp(th * a); all exponents <= 0
        const double eab = std::exp(th * (a + b));
        out.p_upper = (std::exp(th * a) - eab) / (1.0 - eab);
    } else {
        // multiply through by exp(-th * b)
        const double eab = std::exp(-th * (a + b));
        out.p_upper = (std::exp(-th * b) - 1.0) / (eab - 1.0);
    }
    out.p_lower = 1.0 - out.p_upper;
    return out;
}

BarrierMoments stopping_moments(double a, double b, const WalkModel& m) {
    check_model(m);
    if (!(a > 0.0 && b > 0.0)) throw std::domain_error("stopping_moments: barriers must be positive");
    if (std::abs(m.mu()) <= kDriftEps) {
        // symmetric-ruin fallback (diffusion limit): exit probabilities by
        // distance, E[T] = AB/s2, E[T^2] = AB(A^2+3AB+B^2)/(3 s2^2)
        BarrierMoments out;
        const double s2 = m.sigma2();
        out.p_upper = b / (a + b);
        out.p_lower = 1.0 - out.p_upper;
        out.e_n = a * b / s2;
        out.e_n2 = a * b * (a * a + 3.0 * a * b + b * b) / (3.0 * s2 * s2);
        out.t_upper = out.e_n;
        out.t_lower = out.e_n;
        return out;
    }

    const double h = 1e-4;
    // s-grid for one-sided stencils at s = 1 plus their half-step versions.
    const double s_pts[6] = {1.0, 1.0 - h / 2, 1.0 - h, 1.0 - 3 * h / 2, 1.0 - 2 * h, 1.0 - 3 * h};
    SplitMgf v[6];
    for (int i = 0; i < 6; ++i) v[i] = split_at(s_pts[i], a, b, m);

    const auto d1 = [&](auto pick, double step, int i1, int i2) {
        return (3.0 * pick(v[0]) - 4.0 * pick(v[i1]) + pick(v[i2])) / (2.0 * step);
    };
    const auto d2 = [&](auto pick, double step, int i1, int i2, int i3) {
        return (2.0 * pick(v[0]) - 5.0 * pick(v[i1]) + 4.0 * pick(v[i2]) - pick(v[i3])) /
               (step * step);
    };
    // Richardson: combine full and half step, both second order.
    const auto deriv1 = [&](auto pick) {
        const double full = d1(pick, h, 2, 4);
        const double half = d1(pick, h / 2, 1, 2);
        return (4.0 * half - full) / 3.0;
    };
    const auto deriv2 = [&](auto pick) {
        const double full = d2(pick, h, 2, 4, 5);
        const double half = d2(pick, h / 2, 1, 2, 3);
        return (4.0 * half - full) / 3.0;
    };

    const auto fx = [](const SplitMgf& s) { return s.x; };
    const auto fy = [](const SplitMgf& s) { return s.y; };
    const auto ff = [](const SplitMgf& s) { return s.x + s.y; };

    BarrierMoments out;
    out.p_upper = v[0].x;
    out.p_lower = v[0].y;
    out.e_n = deriv1(ff);
    out.e_n2 = deriv2(ff) + out.e_n;  // f'' = E[N(N-1)]
    out.t_upper = out.p_upper > 1e-280 ? deriv1(fx) / out.p_upper : 0.0;
    out.t_lower = out.p_lower > 1e-280 ? deriv1(fy) / out.p_lower : 0.0;
    return out;
}

DelayMoments single_barrier_moments(const WalkModel& m) {
    check_model(m);
    if (m.v_real() >= m.c_hat)
        throw std::domain_error("single_barrier_moments: unstable regime (V >= c_hat)");
    DelayMoments out;
    const double mu = m.mu();
    out.e_n = -m.d_r() / mu;
    out.e_n2 = (m.d_r() * m.d_r() * mu - m.sigma2() * m.d_r()) / (mu * mu * mu);
    out.d_bar = out.e_n2 / (2.0 * out.e_n);
    return out;
}

PointProcessModel point_process(std::int64_t window, const WalkModel& m) {
    check_model(m);
    if (window < 2) throw std::domain_error("point_process: window must be >= 2");
    if (m.v_real() >= m.c_hat) throw std::domain_error("point_process: unstable regime");

    const double v = m.v_real();
    const double w = static_cast<double>(window);
    PointProcessModel pp;
    pp.window = window;

    // After a decode the particle is pinned at d_R; after a loss at W-1.
    const double starts[2] = {m.d_r(), w - 1.0};
    double p_to_loss[2], t_to_loss[2], t_to_decode[2];
    for (int k = 0; k < 2; ++k) {
        const double x0 = starts[k];
        const double a = (w - v) - x0;
        const double b = x0 + v;
        if (a <= 0) throw std::domain_error("point_process: start beyond the loss barrier");
        const AbsorptionProbs ab = absorption_probs(a, b, m);
        const BarrierMoments bm = stopping_moments(a, b, m);
        p_to_loss[k] = ab.p_upper;
        t_to_loss[k] = bm.t_upper;
        t_to_decode[k] = bm.t_lower;
    }
    pp.p_dl = p_to_loss[0];
    pp.p_dd = 1.0 - pp.p_dl;
    pp.t_dl = t_to_loss[0];
    pp.t_dd = t_to_decode[0];
    pp.p_ll = p_to_loss[1];
    pp.p_ld = 1.0 - pp.p_ll;
    pp.t_ll = t_to_loss[1];
    pp.t_ld = t_to_decode[1];

    const double denom = pp.p_dl + pp.p_ld;
    pp.pi_d = denom > 0 ? pp.p_ld / denom : 1.0;
    pp.pi_l = 1.0 - pp.pi_d;
    return pp;
}

LossEstimate packet_loss_prob(const PointProcessModel& pp, const WalkModel& m) {
    check_model(m);
    const double total_time = pp.pi_d * (pp.p_dl * pp.t_dl + pp.p_dd * pp.t_dd) +
                              pp.pi_l * (pp.p_ll * pp.t_ll + pp.p_ld * pp.t_ld);
    LossEstimate out;
    double dl_excess = pp.t_dl - static_cast<double>(pp.window) / m.v_real();
    if (dl_excess < 0) {
        dl_excess = 0;
        out.clamped = true;
    }
    out.p_loss = (pp.pi_d * pp.p_dl * dl_excess + pp.pi_l * pp.p_ll * pp.t_ll) / total_time;
    return out;
}

ComplexityBound complexity_bound(const WalkModel& m) {
    const DelayMoments dm = single_barrier_moments(m);
    ComplexityBound out;
    out.slope = (dm.e_n2 * m.v_real() + 3.0 * dm.e_n) / (2.0 * dm.e_n);
    out.intercept = (dm.e_n2 * m.v_real() + dm.e_n) / (2.0 * dm.e_n);
    return out;
}

// ---- Monte Carlo ------------------------------------------------------------

namespace {

struct LatticeWalk {
    std::int64_t up;    // +d_R scaled
    std::int64_t down;  // -d_L scaled
};

McAbsorption run_two_barrier(const WalkModel& m, std::int64_t start, std::int64_t upper,
                             std::int64_t lower, std::int64_t up, std::int64_t down,
                             std::uint64_t trials, Rng& rng) {
    McAbsorption out;
    out.trials = trials;
    std::uint64_t hits_upper = 0;
    double sum_n = 0, sum_n2 = 0, sum_n_upper = 0, sum_n_lower = 0;
    for (std::uint64_t trial = 0; trial < trials; ++trial) {
        std::int64_t pos = start;
        std::uint64_t n = 0;
        while (true) {
            pos += rng.bernoulli(m.c_hat) ? -down : up;
            ++n;
            if (pos >= upper) {
                ++hits_upper;
                sum_n_upper += static_cast<double>(n);
                break;
            }
            if (pos <= lower) {
                sum_n_lower += static_cast<double>(n);
                break;
            }
        }
        sum_n += static_cast<double>(n);
        sum_n2 += static_cast<double>(n) * static_cast<double>(n);
    }
    const double t = static_cast<double>(trials);
    out.p_upper = static_cast<double>(hits_upper) / t;
    out.p_lower = 1.0 - out.p_upper;
    out.e_n = sum_n / t;
    out.e_n2 = sum_n2 / t;
    out.t_upper = hits_upper > 0 ? sum_n_upper / static_cast<double>(hits_upper) : 0.0;
    out.t_lower = hits_upper < trials
                      ? sum_n_lower / static_cast<double>(trials - hits_upper)
                      : 0.0;
    out.se_p = std::sqrt(std::max(out.p_upper * out.p_lower, 1e-12) / t);
    return out;
}

}  // namespace

McAbsorption mc_absorption(const WalkModel& m, const Rational& a, const Rational& b,
                           std::uint64_t trials, Rng& rng) {
    check_model(m);
    if (trials < 1) throw std::domain_error("mc_absorption: trials must be >= 1");
    const std::int64_t scale = std::lcm(std::lcm(m.v.den, a.den), b.den);
    const std::int64_t up = m.v.num * (scale / m.v.den);
    const std::int64_t down = scale - up;
    return run_two_barrier(m, 0, a.num * (scale / a.den), -b.num * (scale / b.den), up, down,
                           trials, rng);
}

McAbsorption mc_transition(const WalkModel& m, std::int64_t window, bool from_loss,
                           std::uint64_t trials, Rng& rng) {
    check_model(m);
    const std::int64_t den = m.v.den;
    const std::int64_t up = m.v.num;
    const std::int64_t down = den - up;
    const std::int64_t start = from_loss ? (window - 1) * den : up;
    return run_two_barrier(m, start, window * den - up, -up, up, down, trials, rng);
}

McAbsorption mc_single_barrier(const WalkModel& m, std::uint64_t trials, Rng& rng) {
    check_model(m);
    if (m.v_real() >= m.c_hat)
        throw std::domain_error("mc_single_barrier: unstable regime (V >= c_hat)");
    McAbsorption out;
    out.trials = trials;
    const std::int64_t up = m.v.num;
    const std::int64_t down = m.v.den - up;
    double sum_n = 0, sum_n2 = 0;
    for (std::uint64_t trial = 0; trial < trials; ++trial) {
        std::int64_t pos = up;  // start at d_R
        std::uint64_t n = 0;
        while (pos > 0) {
            pos += rng.bernoulli(m.c_hat) ? -down : up;
            ++n;
        }
        sum_n += static_cast<double>(n);
        sum_n2 += static_cast<double>(n) * static_cast<double>(n);
    }
    out.p_lower = 1.0;
    out.e_n = sum_n / static_cast<double>(trials);
    out.e_n2 = sum_n2 / static_cast<double>(trials);
    return out;
}

ReflectedWalk::SlotOutcome ReflectedWalk::step(bool received) {
    ++t_;
    SlotOutcome out;
    const std::int64_t head = v_.ceil_mul(t_);
    // Left-barrier case: everything in the window is already seen, so any
    // reception is non-innovative and the particle drifts right by d_R.
    const bool reflect = seen_ >= head;
    out.reflected = reflect;
    if (!reflect && received) ++seen_;

    if (seen_ >= head && head > front_) {
        out.decoded_lo = front_ + 1;
        out.decoded_hi = head;
        front_ = head;
    } else {
        out.decoded_lo = 1;
        out.decoded_hi = 0;
    }

    const std::int64_t head_next = v_.ceil_mul(t_ + 1);
    const std::int64_t tail_edge = head_next - window_;  // packet just before next tail
    if (seen_ < tail_edge) {
        out.lost_lo = front_ + 1;
        out.lost_hi = tail_edge;
        front_ = tail_edge;
        seen_ = tail_edge;
    } else {
        out.lost_lo = 1;
        out.lost_hi = 0;
    }
    return out;
}

McWalkStats mc_reflected(const WalkModel& m, std::int64_t window, std::int64_t slots, Rng& rng) {
    check_model(m);
    ReflectedWalk walk(m, window);
    const std::int64_t warmup = slots / 20;
    const std::int64_t id_min = m.v.ceil_mul(warmup) + 1;
    const std::int64_t id_max = m.v.ceil_mul(slots + 1) - window;

    // Encode instant: the continuous moment the window head reaches the
    // packet; decode instants are end-of-slot. Same convention as the
    // simulator's delay metric.
    const auto enc_time = [&](std::int64_t id) {
        return static_cast<double>(id - 1) * static_cast<double>(m.v.den) /
               static_cast<double>(m.v.num);
    };

    McWalkStats out;
    double delay_sum = 0;
    for (std::int64_t t = 1; t <= slots; ++t) {
        const auto o = walk.step(rng.bernoulli(m.c_hat));
        for (std::int64_t id = std::max(o.decoded_lo, id_min);
             id <= std::min(o.decoded_hi, id_max); ++id) {
            ++out.decoded;
            delay_sum += static_cast<double>(t) - enc_time(id);
        }
        const std::int64_t ll = std::max(o.lost_lo, id_min);
        const std::int64_t lh = std::min(o.lost_hi, id_max);
        if (lh >= ll) out.lost += static_cast<std::uint64_t>(lh - ll + 1);
    }
    const std::uint64_t total = out.decoded + out.lost;
    out.p_loss = total > 0 ? static_cast<double>(out.lost) / static_cast<double>(total) : 0.0;
    out.mean_delay = out.decoded > 0 ? delay_sum / static_cast<double>(out.decoded) : 0.0;
    return out;
}

}  // namespace mwnc
