#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "mwnc/rational.hpp"
#include "mwnc/rng.hpp"

namespace mwnc {

// Numeric failure distinct from caller errors (CLI maps it to exit code 3).
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Random-walk abstraction of one receiver: each slot the particle steps down
// d_L = 1-V with probability c_hat (a useful reception) or up d_R = V
// otherwise. The speed stays rational so Monte Carlo walks can run on an
// exact integer lattice.
struct WalkModel {
    double c_hat{0.8};
    Rational v{1, 2};

    double v_real() const { return v.value(); }
    double d_l() const { return 1.0 - v_real(); }
    double d_r() const { return v_real(); }
    double mu() const { return v_real() - c_hat; }
    double sigma2() const { return c_hat * (1.0 - c_hat); }
    double rho() const { return v_real() / c_hat; }
};

// G(theta) = c_hat * exp(-theta(1-V)) + (1-c_hat) * exp(theta V).
double step_mgf(double theta, const WalkModel& m);

// Nonzero root of step_mgf(theta) = 1, |G(theta0)-1| < 1e-12. Empty when the
// drift is degenerate (|mu| <= 1e-9); callers fall back to symmetric-walk
// formulas.
std::optional<double> find_theta0(const WalkModel& m);

struct AbsorptionProbs {
    double p_upper{0.0};  // exit at +A (the loss side in the point process)
    double p_lower{0.0};  // exit at -B (the decode side)
};

// Two absorbing barriers at +A and -B seen from the origin; overshoot-free
// approximation, p_upper + p_lower = 1 by construction.
AbsorptionProbs absorption_probs(double a, double b, const WalkModel& m);

struct BarrierMoments {
    double p_upper{0.0}, p_lower{0.0};
    double t_upper{0.0};  // E[N | exit at +A]
    double t_lower{0.0};  // E[N | exit at -B]
    double e_n{0.0};      // E[N]
    double e_n2{0.0};     // E[N^2]
};

// Stopping-time moments through the two-barrier MGF: solve the step MGF for
// its two real roots per s, assemble E[s^N], differentiate one-sidedly at
// s = 1 (step 1e-4, Richardson-extrapolated).
BarrierMoments stopping_moments(double a, double b, const WalkModel& m);

struct DelayMoments {
    double e_n{0.0};
    double e_n2{0.0};
    double d_bar{0.0};  // mean decoding delay, e_n2 / (2 e_n)
};

// Single-left-barrier closed forms, valid in the stable regime V < c_hat.
DelayMoments single_barrier_moments(const WalkModel& m);

struct PointProcessModel {
    std::int64_t window{0};
    double p_dd{0}, p_dl{0}, p_ld{0}, p_ll{0};
    double t_dd{0}, t_dl{0}, t_ld{0}, t_ll{0};
    double pi_d{0}, pi_l{0};
};

// Alternating Decode/Loss point process: transitions start from the pinned
// positions d_R (after D) and W-1 (after L) between the barriers -V and W-V.
PointProcessModel point_process(std::int64_t window, const WalkModel& m);

struct LossEstimate {
    double p_loss{0.0};
    bool clamped{false};  // the T_DL - W/V term went negative and was zeroed
};

LossEstimate packet_loss_prob(const PointProcessModel& pp, const WalkModel& m);

struct ComplexityBound {
    double slope{0.0};
    double intercept{0.0};
    double at(double window) const { return slope * window + intercept; }
};

// Affine-in-W upper bound on decode operations per packet.
ComplexityBound complexity_bound(const WalkModel& m);

// ---- Monte Carlo oracles ---------------------------------------------------
// These run the walk on an exact integer lattice (multiples of 1/lcm(dens)),
// so barrier hits are decided without floating-point ties.

struct McAbsorption {
    double p_upper{0}, p_lower{0};
    double e_n{0}, e_n2{0};
    double t_upper{0}, t_lower{0};
    double se_p{0};  // binomial standard error of p_upper
    std::uint64_t trials{0};
};

// Free walk from the origin absorbed at >= A or <= -B.
McAbsorption mc_absorption(const WalkModel& m, const Rational& a, const Rational& b,
                           std::uint64_t trials, Rng& rng);

// Transition experiment for the point process: start at d_R (after a decode)
// or W-1 (after a loss), absorb at the barriers -V and W-V.
McAbsorption mc_transition(const WalkModel& m, std::int64_t window, bool from_loss,
                           std::uint64_t trials, Rng& rng);

// Single left barrier at 0, starting from d_R; the Eq.-for-delay experiment.
McAbsorption mc_single_barrier(const WalkModel& m, std::uint64_t trials, Rng& rng);

// Reflected walk with the event ledger: the exact idealized-receiver oracle.
// Positions are numerators over v.den.
class ReflectedWalk {
  public:
    ReflectedWalk(const WalkModel& m, std::int64_t window)
        : v_(m.v), window_(window) {}

    struct SlotOutcome {
        std::int64_t decoded_lo{0}, decoded_hi{0};  // ids decoded this slot (lo > hi: none)
        std::int64_t lost_lo{0}, lost_hi{0};        // ids lost this slot
        bool reflected{false};                      // left-barrier case: reception wasted
    };

    // Advances one slot given whether a symbol was received.
    SlotOutcome step(bool received);

    // S(t) * v.den at the end of the last completed slot.
    std::int64_t particle_num() const { return v_.num * t_ - seen_ * v_.den; }
    std::int64_t slot() const { return t_; }
    std::int64_t seen() const { return seen_; }
    std::int64_t front() const { return front_; }

  private:
    Rational v_;
    std::int64_t window_;
    std::int64_t t_{0};
    std::int64_t seen_{0};   // seen-or-lost prefix length, G + (I - D)
    std::int64_t front_{0};  // decoded-or-lost prefix length
};

struct McWalkStats {
    double p_loss{0.0};
    double mean_delay{0.0};
    std::uint64_t decoded{0}, lost{0};
};

// Long-run reflected walk; loss ratio and decode delay over the measured
// packet range (5% warm-up, fates decided within the horizon).
McWalkStats mc_reflected(const WalkModel& m, std::int64_t window, std::int64_t slots, Rng& rng);

}  // namespace mwnc
