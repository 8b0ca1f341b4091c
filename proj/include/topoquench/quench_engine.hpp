#pragma once

// Linear-quench dynamics of the mapped chain, one momentum mode at a time.
// Every mode (u_k, v_k) obeys the pair of coupled first-order equations
//
//   i du/dt = +2 (g(t) - cos k) u + 2 sin k v
//   i dv/dt = -2 (g(t) - cos k) v + 2 sin k u,     g(t) = -t / tau_q,
//
// integrated with an adaptive embedded Dormand-Prince 5(4) pair. The closed
// Landau-Zener end state, the clamped approximate occupation curve, and the
// observables <F>, defect density and quasiparticle counts live here too.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <exception>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "topoquench/errors.hpp"
#include "topoquench/momentum_grid.hpp"

namespace topoquench::quench {

using cd = std::complex<double>;

struct BogoliubovMode {
    double k = 0.0;
    cd u{1.0, 0.0};
    cd v{0.0, 0.0};

    double occupation() const { return std::norm(v); }
    double norm_sq() const { return std::norm(u) + std::norm(v); }
};

struct ModeSet {
    KGrid grid;
    std::vector<BogoliubovMode> modes;
};

struct QuenchConfig {
    double tau_q = 50.0;
    double g_start = 10.0;
    double t_end = 0.0;
    KGrid grid = KGrid::thermodynamic(1024);
    int t_samples = 2000;
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    bool keep_mode_samples = false;

    double t_start() const { return -g_start * tau_q; }
    double coupling_at(double t) const { return -t / tau_q; }

    void validate() const {
        if (tau_q <= 0.0) throw config_error("tau_q must be positive");
        if (g_start <= 1.0)
            throw config_error("g_start must exceed 1 (quench starts in the topological phase)");
        if (t_end > 0.0 || t_end < t_start())
            throw config_error("t_end must lie in [t_start, 0]");
        if (t_samples < 1) throw config_error("t_samples must be >= 1");
    }
};

// Explicit derivatives of the mode equations.
inline std::pair<cd, cd> bdg_rhs(double g, double k, cd u, cd v) {
    const cd mi(0.0, -1.0);
    const double a = 2.0 * (g - std::cos(k));
    const double b = 2.0 * std::sin(k);
    return {mi * (a * u + b * v), mi * (-a * v + b * u)};
}

// Ground-state amplitudes at fixed coupling: u = cos(theta/2),
// v = sin(theta/2), tan theta = sin k / (g - cos k), branch with u -> 1 as
// g -> infinity.
inline BogoliubovMode initial_mode(double g_start, double k) {
    if (g_start <= 1.0) throw config_error("initial modes need g_start > 1");
    const double theta = std::atan2(std::sin(k), g_start - std::cos(k));
    return {k, cd(std::cos(0.5 * theta), 0.0), cd(std::sin(0.5 * theta), 0.0)};
}

inline ModeSet initial_modes(const QuenchConfig& config) {
    config.validate();
    ModeSet set{config.grid, {}};
    for (double k : config.grid.momenta())
        set.modes.push_back(initial_mode(config.g_start, k));
    return set;
}

// Squared overlap with the instantaneous excited branch at coupling g.
inline double excitation_probability(const BogoliubovMode& m, double g) {
    const double theta = std::atan2(std::sin(m.k), g - std::cos(m.k));
    const cd amp = std::cos(0.5 * theta) * m.v - std::sin(0.5 * theta) * m.u;
    return std::norm(amp);
}

// ---------------------------------------------------------------------------
// Observables

inline double expectation_f(const ModeSet& set) {
    double occ = 0.0;
    for (const auto& m : set.modes) occ += m.occupation();
    return 1.0 - 2.0 * set.grid.mean_weight() * occ;
}

inline double defect_density(const ModeSet& set) {
    return 0.5 * (1.0 - expectation_f(set));
}

// The quench is translation invariant, so the defects spread uniformly over
// the two plaquette sublattices; the counts are the density times half the
// plaquette number each.
inline std::pair<double, double> quasiparticle_counts(const ModeSet& set, int lx,
                                                      int ly) {
    if ((lx * ly) % 2 != 0)
        throw config_error("even/odd plaquette split needs an even number of sites");
    const double n = defect_density(set);
    const double each = n * double(lx * ly) / 2.0;
    return {each, each};
}

// ---------------------------------------------------------------------------
// Landau-Zener end state and the clamped approximate occupation

// Closed forms for the mode amplitudes at t = 0 after a slow sweep
// (tau_q >> 1). u.v* carries an undetermined phase: it equals
// cross_inphase + cross_mag * e^{i phi_k} with phi_k left opaque.
struct LZFinal {
    double u_sq;
    double v_sq;
    double cross_inphase;
    double cross_mag;
};

// The closed forms break down within this distance of k = +-pi, where they
// leave the physical range; comparisons exclude the band.
inline bool lz_band_valid(double k) {
    return std::abs(std::abs(k) - pi) >= 0.1;
}

inline LZFinal lz_final(double k, double tau_q) {
    const double cos_k = std::cos(k);
    const double sin_k = std::sin(k);
    const double p = std::exp(-2.0 * pi * tau_q * sin_k * sin_k);
    const double ph = std::exp(-pi * tau_q * sin_k * sin_k);
    LZFinal r;
    r.u_sq = 0.5 * (1.0 - cos_k) + p;
    r.v_sq = 0.5 * (1.0 + cos_k) - p;  // complement of u_sq
    const double sgn = k > 0.0 ? 1.0 : (k < 0.0 ? -1.0 : 0.0);
    r.cross_inphase = 0.5 * sin_k;
    r.cross_mag = sgn * ph * std::sqrt(std::max(0.0, 1.0 - ph));
    return r;
}

// Approximate time-dependent occupation, cut off into [0, 1]; the negative
// part of the raw curve is discarded. Valid for t <= 0.
inline double approx_vk2(double k, double t, double tau_q) {
    if (t > 0.0) throw config_error("approximate occupation defined for t <= 0");
    const double s = t / tau_q;
    const double cos_k = std::cos(k);
    const double sin_k = std::sin(k);
    const double d_sq = 1.0 + 2.0 * s * cos_k + s * s;
    double ratio;
    if (d_sq < 1e-300) {
        // simultaneous cos k = +-1 and s = -+1: the limit along k vanishes
        ratio = 0.0;
    } else {
        ratio = (cos_k + s) / std::sqrt(d_sq);
    }
    const double raw = 0.5 * (1.0 + ratio) - std::exp(-2.0 * pi * tau_q * sin_k * sin_k);
    return std::min(1.0, std::max(0.0, raw));
}

// Occupation-only mode sets built from the closed forms (real amplitudes;
// the undetermined relative phase is dropped). Occupations are clamped into
// [0, 1] exactly as the approximate curve prescribes at its negative part.
inline ModeSet lz_modes(double tau_q, const KGrid& grid) {
    ModeSet set{grid, {}};
    for (double k : grid.momenta()) {
        const double v2 = std::min(1.0, std::max(0.0, lz_final(k, tau_q).v_sq));
        set.modes.push_back(
            {k, cd(std::sqrt(1.0 - v2), 0.0), cd(std::sqrt(v2), 0.0)});
    }
    return set;
}

inline ModeSet approx_modes(double tau_q, double t, const KGrid& grid) {
    ModeSet set{grid, {}};
    for (double k : grid.momenta()) {
        const double v2 = approx_vk2(k, t, tau_q);
        set.modes.push_back(
            {k, cd(std::sqrt(1.0 - v2), 0.0), cd(std::sqrt(v2), 0.0)});
    }
    return set;
}

// ---------------------------------------------------------------------------
// Adaptive integration

struct Trajectory {
    QuenchConfig config;
    std::vector<double> times;
    std::vector<double> f_expectation;  // <F>(t)
    std::vector<double> defect;         // n(t)
    ModeSet final_modes;
    // occupation_samples[i][m] = |v_{k_m}(times[i])|^2
    std::vector<std::vector<double>> occupation_samples;
    // mode_samples[i][m]: full amplitudes, filled only when requested
    std::vector<std::vector<BogoliubovMode>> mode_samples;
    double max_norm_drift = 0.0;  // per accepted step, before renormalization
};

namespace detail {

struct ModeState {
    cd u, v;
};

inline ModeState axpy(const ModeState& y, double a, const ModeState& d) {
    return {y.u + a * d.u, y.v + a * d.v};
}

struct Dopri5Result {
    ModeState y;
    double max_drift;
};

// Dormand-Prince 5(4) with standard step control; samples are produced by
// cubic Hermite interpolation inside accepted steps. The flow is unitary, so
// the state is projected back to unit norm after every accepted step; the
// pre-projection drift is reported as a diagnostic.
template <typename Rhs, typename SampleSink>
Dopri5Result dopri5(const Rhs& rhs, ModeState y0, double t0, double t1,
                    double rel_tol, double abs_tol,
                    const std::vector<double>& sample_times,
                    const SampleSink& sink, double k_label) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                            a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    Dopri5Result res{y0, 0.0};
    if (t1 <= t0) {
        for (std::size_t i = 0; i < sample_times.size(); ++i) sink(i, y0);
        return res;
    }

    std::size_t isample = 0;
    while (isample < sample_times.size() && sample_times[isample] <= t0) {
        sink(isample, y0);
        ++isample;
    }

    ModeState y = y0;
    double t = t0;
    ModeState f = rhs(t, y);
    double h = std::min(t1 - t0, 1e-2 / (std::sqrt(std::norm(f.u) + std::norm(f.v)) + 1e-3));
    long rejects_in_a_row = 0;

    while (t < t1) {
        h = std::min(h, t1 - t);
        if (h < 1e-14 * std::max(1.0, std::abs(t))) {
            std::ostringstream os;
            os << "step-size underflow at k = " << k_label << ", t = " << t;
            throw numerical_error(os.str());
        }

        const ModeState k1 = f;
        const ModeState k2 = rhs(t + c2 * h, axpy(y, h * a21, k1));
        ModeState s = axpy(axpy(y, h * a31, k1), h * a32, k2);
        const ModeState k3 = rhs(t + c3 * h, s);
        s = axpy(axpy(axpy(y, h * a41, k1), h * a42, k2), h * a43, k3);
        const ModeState k4 = rhs(t + c4 * h, s);
        s = axpy(axpy(axpy(axpy(y, h * a51, k1), h * a52, k2), h * a53, k3), h * a54, k4);
        const ModeState k5 = rhs(t + c5 * h, s);
        s = axpy(axpy(axpy(axpy(axpy(y, h * a61, k1), h * a62, k2), h * a63, k3),
                      h * a64, k4),
                 h * a65, k5);
        const ModeState k6 = rhs(t + h, s);
        ModeState ynew = y;
        ynew.u += h * (b1 * k1.u + b3 * k3.u + b4 * k4.u + b5 * k5.u + b6 * k6.u);
        ynew.v += h * (b1 * k1.v + b3 * k3.v + b4 * k4.v + b5 * k5.v + b6 * k6.v);
        const ModeState k7 = rhs(t + h, ynew);

        const cd err_u = h * (e1 * k1.u + e3 * k3.u + e4 * k4.u + e5 * k5.u +
                              e6 * k6.u + e7 * k7.u);
        const cd err_v = h * (e1 * k1.v + e3 * k3.v + e4 * k4.v + e5 * k5.v +
                              e6 * k6.v + e7 * k7.v);
        const double sc_u = abs_tol + rel_tol * std::max(std::abs(y.u), std::abs(ynew.u));
        const double sc_v = abs_tol + rel_tol * std::max(std::abs(y.v), std::abs(ynew.v));
        const double err = std::sqrt(0.5 * (std::norm(err_u / sc_u) + std::norm(err_v / sc_v)));

        if (err <= 1.0) {
            // samples inside (t, t+h] by cubic Hermite on (y, f) -> (ynew, k7)
            while (isample < sample_times.size() && sample_times[isample] <= t + h) {
                const double th = (sample_times[isample] - t) / h;
                const double h00 = (1 + 2 * th) * (1 - th) * (1 - th);
                const double h10 = th * (1 - th) * (1 - th);
                const double h01 = th * th * (3 - 2 * th);
                const double h11 = th * th * (th - 1);
                ModeState ys{h00 * y.u + h10 * h * f.u + h01 * ynew.u + h11 * h * k7.u,
                             h00 * y.v + h10 * h * f.v + h01 * ynew.v + h11 * h * k7.v};
                const double nrm = std::sqrt(std::norm(ys.u) + std::norm(ys.v));
                ys.u /= nrm;
                ys.v /= nrm;
                sink(isample, ys);
                ++isample;
            }

            const double nrm_sq = std::norm(ynew.u) + std::norm(ynew.v);
            res.max_drift = std::max(res.max_drift, std::abs(nrm_sq - 1.0));
            const double inv = 1.0 / std::sqrt(nrm_sq);
            ynew.u *= inv;
            ynew.v *= inv;

            t += h;
            y = ynew;
            f = rhs(t, y);
            rejects_in_a_row = 0;
            const double fac = std::clamp(0.9 * std::pow(err > 0 ? err : 1e-10, -0.2), 0.2, 5.0);
            h *= fac;
        } else {
            if (++rejects_in_a_row > 60) {
                std::ostringstream os;
                os << "tolerance failure at k = " << k_label << ", t = " << t;
                throw numerical_error(os.str());
            }
            h *= std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
        }
    }

    res.y = y;
    return res;
}

inline int thread_budget() {
    int n = 0;
    if (const char* env = std::getenv("TOPOQUENCH_THREADS")) {
        n = std::atoi(env);
        if (n < 0) n = 0;
    }
    if (n == 0) {
        unsigned hc = std::thread::hardware_concurrency();
        n = hc == 0 ? 1 : int(hc);
    }
    return n;
}

}  // namespace detail

inline std::vector<double> sample_times(const QuenchConfig& config) {
    std::vector<double> times(config.t_samples);
    const double t0 = config.t_start();
    if (config.t_samples == 1) {
        times[0] = config.t_end;
        return times;
    }
    const double dt = (config.t_end - t0) / (config.t_samples - 1);
    for (int i = 0; i < config.t_samples; ++i) times[i] = t0 + i * dt;
    times.back() = config.t_end;
    return times;
}

// Integrate every mode of the grid from t_start to t_end. Modes are
// independent; they are distributed over threads (capped by the
// TOPOQUENCH_THREADS environment variable, 0 = auto) and merged in k order,
// so the output is byte-identical for any thread count.
inline Trajectory integrate(const QuenchConfig& config) {
    config.validate();
    Trajectory traj;
    traj.config = config;
    traj.times = sample_times(config);
    const std::vector<double> momenta = config.grid.momenta();
    const int n_modes = int(momenta.size());
    const int n_times = int(traj.times.size());

    traj.occupation_samples.assign(n_times, std::vector<double>(n_modes, 0.0));
    if (config.keep_mode_samples)
        traj.mode_samples.assign(n_times, std::vector<BogoliubovMode>(n_modes));
    traj.final_modes.grid = config.grid;
    traj.final_modes.modes.assign(n_modes, {});

    std::vector<double> drifts(n_modes, 0.0);

    auto run_block = [&](int lo, int hi, std::exception_ptr& eptr) noexcept {
        try {
            for (int m = lo; m < hi; ++m) {
                const double k = momenta[m];
                const BogoliubovMode init = initial_mode(config.g_start, k);
                auto rhs = [&config, k](double t, const detail::ModeState& y) {
                    auto [du, dv] = bdg_rhs(config.coupling_at(t), k, y.u, y.v);
                    return detail::ModeState{du, dv};
                };
                auto sink = [&](std::size_t i, const detail::ModeState& y) {
                    traj.occupation_samples[i][m] = std::norm(y.v);
                    if (config.keep_mode_samples)
                        traj.mode_samples[i][m] = {k, y.u, y.v};
                };
                auto res = detail::dopri5(rhs, {init.u, init.v}, config.t_start(),
                                          config.t_end, config.rel_tol, config.abs_tol,
                                          traj.times, sink, k);
                traj.final_modes.modes[m] = {k, res.y.u, res.y.v};
                drifts[m] = res.max_drift;
            }
        } catch (...) {
            eptr = std::current_exception();
        }
    };

    const int n_threads = std::min(detail::thread_budget(), n_modes);
    if (n_threads <= 1) {
        std::exception_ptr eptr;
        run_block(0, n_modes, eptr);
        if (eptr) std::rethrow_exception(eptr);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(n_threads);
        for (int w = 0; w < n_threads; ++w) {
            const int lo = w * n_modes / n_threads;
            const int hi = (w + 1) * n_modes / n_threads;
            pool.emplace_back(run_block, lo, hi, std::ref(errors[w]));
        }
        for (auto& th : pool) th.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    for (double d : drifts) traj.max_norm_drift = std::max(traj.max_norm_drift, d);

    traj.f_expectation.resize(n_times);
    traj.defect.resize(n_times);
    const double w = config.grid.mean_weight();
    for (int i = 0; i < n_times; ++i) {
        double occ = 0.0;
        for (int m = 0; m < n_modes; ++m) occ += traj.occupation_samples[i][m];
        traj.f_expectation[i] = 1.0 - 2.0 * w * occ;
        traj.defect[i] = 0.5 * (1.0 - traj.f_expectation[i]);
    }
    return traj;
}

// <F>(t) from the clamped approximate occupation on the same time grid.
inline Trajectory approx_trajectory(const QuenchConfig& config) {
    config.validate();
    Trajectory traj;
    traj.config = config;
    traj.times = sample_times(config);
    const std::vector<double> momenta = config.grid.momenta();
    const int n_times = int(traj.times.size());
    traj.f_expectation.resize(n_times);
    traj.defect.resize(n_times);
    for (int i = 0; i < n_times; ++i) {
        double occ = 0.0;
        for (double k : momenta) occ += approx_vk2(k, traj.times[i], config.tau_q);
        traj.f_expectation[i] = 1.0 - 2.0 * config.grid.mean_weight() * occ;
        traj.defect[i] = 0.5 * (1.0 - traj.f_expectation[i]);
    }
    traj.final_modes = approx_modes(config.tau_q, config.t_end, config.grid);
    return traj;
}

}  // namespace topoquench::quench
