#pragma once

// Dense exact-diagonalization oracle for small transverse-field Ising chains
// and small plaquette lattices: ground states, observables, full spectra,
// real-time quench evolution, and the plaquette-vs-decoupled-chain spectrum
// comparison. Everything is matrix-free where it can be; dense matrices are
// materialized only for eigensolves.
//
// Basis convention: site 0 is the least-significant bit, Z is diagonal with
// Z|0> = +|0>, X flips the bit, Y|b> = i(1-2b)|flipped b>.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "topoquench/errors.hpp"
#include "topoquench/lattice_pauli.hpp"

namespace topoquench::ed {

using cd = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

inline constexpr int max_sites = 14;
inline constexpr int dense_site_limit = 12;  // beyond this, iterative solves only

struct DenseState {
    int n_sites = 0;
    Vector amplitudes;

    double norm() const { return amplitudes.norm(); }
    void normalize() { amplitudes /= amplitudes.norm(); }
};

struct HamiltonianSpec {
    enum class Model { IsingChain, WenPlaquette };

    Model model = Model::IsingChain;
    int n = 0;           // chain length (IsingChain)
    bool pbc = true;     // chain boundary (IsingChain)
    int lx = 0, ly = 0;  // lattice extents (WenPlaquette)
    double g = 1.0;      // sigma^x coefficient (chain) / plaquette coefficient (2D)
    double j = 1.0;      // sigma^z sigma^z coefficient (chain) / tau^x coefficient (2D)

    static HamiltonianSpec ising_chain(int n, bool pbc, double g, double j = 1.0) {
        HamiltonianSpec s;
        s.model = Model::IsingChain;
        s.n = n;
        s.pbc = pbc;
        s.g = g;
        s.j = j;
        return s;
    }
    static HamiltonianSpec wen_plaquette(int lx, int ly, double g, double j) {
        HamiltonianSpec s;
        s.model = Model::WenPlaquette;
        s.lx = lx;
        s.ly = ly;
        s.g = g;
        s.j = j;
        return s;
    }

    int sites() const { return model == Model::IsingChain ? n : lx * ly; }
};

// A Pauli string compiled to bit operations: O|b> = scalar * (-1)^{pop(b & sign)}
// |b ^ flip>. The scalar collects the string phase and one factor of i per Y.
struct PauliApplier {
    std::uint32_t flip = 0;
    std::uint32_t sign = 0;
    cd scalar = 1.0;

    static PauliApplier compile(const lattice::PauliString& s) {
        PauliApplier a;
        int n_y = 0;
        for (const auto& [site, p] : s.letters()) {
            const std::uint32_t bit = 1u << site;
            if (p == lattice::Pauli::X || p == lattice::Pauli::Y) a.flip |= bit;
            if (p == lattice::Pauli::Y || p == lattice::Pauli::Z) a.sign |= bit;
            if (p == lattice::Pauli::Y) ++n_y;
        }
        static const cd ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
        a.scalar = ipow[(s.phase() + n_y) % 4];
        return a;
    }

    // y += coeff * O x
    void accumulate(const Vector& x, Vector& y, cd coeff) const {
        const std::size_t dim = x.size();
        for (std::size_t b = 0; b < dim; ++b) {
            const cd c = (std::popcount(b & sign) & 1) ? -scalar : scalar;
            y[b ^ flip] += coeff * c * x[b];
        }
    }

    cd expectation(const Vector& psi) const {
        cd acc = 0.0;
        const std::size_t dim = psi.size();
        for (std::size_t b = 0; b < dim; ++b) {
            const cd c = (std::popcount(b & sign) & 1) ? -scalar : scalar;
            acc += std::conj(psi[b ^ flip]) * c * psi[b];
        }
        return acc;
    }
};

class Hamiltonian {
  public:
    explicit Hamiltonian(HamiltonianSpec spec) : spec_(spec) {
        const int n = spec.sites();
        if (spec.model == HamiltonianSpec::Model::IsingChain) {
            if (n < 2 || n > max_sites)
                throw config_error("ising chain length must be in [2, 14]");
        } else {
            if (spec.lx < 2 || spec.ly < 2)
                throw config_error("plaquette lattice extents must be >= 2");
            if (n > max_sites)
                throw config_error("plaquette lattice limited to 14 sites");
        }
        dim_ = std::size_t(1) << n;

        for (int s = 0; s < n; ++s) xflip_.push_back(1u << s);

        if (spec.model == HamiltonianSpec::Model::IsingChain) {
            std::vector<std::pair<int, int>> bonds;
            for (int s = 0; s + 1 < n; ++s) bonds.push_back({s, s + 1});
            // a periodic two-site ring has a single geometric bond
            if (spec.pbc && n > 2) bonds.push_back({n - 1, 0});
            zz_diag_.assign(dim_, 0.0);
            for (std::size_t b = 0; b < dim_; ++b) {
                double acc = 0.0;
                for (auto [s0, s1] : bonds) {
                    const double z0 = (b >> s0) & 1 ? -1.0 : 1.0;
                    const double z1 = (b >> s1) & 1 ? -1.0 : 1.0;
                    acc += z0 * z1;
                }
                zz_diag_[b] = acc;
            }
        } else {
            lattice::LatticeSpec lat(spec.lx, spec.ly);
            for (int s = 0; s < n; ++s)
                plaquettes_.push_back(PauliApplier::compile(
                    lattice::plaquette(lat, lat.x_of(s), lat.y_of(s))));
        }
    }

    const HamiltonianSpec& spec() const { return spec_; }
    std::size_t dim() const { return dim_; }
    int n_sites() const { return spec_.sites(); }

    // y = H x with the field coupling overridden (used by the quench ramp)
    void apply(const Vector& x, Vector& y, double g, double j) const {
        y.setZero(dim_);
        if (spec_.model == HamiltonianSpec::Model::IsingChain) {
            for (std::size_t b = 0; b < dim_; ++b) y[b] = -j * zz_diag_[b] * x[b];
            for (std::uint32_t m : xflip_)
                for (std::size_t b = 0; b < dim_; ++b) y[b ^ m] += -g * x[b];
        } else {
            for (const auto& f : plaquettes_) f.accumulate(x, y, -g);
            for (std::uint32_t m : xflip_)
                for (std::size_t b = 0; b < dim_; ++b) y[b ^ m] += -j * x[b];
        }
    }
    void apply(const Vector& x, Vector& y) const { apply(x, y, spec_.g, spec_.j); }

    Matrix dense(double g, double j) const {
        Matrix h(dim_, dim_);
        Vector e = Vector::Zero(dim_), col(dim_);
        for (std::size_t c = 0; c < dim_; ++c) {
            e[c] = 1.0;
            apply(e, col, g, j);
            h.col(c) = col;
            e[c] = 0.0;
        }
        return h;
    }
    Matrix dense() const { return dense(spec_.g, spec_.j); }

    const std::vector<PauliApplier>& plaquette_appliers() const { return plaquettes_; }

  private:
    HamiltonianSpec spec_;
    std::size_t dim_ = 0;
    std::vector<std::uint32_t> xflip_;
    std::vector<double> zz_diag_;          // ising only
    std::vector<PauliApplier> plaquettes_; // wen only
};

inline Hamiltonian build(const HamiltonianSpec& spec) { return Hamiltonian(spec); }

namespace detail {

// Lanczos with full reorthogonalization; used once the dense path would not
// fit. Deterministic start vector.
inline std::pair<double, Vector> lanczos_ground_state(const Hamiltonian& h) {
    const std::size_t dim = h.dim();
    std::mt19937 rng(0x5eed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vector q(dim);
    for (std::size_t i = 0; i < dim; ++i) q[i] = cd(gauss(rng), gauss(rng));
    q.normalize();

    const int max_iter = 250;
    std::vector<Vector> basis;
    std::vector<double> alpha, beta;
    Vector w(dim);
    double prev_e = 1e300;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;

    for (int it = 0; it < max_iter; ++it) {
        basis.push_back(q);
        h.apply(q, w);
        alpha.push_back(std::real(q.dot(w)));
        // full reorthogonalization, twice for stability
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& v : basis) w -= v.dot(w) * v;
        const double b = w.norm();

        const int m = int(alpha.size());
        Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
        for (int i = 0; i < m; ++i) {
            t(i, i) = alpha[i];
            if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[i];
        }
        tri.compute(t);
        const double e0 = tri.eigenvalues()(0);
        if (std::abs(e0 - prev_e) < 1e-13 * std::max(1.0, std::abs(e0)) || b < 1e-12) {
            Vector gs = Vector::Zero(dim);
            for (int i = 0; i < m; ++i) gs += tri.eigenvectors()(i, 0) * basis[i];
            gs.normalize();
            return {e0, gs};
        }
        prev_e = e0;
        beta.push_back(b);
        q = w / b;
    }
    throw numerical_error("Lanczos ground state did not converge");
}

}  // namespace detail

inline std::pair<double, DenseState> ground_state(const HamiltonianSpec& spec) {
    Hamiltonian h(spec);
    DenseState st;
    st.n_sites = spec.sites();
    if (spec.sites() <= dense_site_limit) {
        Eigen::SelfAdjointEigenSolver<Matrix> solver(h.dense());
        if (solver.info() != Eigen::Success)
            throw numerical_error("dense eigensolve failed");
        st.amplitudes = solver.eigenvectors().col(0);
        return {solver.eigenvalues()(0), st};
    }
    auto [e, v] = detail::lanczos_ground_state(h);
    st.amplitudes = std::move(v);
    return {e, st};
}

// Full spectrum (ascending). Dense only.
inline std::vector<double> spectrum(const HamiltonianSpec& spec) {
    if (spec.sites() > dense_site_limit)
        throw config_error("full spectrum limited to 12 sites");
    Hamiltonian h(spec);
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h.dense(), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw numerical_error("dense eigensolve failed");
    std::vector<double> ev(solver.eigenvalues().data(),
                           solver.eigenvalues().data() + h.dim());
    return ev;
}

// ---------------------------------------------------------------------------
// Observables

struct Observable {
    enum class Kind { SxAvg, ZZ, Plaquette, TauXAvg, ParityX };
    Kind kind = Kind::SxAvg;
    int param = 0;  // distance r for ZZ, plaquette base site for Plaquette

    static Observable sx_avg() { return {Kind::SxAvg, 0}; }
    static Observable zz(int r) { return {Kind::ZZ, r}; }
    static Observable plaquette(int site) { return {Kind::Plaquette, site}; }
    static Observable tau_x_avg() { return {Kind::TauXAvg, 0}; }
    static Observable parity_x() { return {Kind::ParityX, 0}; }
};

inline double measure(const HamiltonianSpec& spec, const DenseState& state,
                      const Observable& obs) {
    const int n = spec.sites();
    const std::size_t dim = std::size_t(1) << n;
    if (state.amplitudes.size() != Eigen::Index(dim))
        throw config_error("state dimension does not match the Hamiltonian spec");
    const Vector& psi = state.amplitudes;
    cd acc = 0.0;
    switch (obs.kind) {
        case Observable::Kind::SxAvg:
        case Observable::Kind::TauXAvg: {
            for (int s = 0; s < n; ++s) {
                const std::uint32_t m = 1u << s;
                for (std::size_t b = 0; b < dim; ++b)
                    acc += std::conj(psi[b ^ m]) * psi[b];
            }
            acc /= double(n);
            break;
        }
        case Observable::Kind::ZZ: {
            if (spec.model != HamiltonianSpec::Model::IsingChain)
                throw config_error("zz(r) is a chain observable");
            if (obs.param < 0 || obs.param >= n)
                throw config_error("zz distance out of range");
            const int r = obs.param;
            for (std::size_t b = 0; b < dim; ++b) {
                const double z0 = (b >> 0) & 1 ? -1.0 : 1.0;
                const double z1 = (b >> r) & 1 ? -1.0 : 1.0;
                acc += z0 * z1 * std::norm(psi[b]);
            }
            break;
        }
        case Observable::Kind::Plaquette: {
            if (spec.model != HamiltonianSpec::Model::WenPlaquette)
                throw config_error("plaquette expectation needs the 2D model");
            lattice::LatticeSpec lat(spec.lx, spec.ly);
            if (obs.param < 0 || obs.param >= n)
                throw config_error("plaquette site out of range");
            auto f = PauliApplier::compile(
                lattice::plaquette(lat, lat.x_of(obs.param), lat.y_of(obs.param)));
            acc = f.expectation(psi);
            break;
        }
        case Observable::Kind::ParityX: {
            const std::uint32_t full = (1u << n) - 1;
            for (std::size_t b = 0; b < dim; ++b)
                acc += std::conj(psi[b ^ full]) * psi[b];
            break;
        }
    }
    if (std::abs(acc.imag()) > 1e-10)
        throw numerical_error("observable expectation has imaginary residue");
    return acc.real();
}

inline std::vector<double> measure_all_plaquettes(const HamiltonianSpec& spec,
                                                  const DenseState& state) {
    std::vector<double> out;
    for (int s = 0; s < spec.sites(); ++s)
        out.push_back(measure(spec, state, Observable::plaquette(s)));
    return out;
}

inline double energy(const Hamiltonian& h, const DenseState& state, double g,
                     double j) {
    Vector y(h.dim());
    h.apply(state.amplitudes, y, g, j);
    return std::real(state.amplitudes.dot(y));
}

// ---------------------------------------------------------------------------
// Real-time evolution

using RampFn = std::function<double(double)>;
using Observer = std::function<void(double, const DenseState&)>;

// Classic fixed-step RK4 on i d/dt psi = H(g(t)) psi, renormalizing after
// every step (the exact flow is unitary, so the projection removes only
// integrator drift).
inline DenseState evolve(const Hamiltonian& h, DenseState state, const RampFn& g_of_t,
                         double t0, double t1, double dt_max,
                         const Observer& observer = {}) {
    if (dt_max <= 0.0) throw config_error("dt_max must be positive");
    const double span = t1 - t0;
    if (span < 0.0) throw config_error("evolution window must have t1 >= t0");
    const cd mi(0.0, -1.0);
    const std::size_t dim = h.dim();
    Vector k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);

    const long n_steps = span > 0.0 ? long(std::ceil(span / dt_max - 1e-12)) : 0;
    if (observer) observer(t0, state);
    double t = t0;
    for (long step = 0; step < n_steps; ++step) {
        const double t_next = (step + 1 == n_steps) ? t1 : t0 + (step + 1) * span / n_steps;
        const double dt = t_next - t;
        Vector& psi = state.amplitudes;

        h.apply(psi, k1, g_of_t(t), h.spec().j);
        k1 *= mi;
        tmp = psi + 0.5 * dt * k1;
        h.apply(tmp, k2, g_of_t(t + 0.5 * dt), h.spec().j);
        k2 *= mi;
        tmp = psi + 0.5 * dt * k2;
        h.apply(tmp, k3, g_of_t(t + 0.5 * dt), h.spec().j);
        k3 *= mi;
        tmp = psi + dt * k3;
        h.apply(tmp, k4, g_of_t(t_next), h.spec().j);
        k4 *= mi;

        psi += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        psi /= psi.norm();
        t = t_next;
        if (observer) observer(t, state);
    }
    return state;
}

struct QuenchResult {
    DenseState state;         // at t = 0
    double energy_initial;    // ground energy at g_start
    double dt_used;
    double richardson_error;  // NaN unless the halving check ran
};

// Linear ramp g(t) = -t/tau_q from t_start = -g_start * tau_q to t = 0,
// starting in the ground state at g_start.
inline QuenchResult evolve_quench(const HamiltonianSpec& spec, double tau_q,
                                  double g_start, double dt_max,
                                  bool richardson_check = false,
                                  const Observer& observer = {}) {
    if (spec.model != HamiltonianSpec::Model::IsingChain)
        throw config_error("quench evolution is defined for the chain model");
    if (tau_q <= 0.0) throw config_error("tau_q must be positive");
    if (g_start <= 1.0) throw config_error("quench must start at g_start > 1");

    HamiltonianSpec init = spec;
    init.g = g_start;
    auto [e0, gs] = ground_state(init);

    Hamiltonian h(spec);
    const double t_start = -g_start * tau_q;
    const double dt = std::min(dt_max, tau_q / 1e4);
    RampFn ramp = [tau_q](double t) { return -t / tau_q; };

    QuenchResult res;
    res.energy_initial = e0;
    res.dt_used = dt;
    res.richardson_error = std::numeric_limits<double>::quiet_NaN();
    res.state = evolve(h, gs, ramp, t_start, 0.0, dt, observer);
    if (richardson_check) {
        DenseState half = evolve(h, gs, ramp, t_start, 0.0, dt / 2.0);
        res.richardson_error =
            (res.state.amplitudes - half.amplitudes).norm() * 16.0 / 15.0;
    }
    return res;
}

// ---------------------------------------------------------------------------
// Spectrum comparison against the decoupled diagonal chains

struct SpectrumLevel {
    double energy;
    long deg_2d;
    long deg_chain;
    double ratio;  // deg_2d / deg_chain
};

struct SpectrumMatchReport {
    bool matched = false;
    int n_chains = 0;
    int chain_length = 0;
    double max_level_diff = 0.0;
    std::vector<SpectrumLevel> levels;

    std::string transcript() const {
        std::ostringstream os;
        os << n_chains << " chain(s) of length " << chain_length << ", "
           << levels.size() << " distinct levels, max level diff " << max_level_diff
           << ", " << (matched ? "MATCH" : "MISMATCH") << "\n";
        return os.str();
    }
};

namespace detail {

inline std::vector<std::pair<double, long>> cluster(std::vector<double> ev,
                                                    double tol) {
    std::sort(ev.begin(), ev.end());
    std::vector<std::pair<double, long>> out;
    for (double e : ev) {
        if (!out.empty() && std::abs(e - out.back().first) <= tol)
            ++out.back().second;
        else
            out.push_back({e, 1});
    }
    return out;
}

}  // namespace detail

// The lattice sites decompose into orbits of the diagonal step
// s -> s + x + y. Along an orbit of length L, the L tau^x operators act as
// the transverse field of an L-site ring (coefficient J) and the L
// plaquettes act as its bonds (coefficient g); tau_j^x anticommutes with
// exactly the plaquettes at j and j - x - y, which are its two adjacent
// bonds. For L = 2 the two bonds join the same pair of sites and the chain
// coupling doubles. Fixed empirically on the 2x2 lattice, where only this
// orientation and bond count reproduce the spectrum at g != J.
inline SpectrumMatchReport spectrum_match(int lx, int ly, double g, double j,
                                          double tol = 1e-8) {
    if (lx % 2 != 0 || ly % 2 != 0)
        throw config_error("spectrum_match requires even lattice extents");
    if (lx * ly > dense_site_limit)
        throw config_error("spectrum_match limited to 12 sites");

    const std::vector<double> ev2d =
        spectrum(HamiltonianSpec::wen_plaquette(lx, ly, g, j));

    const int chain_length = std::lcm(lx, ly);
    const int n_chains = (lx * ly) / chain_length;

    // single ring: L sites, bond m joining (m, m+1 mod L); the L = 2 ring
    // accumulates both bonds between its two sites
    std::vector<double> ring;
    {
        const std::size_t dim = std::size_t(1) << chain_length;
        std::vector<double> zz(dim, 0.0);
        for (std::size_t b = 0; b < dim; ++b)
            for (int m = 0; m < chain_length; ++m) {
                const int s0 = m, s1 = (m + 1) % chain_length;
                const double z0 = (b >> s0) & 1 ? -1.0 : 1.0;
                const double z1 = (b >> s1) & 1 ? -1.0 : 1.0;
                zz[b] += z0 * z1;
            }
        Matrix h = Matrix::Zero(dim, dim);
        for (std::size_t b = 0; b < dim; ++b) {
            h(b, b) = -g * zz[b];  // plaquettes <-> bonds
            for (int s = 0; s < chain_length; ++s)
                h(b ^ (1u << s), b) += -j;  // tau^x <-> transverse field
        }
        Eigen::SelfAdjointEigenSolver<Matrix> solver(h, Eigen::EigenvaluesOnly);
        ring.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + dim);
    }

    std::vector<double> chain_ev{0.0};
    for (int c = 0; c < n_chains; ++c) {
        std::vector<double> next;
        next.reserve(chain_ev.size() * ring.size());
        for (double a : chain_ev)
            for (double e : ring) next.push_back(a + e);
        chain_ev = std::move(next);
    }

    const auto lev2d = detail::cluster(ev2d, tol);
    const auto levch = detail::cluster(chain_ev, tol);

    SpectrumMatchReport rep;
    rep.n_chains = n_chains;
    rep.chain_length = chain_length;
    rep.matched = lev2d.size() == levch.size();
    const std::size_t n_levels = std::min(lev2d.size(), levch.size());
    for (std::size_t i = 0; i < n_levels; ++i) {
        const double diff = std::abs(lev2d[i].first - levch[i].first);
        rep.max_level_diff = std::max(rep.max_level_diff, diff);
        if (diff > tol) rep.matched = false;
        rep.levels.push_back({lev2d[i].first, lev2d[i].second, levch[i].second,
                              double(lev2d[i].second) / double(levch[i].second)});
    }
    return rep;
}

}  // namespace topoquench::ed
