#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "topoquench/errors.hpp"

namespace topoquench {

inline constexpr double pi = std::numbers::pi;

// Momentum grids for the fermionized chain. The thermodynamic grid is a
// midpoint discretization of (-pi, pi) that stays clear of the exact
// endpoints and of k = 0; the antiperiodic grid holds the N discrete momenta
// k = +-(2m-1) pi/N of the even fermion-parity sector of an N-site ring.
struct KGrid {
    enum class Kind { Thermodynamic, Antiperiodic };

    Kind kind = Kind::Thermodynamic;
    int size = 1024;  // number of modes: nk, or the chain length N

    static KGrid thermodynamic(int nk) {
        if (nk < 2) throw config_error("thermodynamic grid needs nk >= 2");
        return {Kind::Thermodynamic, nk};
    }
    static KGrid antiperiodic(int n_sites) {
        if (n_sites < 2 || n_sites % 2 != 0)
            throw config_error("antiperiodic grid needs an even chain length >= 2");
        return {Kind::Antiperiodic, n_sites};
    }

    std::vector<double> momenta() const {
        std::vector<double> k(size);
        if (kind == Kind::Thermodynamic) {
            const double h = 2.0 * pi / size;
            for (int j = 0; j < size; ++j) k[j] = -pi + (j + 0.5) * h;
        } else {
            const int half = size / 2;
            for (int m = 1; m <= half; ++m) {
                k[half - m] = -(2 * m - 1) * pi / size;
                k[half + m - 1] = (2 * m - 1) * pi / size;
            }
        }
        return k;
    }

    // Weight w such that  sum_k w * f(k)  approximates (1/2pi) Int dk f(k)
    // (thermodynamic) or equals the discrete mode average (antiperiodic).
    double mean_weight() const { return 1.0 / size; }

    bool operator==(const KGrid&) const = default;
};

}  // namespace topoquench
