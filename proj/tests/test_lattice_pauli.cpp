#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "topoquench/lattice_pauli.hpp"

using namespace topoquench;
using namespace topoquench::lattice;

namespace {

PauliString random_string(std::mt19937& rng, const LatticeSpec& lat) {
    std::uniform_int_distribution<int> nletters(0, 5);
    std::uniform_int_distribution<int> site(0, lat.sites() - 1);
    std::uniform_int_distribution<int> letter(1, 3);
    std::uniform_int_distribution<int> ph(0, 3);
    PauliString s(lat);
    int n = nletters(rng);
    for (int i = 0; i < n; ++i)
        s = multiply(s, PauliString::single(lat, site(rng), static_cast<Pauli>(letter(rng))));
    s.set_phase(s.phase() + ph(rng));
    return s;
}

}  // namespace

TEST_CASE("single-site products", "[lattice_pauli]") {
    LatticeSpec lat(4, 4);
    auto X0 = PauliString::single(lat, 0, Pauli::X);
    auto Y0 = PauliString::single(lat, 0, Pauli::Y);

    SECTION("involution: X.X = I with phase 0") {
        auto p = multiply(X0, X0);
        REQUIRE(p.is_identity());
        REQUIRE(p.phase() == 0);
    }
    SECTION("X.Y = i Z") {
        auto p = multiply(X0, Y0);
        REQUIRE(p.phase() == 1);
        REQUIRE(p.letters().size() == 1);
        REQUIRE(p.letters().at(0) == Pauli::Z);
    }
    SECTION("mismatched lattices rejected") {
        LatticeSpec other(4, 6);
        REQUIRE_THROWS_AS(multiply(X0, PauliString::single(other, 0, Pauli::X)),
                          config_error);
    }
}

TEST_CASE("plaquette operator structure", "[lattice_pauli]") {
    SECTION("2x2 base plaquette touches all four sites with Y,X,Y,X") {
        LatticeSpec lat(2, 2);
        auto f = plaquette(lat, 0, 0);
        REQUIRE(f.phase() == 0);
        REQUIRE(f.letters().size() == 4);
        REQUIRE(f.letters().at(lat.site(0, 0)) == Pauli::Y);
        REQUIRE(f.letters().at(lat.site(1, 0)) == Pauli::X);
        REQUIRE(f.letters().at(lat.site(1, 1)) == Pauli::Y);
        REQUIRE(f.letters().at(lat.site(0, 1)) == Pauli::X);
    }
    SECTION("plaquettes square to the identity") {
        LatticeSpec lat(4, 4);
        for (int x = 0; x < 4; ++x)
            for (int y = 0; y < 4; ++y) {
                auto f = plaquette(lat, x, y);
                REQUIRE(multiply(f, f).is_identity());
            }
    }
    SECTION("x-neighbour plaquettes share exactly two sites") {
        LatticeSpec lat(4, 4);
        auto a = plaquette(lat, 1, 1);
        auto b = plaquette(lat, 2, 1);
        int shared = 0;
        for (const auto& [s, p] : a.letters()) shared += b.letters().count(s);
        REQUIRE(shared == 2);
    }
}

TEST_CASE("commutators", "[lattice_pauli]") {
    LatticeSpec lat(4, 4);

    SECTION("disjoint same-letter supports commute") {
        auto a = PauliString::single(lat, 0, Pauli::X);
        auto b = PauliString::single(lat, 5, Pauli::X);
        REQUIRE(commutator(a, b).is_zero());
    }
    SECTION("[X,Y] on one site = 2iZ") {
        auto a = PauliString::single(lat, 3, Pauli::X);
        auto b = PauliString::single(lat, 3, Pauli::Y);
        auto c = commutator(a, b);
        REQUIRE_FALSE(c.is_zero());
        REQUIRE(CommutatorResult::scale == 2);
        REQUIRE(c.value.phase() == 1);
        REQUIRE(c.value.letters().at(3) == Pauli::Z);
    }
    SECTION("x-neighbour plaquettes commute") {
        auto a = plaquette(lat, 0, 0);
        auto b = plaquette(lat, 1, 0);
        REQUIRE(commutator(a, b).is_zero());
    }
    SECTION("antisymmetry of the zero/nonzero split, sign flip when nonzero") {
        std::mt19937 rng(20240811);
        for (int trial = 0; trial < 300; ++trial) {
            auto a = random_string(rng, lat);
            auto b = random_string(rng, lat);
            auto ab = commutator(a, b);
            auto ba = commutator(b, a);
            REQUIRE(ab.is_zero() == ba.is_zero());
            if (!ab.is_zero()) {
                // [b,a] = -[a,b]: values differ by phase exponent 2
                auto flipped = ba.value;
                flipped.set_phase(flipped.phase() + 2);
                REQUIRE(ab.value == flipped);
            }
        }
    }
}

TEST_CASE("product algebra properties", "[lattice_pauli]") {
    LatticeSpec lat(3, 4);
    std::mt19937 rng(987654);

    SECTION("associativity on random triples") {
        for (int trial = 0; trial < 400; ++trial) {
            auto a = random_string(rng, lat);
            auto b = random_string(rng, lat);
            auto c = random_string(rng, lat);
            REQUIRE(multiply(a, multiply(b, c)) == multiply(multiply(a, b), c));
        }
    }
    SECTION("identity is neutral and phases stay reduced") {
        PauliString id(lat);
        for (int trial = 0; trial < 200; ++trial) {
            auto a = random_string(rng, lat);
            REQUIRE(multiply(a, id) == a);
            REQUIRE(multiply(id, a) == a);
            REQUIRE(a.phase() >= 0);
            REQUIRE(a.phase() <= 3);
        }
    }
}

TEST_CASE("mapping verification", "[lattice_pauli]") {
    SECTION("even-by-even lattices pass") {
        for (int l : {2, 4, 6}) {
            auto rep = verify_mapping(LatticeSpec(l, l));
            INFO(rep.transcript());
            REQUIRE(rep.passed());
            for (const auto& fam : rep.families)
                REQUIRE(fam.pairs_checked == long(l * l) * long(l * l));
        }
    }
    SECTION("rectangular lattice passes") {
        REQUIRE(verify_mapping(LatticeSpec(2, 6)).passed());
    }
    SECTION("bound is enforced as a refusal") {
        REQUIRE_THROWS_AS(verify_mapping(LatticeSpec(14, 2)), config_error);
    }
    SECTION("corrupted plaquette is caught") {
        auto corrupted = [](const LatticeSpec& lat, int x, int y,
                            PlaquetteConvention conv) {
            auto f = plaquette(lat, x, y, conv);
            if (x == 1 && y == 0) {
                // flip one letter: Y corner -> Z corner
                auto base = conv == PlaquetteConvention::YXYX ? Pauli::Y : Pauli::X;
                auto g = multiply(f, PauliString::single(lat, lat.site(x, y), base));
                f = multiply(g, PauliString::single(lat, lat.site(x, y), Pauli::Z));
                f.set_phase(0);
            }
            return f;
        };
        auto rep = verify_mapping(LatticeSpec(4, 4), 12, corrupted);
        REQUIRE_FALSE(rep.passed());
        REQUIRE(rep.counterexamples.size() >= 1);
    }
}
