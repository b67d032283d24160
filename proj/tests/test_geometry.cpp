#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "fermigas/geometry.hpp"
#include "oracles.hpp"

using namespace fermigas;
using Catch::Approx;

TEST_CASE("unit square lattice counting", "[geometry]") {
    const auto square = DomainSpec::rectangle({1.0, 1.0});
    const Grid g4 = build_grid(square, 4);
    CHECK(g4.size() == 9);
    CHECK(g4.spacing == Approx(0.25));

    const Grid g100 = build_grid(square, 100);
    CHECK(g100.size() == 99 * 99);
    CHECK(g100.cell_measure == Approx(1e-4).epsilon(1e-12));
}

TEST_CASE("disk lattice measure approaches the area", "[geometry]") {
    const auto disk = DomainSpec::disk(1.0);
    const Grid g = build_grid(disk, 100);
    const long oracle = oracles::disk_lattice_count(1.0, 0.01);
    CHECK(static_cast<long>(g.size()) == oracle);
    const double measure = static_cast<double>(g.size()) * g.cell_measure;
    CHECK(std::abs(measure - kPi) / kPi < 0.02);
}

TEST_CASE("grid refinement shrinks the measure defect", "[geometry]") {
    const auto disk = DomainSpec::disk(1.0);
    const double e1 = std::abs(volume_by_quadrature(disk, 100) - kPi);
    const double e2 = std::abs(volume_by_quadrature(disk, 200) - kPi);
    CHECK(e2 <= 2.0 * e1 + 1e-12);
}

TEST_CASE("node ordering is deterministic", "[geometry]") {
    const auto disk = DomainSpec::disk(0.8);
    const Grid a = build_grid(disk, 37);
    const Grid b = build_grid(disk, 37);
    REQUIRE(a.size() == b.size());
    CHECK(a.nodes == b.nodes);
    CHECK(a.index_map == b.index_map);
}

TEST_CASE("closed-form volumes", "[geometry]") {
    CHECK(volume(DomainSpec::rectangle({1.0, 2.0})) == Approx(2.0));
    CHECK(volume(DomainSpec::rectangle({1.0, 1.0, 1.0})) == Approx(1.0));
    CHECK(volume(DomainSpec::disk(1.0)) == Approx(kPi));
    CHECK(volume(DomainSpec::l_shape({1.0, 1.0}, {0.5, 0.5})) == Approx(0.75));
    // quadrature path on the disk
    CHECK(volume_by_quadrature(DomainSpec::disk(1.0), 400) == Approx(kPi).margin(1e-3 * kPi));
}

TEST_CASE("compact subsets", "[geometry]") {
    const auto square = DomainSpec::rectangle({1.0, 1.0});
    const auto a = compact_subset(square, 0.25);
    CHECK(a.contains({0.5, 0.5, 0.0}));
    CHECK_FALSE(a.contains({0.1, 0.5, 0.0}));

    const auto cube = DomainSpec::rectangle({1.0, 1.0, 1.0});
    const auto b = compact_subset(cube, 0.25);
    CHECK(b.measure() == Approx(0.125).epsilon(1e-12));
    CHECK(b.contains({0.5, 0.5, 0.5}));
    CHECK_FALSE(b.contains({0.2, 0.5, 0.5}));

    CHECK_THROWS_AS(compact_subset(square, 0.6), EmptyErosion);
}

TEST_CASE("erosion monotonicity", "[geometry]") {
    const auto disk = DomainSpec::disk(1.0);
    const auto tight = compact_subset(disk, 0.3);
    const auto loose = compact_subset(disk, 0.1);
    for (double x = -1.0; x <= 1.0; x += 0.09)
        for (double y = -1.0; y <= 1.0; y += 0.09) {
            const Point p{x, y, 0.0};
            if (tight.contains(p)) CHECK(loose.contains(p));
        }
}

TEST_CASE("polygon membership and distance", "[geometry]") {
    const auto poly = DomainSpec::polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
    CHECK(volume(poly) == Approx(1.0));
    CHECK(poly.contains({0.5, 0.5, 0.0}));
    CHECK_FALSE(poly.contains({0.0, 0.5, 0.0}));  // boundary counts as outside
    CHECK_FALSE(poly.contains({1.5, 0.5, 0.0}));
    CHECK(poly.boundary_distance({0.5, 0.5, 0.0}) == Approx(0.5));
    CHECK(poly.boundary_distance({0.25, 0.5, 0.0}) == Approx(0.25));

    CHECK_THROWS_AS(DomainSpec::polygon({{0, 0}, {1, 1}, {1, 0}, {0, 1}}), ConfigError);
}

TEST_CASE("l-shape membership near the notch", "[geometry]") {
    const auto l = DomainSpec::l_shape({1.0, 1.0}, {0.5, 0.5});
    CHECK(l.contains({0.25, 0.25, 0.0}));
    CHECK(l.contains({0.25, 0.75, 0.0}));
    CHECK_FALSE(l.contains({0.75, 0.75, 0.0}));  // inside the notch
    CHECK(l.boundary_distance({0.25, 0.25, 0.0}) == Approx(0.25));
    // near the reentrant corner at (0.5, 0.5)
    CHECK(l.boundary_distance({0.4, 0.4, 0.0}) == Approx(std::hypot(0.1, 0.1)));
}

namespace {

void write_pgm(const std::string& path, int w, int h,
               const std::vector<int>& pix, bool binary) {
    std::ofstream out(path, std::ios::binary);
    out << (binary ? "P5" : "P2") << "\n# test fixture\n" << w << " " << h << "\n255\n";
    if (binary) {
        for (int v : pix) out.put(static_cast<char>(v));
    } else {
        for (int v : pix) out << v << "\n";
    }
}

}  // namespace

TEST_CASE("pgm masks", "[geometry]") {
    const int w = 16, h = 16;
    std::vector<int> pix(w * h, 0);
    for (int j = 4; j < 12; ++j)
        for (int i = 4; i < 12; ++i) pix[j * w + i] = 255;

    for (bool binary : {false, true}) {
        const std::string path = binary ? "mask_p5.pgm" : "mask_p2.pgm";
        write_pgm(path, w, h, pix, binary);
        const auto dom = DomainSpec::mask_from_pgm(path, 1.0, 1.0);
        CHECK(volume(dom) == Approx(64.0 / 256.0));
        CHECK(dom.contains({0.5, 0.5, 0.0}));
        CHECK_FALSE(dom.contains({0.05, 0.05, 0.0}));
        const Grid g = build_grid(dom, 32);
        CHECK(g.size() > 0);
        std::remove(path.c_str());
    }

    // two blobs -> rejected
    std::vector<int> split(w * h, 0);
    split[2 * w + 2] = 255;
    split[12 * w + 12] = 255;
    write_pgm("mask_split.pgm", w, h, split, false);
    CHECK_THROWS_AS(DomainSpec::mask_from_pgm("mask_split.pgm", 1.0, 1.0),
                    DisconnectedMask);
    std::remove("mask_split.pgm");
}

TEST_CASE("degenerate grids are rejected", "[geometry]") {
    const auto tiny = DomainSpec::rectangle({0.01, 0.01});
    CHECK_THROWS_AS(build_grid(tiny, 8), EmptyInterior);
}
