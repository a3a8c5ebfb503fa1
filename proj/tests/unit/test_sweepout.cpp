#include "doctest.h"

#include "fbms/geom/group.hpp"
#include "fbms/geom/primitives.hpp"
#include "fbms/geom/topology.hpp"
#include "fbms/sweepout/sweepout.hpp"

#include <cmath>
#include <sstream>

using namespace fbms;

namespace {

const double kPi = pi<double>();

// Area of the part of the unit disc inside the disc of radius e centred on
// the unit circle.
double lens_area(double e) {
    return e * e * std::acos(e / 2) + std::acos(1 - e * e / 2) - 0.5 * std::sqrt(e * e * (4 - e * e));
}

// Brute-force orbit check: every vertex image under every group element is
// (up to tol) some vertex of the mesh.
double brute_force_orbit_defect(const TriMesh<double>& m, int n) {
    const auto G = dihedral_group<double>(n);
    double worst = 0;
    for (const auto& el : G.elements())
        for (const auto& v : m.vertices()) {
            const Vec3d w = el(v);
            double best = 1e300;
            for (const auto& u : m.vertices()) best = std::min(best, (u - w).norm());
            worst = std::max(worst, best);
        }
    return worst;
}

SliceSpec<Quad> spec_at(int g, const Quad& t, int resolution = 0) {
    return SliceSpec<Quad>{default_schedule<Quad>(g), t, resolution};
}

}  // namespace

TEST_CASE("anchor points") {
    const auto p1 = anchor_points<double>(1);
    REQUIRE(p1.size() == 4);
    CHECK(p1[0].x() == doctest::Approx(std::sqrt(2.0) / 2));
    CHECK(p1[0].y() == doctest::Approx(std::sqrt(2.0) / 2));
    CHECK(p1[1].x() == doctest::Approx(std::sqrt(2.0) / 2));
    CHECK(p1[1].y() == doctest::Approx(-std::sqrt(2.0) / 2));
    const auto p2 = anchor_points<double>(2);
    CHECK(p2[0].x() == doctest::Approx(std::cos(kPi / 6)));
    CHECK(p2[0].y() == doctest::Approx(std::sin(kPi / 6)));
    for (int g = 1; g <= 6; ++g) {
        const auto p = anchor_points<double>(g);
        CHECK(static_cast<int>(p.size()) == 2 * (g + 1));
        for (std::size_t i = 0; i < p.size(); ++i) {
            CHECK(p[i].norm() == doctest::Approx(1.0).epsilon(1e-15));
            CHECK(p[i].z() == 0.0);
            for (std::size_t j = 0; j < i; ++j) CHECK((p[i] - p[j]).norm() > 1e-3);
        }
    }
    CHECK_THROWS_AS(anchor_points<double>(0), Error);
}

TEST_CASE("default schedule satisfies its invariants") {
    for (int g = 1; g <= 6; ++g) {
        const auto s = default_schedule<Quad>(g);
        CHECK_NOTHROW(s.validate());
        CHECK(s.r > Quad(5) * s.t0);
        CHECK(Quad(5) * s.t0 >= Quad(10 * (g + 1)) * s.eps0);
        CHECK(s.eps_fn(s.t0) == s.eps0);
        Quad prev = s.eps0;
        for (int i = 1; i < 50; ++i) {
            const Quad t = s.t0 + (Quad(1) - s.t0) * Quad(i) / Quad(50);
            const Quad e = s.eps_fn(t);
            CHECK(e > Quad(0));
            CHECK(e <= prev);
            prev = e;
        }
    }
    const auto s = default_schedule<Quad>(1);
    CHECK_THROWS_AS(override_schedule(s, 0.8, -1, -1, -1), Error);    // r above sin(pi/4)
    CHECK_THROWS_AS(override_schedule(s, -1, 1e-3, -1, -1), Error);   // -log h too small
    const auto o = override_schedule(s, 0.5, -1, 1e-9, 2.0);
    CHECK(o.h == o.t0);
    CHECK(o.eps0 == o.t0 / Quad(4));
    try {
        override_schedule(s, 0.8, -1, -1, -1);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Precondition);
    }
}

TEST_CASE("stage boundaries") {
    const auto s = default_schedule<Quad>(2);
    CHECK(stage_of(s.t0, s) == Stage::Ribbons);
    CHECK(stage_of(Quad(0.5), s) == Stage::Ribbons);
    CHECK(stage_of(s.t0 * Quad(0.99), s) == Stage::Necks);
    CHECK(stage_of(s.t0 / Quad(2), s) == Stage::Necks);
    CHECK(stage_of(s.t0 * Quad(0.49), s) == Stage::Widening);
    CHECK(stage_of(s.t0 / Quad(4), s) == Stage::Widening);
    CHECK(stage_of(s.t0 * Quad(0.2), s) == Stage::Retraction);
    for (Quad t : {Quad(0), Quad(1)}) {
        try {
            build_slice(SliceSpec<Quad>{s, t, 0});
            CHECK(false);
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::DegenerateSlice);
        }
    }
    CHECK_THROWS_AS(build_slice_in_stage(SliceSpec<Quad>{s, Quad(0.5), 0}, Stage::Necks), Error);
}

TEST_CASE("slice resolution must resolve the sectors") {
    const auto s = default_schedule<Quad>(1);
    for (int res : {8, 24, 36}) {
        try {
            build_slice(SliceSpec<Quad>{s, Quad(0.5), res});
            CHECK(false);
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::Precondition);
        }
    }
    CHECK_NOTHROW(build_slice(SliceSpec<Quad>{s, Quad(0.5), 32}));
}

TEST_CASE("punctured disc") {
    for (int g : {1, 2, 4}) {
        const double eps = 0.1 * std::sin(kPi / (2 * g + 2));
        for (int sign : {1, -1}) {
            const auto m = punctured_disc_mesh<double>(g, eps, sign);
            int comps = 0;
            face_components(m.faces(), &comps);
            CHECK(comps == 1);
            CHECK(genus(m) == 0);
            CHECK(boundary_components(m) == 1);
            const double smooth = kPi - (g + 1) * lens_area(eps);
            CHECK(m.area() <= kPi);
            CHECK(m.area() <= smooth);
            CHECK(std::abs(m.area() - smooth) <= mesh_tolerance(m));
            // half-disc removal to leading order
            CHECK(std::abs(smooth - (kPi - (g + 1) * kPi * eps * eps / 2)) < 2 * (g + 1) * eps * eps * eps);
        }
    }
    // small bites: area tends to the full disc
    const auto tiny = punctured_disc_mesh<Quad>(1, Quad(1e-20), 1);
    CHECK(std::abs(static_cast<double>(tiny.area()) - kPi) <= mesh_tolerance(tiny));
    // three bites per sign family for g = 2, eps = 1/4
    const auto fig = punctured_disc_mesh<double>(2, 0.25, 1);
    int on_circle_bites = 0;
    for (const auto& p : anchor_points<double>(2)) {
        double nearest = 1e9;
        for (const auto& v : fig.vertices()) nearest = std::min(nearest, (v - p).norm());
        if (nearest > 0.2) ++on_circle_bites;
    }
    CHECK(on_circle_bites == 3);
    CHECK_THROWS_AS(punctured_disc_mesh<double>(2, 0.5, 1), Error);
    CHECK_THROWS_AS(punctured_disc_mesh<double>(2, 0.0, 1), Error);
    CHECK_THROWS_AS(punctured_disc_mesh<double>(2, 0.1, 0), Error);
}

TEST_CASE("slice area bound") {
    CHECK(slice_area_bound(3, 1.0, 0.0) == doctest::Approx(kPi));
    const auto s = default_schedule<Quad>(2);
    CHECK(slice_area_bound(2, s.t0, s.eps0) < Quad(3) * pi<Quad>());
    for (double t : {0.1, 0.5, 0.9})
        for (double eps : {0.01, 0.03}) {
            if (3 * eps < t) {
                CHECK(slice_area_bound(2, t, eps) < 3 * kPi);
            }
        }
    // eps = 2 t0/(g+1) breaks the bound by exactly 2 pi t0^2
    for (int g = 1; g <= 5; ++g) {
        const auto sq = default_schedule<Quad>(g);
        const Quad bad_eps = Quad(2) * sq.t0 / Quad(g + 1);
        const Quad excess = slice_area_bound_excess(g, sq.t0, bad_eps);
        CHECK(excess > Quad(0));
        CHECK(static_cast<double>(excess / (Quad(2) * pi<Quad>() * sq.t0 * sq.t0)) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(slice_area_bound_excess(g, sq.t0, sq.eps0) < Quad(0));
        if (g <= 3) CHECK(slice_area_bound(g, sq.t0, bad_eps) > Quad(3) * pi<Quad>());
    }
    CHECK(slice_area_bound_excess(2, 0.5, 0.1) == doctest::Approx(slice_area_bound(2, 0.5, 0.1) - 3 * kPi));
    CHECK(ribbon_area_bound(0.01, 0.5) == doctest::Approx(kPi * 0.005));
}

TEST_CASE("replacement and widening bounds") {
    const Quad t0q = exp(Quad(-25));
    CHECK(replacement_stage_bound(2, t0q) < Quad(3) * pi<Quad>());
    const Quad rq = Quad(5) * t0q;
    CHECK(widening_bound(2, rq, t0q) == Quad(3) * pi<Quad>() - Quad(15) * pi<Quad>() * t0q * t0q);
    CHECK(widening_bound(2, rq, t0q) < Quad(3) * pi<Quad>());
    CHECK(replacement_stage_bound(1, 1e-5) < 3 * kPi);
    CHECK(widening_bound(1, 1e-4, 1e-5) < 3 * kPi);
    CHECK_THROWS_AS(widening_bound(1, 1e-5, 1e-5), Error);
    CHECK_THROWS_AS(replacement_stage_bound(5, 1e-5), Error);
}

TEST_CASE("slices have genus g and one boundary loop") {
    for (int g : {1, 2, 3}) {
        const auto s = default_schedule<Quad>(g);
        for (Quad t : {Quad(0.9), Quad(0.3), s.t0, s.t0 * Quad(0.7), s.t0 * Quad(0.4), s.t0 * Quad(0.1)}) {
            const auto m = build_slice(SliceSpec<Quad>{s, t, 16 * (g + 1)});
            CHECK(genus(m) == g);
            CHECK(boundary_components(m) == 1);
            CHECK(is_consistently_oriented(m.faces()));
        }
    }
}

TEST_CASE("slice vertex tags") {
    const auto s = default_schedule<Quad>(2);
    const auto G = dihedral_group<Quad>(3);
    for (Quad t : {Quad(0.4), s.t0 * Quad(0.7), s.t0 * Quad(0.1)}) {
        const auto m = build_slice(SliceSpec<Quad>{s, t, 48});
        int tagged = 0;
        for (int v = 0; v < m.num_vertices(); ++v) {
            const auto& tag = m.tags()[v];
            const Vec3q& p = m.vertex(v);
            if (tag.on_sphere) {
                ++tagged;
                CHECK(static_cast<double>(abs(p.norm() - Quad(1))) < 1e-30);
            } else {
                CHECK(p.norm() < Quad(1));
            }
            if (tag.axis >= 0) {
                const Vec3q& a = G.axis(tag.axis);
                CHECK(static_cast<double>((p - a * a.dot(p)).norm()) < 1e-30);
            }
        }
        CHECK(tagged > 0);
    }
}

TEST_CASE("slices are dihedrally invariant") {
    for (int g : {1, 2}) {
        const auto s = default_schedule<Quad>(g);
        for (Quad t : {Quad(0.6), s.t0 * Quad(0.8), s.t0 * Quad(0.3), s.t0 * Quad(0.05)}) {
            const auto m = build_slice(SliceSpec<Quad>{s, t, 16 * (g + 1)}).cast<double>();
            CHECK(brute_force_orbit_defect(m, g + 1) <= 2 * m.max_edge_length());
            CHECK(brute_force_orbit_defect(m, g + 1) <= 1e-12);
            const auto c = certify_slice(SliceSpec<Quad>{s, t, 16 * (g + 1)});
            CHECK(c.equivariance_residual <= 1e-12);
        }
    }
}

TEST_CASE("ribbons and walls") {
    const auto s = default_schedule<Quad>(2);
    for (Quad t : {Quad(0.25), Quad(0.75)}) {
        const auto m = build_slice(SliceSpec<Quad>{s, t, 0});
        std::vector<Face> walls;
        Quad wall_area = 0;
        for (int f = 0; f < m.num_faces(); ++f)
            if (m.parts()[f] == FacePart::Wall) {
                walls.push_back(m.face(f));
                wall_area += m.face_area(f);
            }
        int comps = 0;
        face_components(walls, &comps);
        CHECK(comps == 6);
        const Quad per = wall_area / Quad(6);
        const Quad bound = ribbon_area_bound(s.eps_fn(t), t);
        CHECK(per <= bound);
        // the ball squeezes the ribbon horizontally by sqrt(1 - z^2)
        CHECK(static_cast<double>(per / bound) > 0.98 * (1 - static_cast<double>(t * t) / 6));
    }
}

TEST_CASE("area near the top of the sweep approaches the disc") {
    const auto s = default_schedule<Quad>(1);
    const auto m = build_slice(SliceSpec<Quad>{s, Quad(1) - Quad(1e-6), 0});
    CHECK(std::abs(static_cast<double>(m.area()) - kPi) <= mesh_tolerance(m));
    const auto e0 = endpoint_slice(0, 1);
    CHECK(e0.arcs.empty());
    CHECK(e0.mesh.area() == doctest::Approx(kPi).epsilon(1e-2));
    const auto e1 = endpoint_slice(1, 1);
    REQUIRE(e1.arcs.size() == 4);
    for (std::size_t i = 0; i < e1.arcs.size(); ++i) {
        const auto& arc = e1.arcs[i];
        double len = 0;
        for (std::size_t k = 0; k + 1 < arc.size(); ++k) len += (arc[k + 1] - arc[k]).norm();
        CHECK(len == doctest::Approx(kPi / 2).epsilon(1e-3));
        CHECK(arc.back().z() == doctest::Approx(i % 2 == 0 ? 1.0 : -1.0));
        for (const auto& p : arc) CHECK(p.norm() == doctest::Approx(1.0));
    }
    CHECK_THROWS_AS(endpoint_slice(2, 1), Error);
}

TEST_CASE("sheets project onto the plane without folds") {
    // every sheet face keeps the orientation of its sheet when projected to z = 0
    for (int g = 1; g <= 6; ++g) {
        const auto s = default_schedule<Quad>(g);
        for (double f : {0.1, 0.3, 0.45, 0.7, 0.99, 1.0}) {
            const auto m = build_slice(spec_at(g, Quad(f) * s.t0));
            for (FacePart part : {FacePart::Top, FacePart::Middle, FacePart::Bottom}) {
                std::vector<Quad> signed_areas;
                Quad total = 0;
                for (int i = 0; i < m.num_faces(); ++i) {
                    if (m.parts()[i] != part) continue;
                    const auto& fc = m.faces()[i];
                    const Vec3<Quad> a = m.vertex(fc[1]) - m.vertex(fc[0]), b = m.vertex(fc[2]) - m.vertex(fc[0]);
                    signed_areas.push_back(a.x() * b.y() - a.y() * b.x());
                    total += signed_areas.back();
                }
                int reversed = 0;
                for (const Quad& x : signed_areas) reversed += x * total < Quad(0);
                INFO("g = ", g, ", t / t0 = ", f, ", part ", static_cast<int>(part));
                CHECK(reversed == 0);
            }
        }
    }
}

TEST_CASE("area continuity at stage boundaries") {
    const auto s = default_schedule<Quad>(3);
    const std::pair<Stage, Stage> sides[] = {
        {Stage::Ribbons, Stage::Necks}, {Stage::Necks, Stage::Widening}, {Stage::Widening, Stage::Retraction}};
    const Quad ts[] = {s.t0, s.t0 / Quad(2), s.t0 / Quad(4)};
    for (int i = 0; i < 3; ++i) {
        const SliceSpec<Quad> spec{s, ts[i], 0};
        const auto a = build_slice_in_stage(spec, sides[i].first);
        const auto b = build_slice_in_stage(spec, sides[i].second);
        const double tol = std::max(mesh_tolerance(a), mesh_tolerance(b));
        CHECK(static_cast<double>(abs(a.area() - b.area())) <= tol);
    }
}

TEST_CASE("areas decrease through widening and retraction") {
    const auto s = default_schedule<Quad>(2);
    Quad prev = 0;
    for (int i = 1; i <= 40; ++i) {
        const Quad t = s.t0 / Quad(2) * Quad(i) / Quad(40);
        const Quad a = build_slice(SliceSpec<Quad>{s, t, 48}).area();
        CHECK(a > prev);
        prev = a;
    }
    CHECK(build_slice(SliceSpec<Quad>{s, s.t0 * Quad(1e-6), 48}).area() < Quad(3.2));
}

TEST_CASE("mesh tolerance matches the chord deficit of a polygonal disc") {
    for (int k : {16, 64, 256}) {
        const auto m = disc_mesh<double>(k, 4);
        const double deficit = kPi - 0.5 * k * std::sin(2 * kPi / k);
        const double est = mesh_tolerance(m) / 10;
        CHECK(est == doctest::Approx(deficit).epsilon(0.02));
    }
    // curved surface: the curvature term is positive
    const auto cat = torus_mesh<double>(24, 12);
    CHECK(mesh_tolerance(cat) > 0);
}

TEST_CASE("certificates") {
    const auto s = default_schedule<Quad>(2);
    for (Quad t : {Quad(0.5), s.t0, s.t0 * Quad(0.6), s.t0 * Quad(0.3), s.t0 * Quad(0.2)}) {
        const auto c = certify_slice(SliceSpec<Quad>{s, t, 0});
        CHECK(c.error.empty());
        CHECK(c.genus == 2);
        CHECK(c.boundary_components == 1);
        CHECK(c.ribbons == 6);
        CHECK(c.area <= c.bound + Quad(c.tolerance));
        CHECK(c.area < Quad(3) * pi<Quad>());
        CHECK(c.passed());
    }
    // failure is reported, not thrown
    const auto bad = certify_slice(SliceSpec<Quad>{s, Quad(1), 0});
    CHECK_FALSE(bad.passed());
    CHECK_FALSE(bad.error.empty());
}

TEST_CASE("sweep grid reaches every stage") {
    const auto s = default_schedule<Quad>(1);
    const auto t = sweep_t_grid(s, 200);
    REQUIRE(t.size() == 200);
    int count[5] = {0, 0, 0, 0, 0};
    for (std::size_t i = 0; i < t.size(); ++i) {
        CHECK(t[i] > Quad(0));
        CHECK(t[i] < Quad(1));
        if (i > 0) CHECK(t[i] > t[i - 1]);
        ++count[static_cast<int>(stage_of(t[i], s))];
    }
    CHECK(count[4] == 25);
    CHECK(count[3] == 25);
    CHECK(count[2] == 50);
    CHECK(count[1] == 100);
}

TEST_CASE("small sweep passes and writes csv") {
    const auto rep = run_sweep(default_schedule<Quad>(1), 16, 32);
    CHECK(rep.slices.size() == 16);
    CHECK(rep.failed_slices() == 0);
    CHECK(rep.margin_ok);
    CHECK(rep.monotone_ok);
    CHECK(rep.continuity_ok);
    CHECK(rep.passed());
    CHECK(rep.joins.size() == 3);
    std::ostringstream os;
    write_sweep_csv(os, rep);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "g,t,stage,area,bound,genus,boundary_components,equivariance_residual,pass");
    int rows = 0;
    while (std::getline(is, line)) {
        ++rows;
        CHECK(line.substr(0, 2) == "1,");
        CHECK(line.back() == '1');
    }
    CHECK(rows == 16);
}
