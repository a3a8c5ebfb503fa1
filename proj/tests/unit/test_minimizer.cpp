#include "doctest.h"

#include "fbms/geom/equivariance.hpp"
#include "fbms/geom/primitives.hpp"
#include "fbms/geom/topology.hpp"
#include "fbms/minimizer/minimizer.hpp"
#include "fbms/sweepout/sweepout.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include <json.hpp>

using namespace fbms;

namespace {

const double kPi = pi<double>();

TriMesh<double> jittered(const TriMesh<double>& m, double amp, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-amp, amp);
    return m.transformed([&](const Vec3d& p) { return Vec3d(p + Vec3d(U(rng), U(rng), U(rng))); });
}

// free boundary catenoid: profile a cosh(z / a) meeting the sphere at z = a u with
// the position vector tangent to the profile, i.e. cosh u = u sinh u
struct CriticalCatenoid {
    double u, a;
};

CriticalCatenoid critical_catenoid() {
    double lo = 1.0, hi = 2.0;
    for (int i = 0; i < 200; ++i) {
        const double m = 0.5 * (lo + hi);
        (std::cosh(m) - m * std::sinh(m) > 0 ? lo : hi) = m;
    }
    return {lo, 1.0 / std::sqrt(std::cosh(lo) * std::cosh(lo) + lo * lo)};
}

TriMesh<double> catenoid_band(const CriticalCatenoid& c, int nth, int nz, double widen = 1.0) {
    std::vector<Vec3d> v;
    std::vector<Face> f;
    for (int i = 0; i <= nz; ++i) {
        const double s = -c.u + 2.0 * c.u * i / nz;
        for (int j = 0; j < nth; ++j) {
            const double th = 2.0 * kPi * j / nth, r = widen * c.a * std::cosh(s);
            v.emplace_back(r * std::cos(th), r * std::sin(th), c.a * s);
        }
    }
    for (int i = 0; i < nz; ++i)
        for (int j = 0; j < nth; ++j) {
            const int p = i * nth + j, q = i * nth + (j + 1) % nth;
            f.push_back({p, p + nth, q + nth});
            f.push_back({p, q + nth, q});
        }
    return TriMesh<double>(std::move(v), std::move(f));
}

TriMesh<double> slice(int g, double t, int res = 0) {
    return build_slice(SliceSpec<Quad>{default_schedule<Quad>(g), Quad(t), res}).cast<double>();
}

}  // namespace

TEST_CASE("discrete area of the disc tends to pi") {
    double prev = 1.0;
    for (int res : {16, 32, 64, 128, 256}) {
        const double err = kPi - discrete_area(disc_mesh<double>(res, res / 4));
        // inscribed polygon deficit
        CHECK(err == doctest::Approx(kPi - 0.5 * res * std::sin(2 * kPi / res)).epsilon(1e-9));
        CHECK(err < prev);
        prev = err;
    }
    CHECK(prev < 1e-3);
}

TEST_CASE("degenerate triangle is rejected") {
    auto m = disc_mesh<double>(8, 2);
    auto x = m.vertices();
    x[1] = x[0];
    const auto bad = m.with_vertices(x);
    CHECK_THROWS_AS(discrete_area(bad), Error);
    try {
        area_gradient(bad);
        FAIL("expected a degenerate-mesh error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DegenerateMesh);
    }
}

TEST_CASE("area gradient matches central differences") {
    const std::vector<TriMesh<double>> meshes = {
        jittered(disc_mesh<double>(24, 6), 0.02, 1),
        jittered(torus_mesh<double>(16, 10), 0.02, 2),
        jittered(genus_surface_mesh<double>(2, true), 0.02, 3),
        jittered(catenoid_band(critical_catenoid(), 24, 10), 0.01, 4),
        jittered(annulus_mesh<double>(24, 6, 0.3, 1.0), 0.02, 5),
    };
    const double h = 1e-5;
    std::mt19937_64 rng(5);
    for (const auto& m : meshes) {
        const auto grad = area_gradient(m);
        CHECK(discrete_area(m) == doctest::Approx(m.area()).epsilon(1e-14));
        std::uniform_int_distribution<int> pick(0, m.num_vertices() - 1);
        for (int trial = 0; trial < 20; ++trial) {
            const int v = pick(rng);
            Vec3d fd;
            for (int k = 0; k < 3; ++k) {
                auto x = m.vertices();
                x[v][k] += h;
                const double up = discrete_area(m.with_vertices(x));
                x[v][k] -= 2 * h;
                const double down = discrete_area(m.with_vertices(x));
                fd[k] = (up - down) / (2 * h);
            }
            INFO("mesh with ", m.num_vertices(), " vertices, vertex ", v);
            CHECK((grad[v] - fd).norm() <= 1e-6 * grad[v].norm());
        }
    }
}

TEST_CASE("flat interior vertices have zero gradient") {
    const auto m = disc_mesh<double>(32, 8);
    const auto grad = area_gradient(m);
    for (int v = 0; v < m.num_vertices(); ++v)
        if (!m.tags()[v].on_sphere) CHECK(grad[v].norm() < 1e-14);
}

TEST_CASE("constraint projection") {
    const auto G = dihedral_group<double>(2);
    const auto m = tag_axis_vertices(slice(1, 0.6), G);
    const auto orbits = vertex_orbits(m, G);

    SUBCASE("equivariant input is a fixed point") {
        const auto p = project_constraints(m, G, orbits);
        double worst = 0.0;
        for (int v = 0; v < m.num_vertices(); ++v) worst = std::max(worst, (p.vertex(v) - m.vertex(v)).norm());
        CHECK(worst <= 1e-15);
    }
    SUBCASE("boundary vertex pushed back to the sphere") {
        auto d = disc_mesh<double>(16, 4);
        auto x = d.vertices();
        const int v = d.num_vertices() - 3;
        x[v] *= 1.01;
        const auto p = project_constraints(d.with_vertices(x));
        CHECK(p.vertex(v).norm() == doctest::Approx(1.0).epsilon(1e-15));
        CHECK((p.vertex(v) - d.vertex(v)).norm() < 1e-15);
    }
    SUBCASE("any input comes out equivariant, on the sphere and on the axes") {
        for (std::uint64_t seed : {1u, 2u, 3u}) {
            const auto noisy = jittered(m, 1e-3, seed);
            const auto p = project_constraints(noisy, G, orbits);
            CHECK(equivariance_residual(p, G) <= 1e-12);
            const auto loops = boundary_loops(orient_consistently(p.faces()));
            for (const auto& loop : loops)
                for (int v : loop) CHECK(std::abs(p.vertex(v).norm() - 1.0) <= 1e-12);
            for (int v = 0; v < p.num_vertices(); ++v) {
                CHECK(p.vertex(v).norm() <= 1.0 + 1e-15);
                const int k = p.tags()[v].axis;
                if (k < 0) continue;
                const Vec3d& a = G.axis(k);
                CHECK((p.vertex(v) - a * a.dot(p.vertex(v))).norm() <= 1e-15);
            }
        }
    }
    SUBCASE("missing orbits") {
        CHECK_THROWS_AS(project_constraints(m, G, VertexOrbits{}), Error);
        // a non-equivariant mesh has no orbit table
        try {
            project_constraints(jittered(m, 1e-3, 9), G);
            FAIL("expected a precondition error");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::Precondition);
        }
    }
}

TEST_CASE("options and options file") {
    MinimizeOptions o;
    CHECK_NOTHROW(o.validate());
    std::istringstream in("# run\nstep = 0.5\ntol 1e-9\nmax_iter=40\ncadence = 2\nremesh 10\nsymmetry 3\nseed 77\n");
    const auto r = read_minimize_options(in);
    CHECK(r.step == 0.5);
    CHECK(r.tol == 1e-9);
    CHECK(r.max_iter == 40);
    CHECK(r.symmetrize_every == 2);
    CHECK(r.remesh_every == 10);
    CHECK(r.symmetry == 3);
    CHECK(r.seed == 77u);
    std::istringstream bad("stepp 1\n");
    CHECK_THROWS_AS(read_minimize_options(bad), Error);
    std::istringstream zero("cadence 0\n");
    CHECK_THROWS_AS(read_minimize_options(zero), Error);
    std::istringstream neg("tol -1\n");
    CHECK_THROWS_AS(read_minimize_options(neg), Error);
}

TEST_CASE("perturbed disc relaxes to the flat disc") {
    const auto seed = perturbed_disc(64, 0.05, 7);
    CHECK(seed.area() > kPi * 1.02);
    MinimizeOptions o;
    o.symmetry = 2;
    o.max_iter = 20000;
    const auto r = minimize(seed, o);
    const auto& c = r.certificate;
    CHECK(c.converged);
    CHECK(c.error.empty());
    CHECK(std::abs(c.area - kPi) <= 0.005 * kPi);
    CHECK(c.free_boundary_residual <= 1e-3);
    CHECK(c.mean_curvature_residual <= 1e-3);
    CHECK(c.genus == 0);
    CHECK(c.boundary_components == 1);
    CHECK(c.equivariance_residual <= 1e-12);
    CHECK(c.axes_ok);
    CHECK(c.axis_crossings == 1);
    CHECK(c.axis_orthogonality_residual <= 1e-9);
    CHECK(c.endpoints_on_one_loop);
    CHECK_FALSE(c.area_in_range);  // a disc is not in (pi, 3 pi)
    for (std::size_t i = 1; i < r.history.size(); ++i) {
        CHECK(r.history[i].area <= r.history[i - 1].area);
        CHECK(r.history[i].sphere_residual <= 1e-12);
        CHECK(r.history[i].equivariance_residual <= 1e-12);
    }
}

TEST_CASE("critical catenoid is stationary") {
    const auto cc = critical_catenoid();
    CHECK(std::cosh(cc.u) == doctest::Approx(cc.u * std::sinh(cc.u)).epsilon(1e-14));
    const auto m = catenoid_band(cc, 64, 32);
    const auto wide = project_constraints(catenoid_band(cc, 64, 32, 1.1));
    CHECK(free_boundary_residual(m) <= 5e-3);
    CHECK(free_boundary_residual(wide) > 0.1);
    MinimizeOptions o;
    o.symmetry = 4;
    o.max_iter = 100;
    const auto r = minimize(m, o);
    CHECK(r.certificate.error.empty());
    CHECK(std::abs(r.certificate.area - m.area()) <= 1e-5 * m.area());
    CHECK(r.certificate.free_boundary_residual <= 2e-3);
    CHECK(r.certificate.boundary_components == 2);
}

TEST_CASE("tangential smoothing keeps topology and descent") {
    MinimizeOptions o;
    o.symmetry = 2;
    o.max_iter = 300;
    o.remesh_every = 10;
    const auto r = minimize(perturbed_disc(32, 0.05, 3), o);
    CHECK(r.certificate.error.empty());
    CHECK(r.certificate.genus == 0);
    for (std::size_t i = 1; i < r.history.size(); ++i) CHECK(r.history[i].area <= r.history[i - 1].area);
}

TEST_CASE("boundary endpoints") {
    for (int g = 1; g <= 3; ++g) {
        for (double t : {0.7, 0.3}) CHECK(boundary_endpoint_check(slice(g, t), g));
    }
    CHECK(boundary_endpoint_check(perturbed_disc(32, 0.0, 1), 1));

    // two stacked annuli miss the horizontal axes
    const auto lower = annulus_mesh<double>(32, 4, 0.3, 0.9).transformed([](const Vec3d& p) { return Vec3d(p + Vec3d(0, 0, -0.3)); });
    const auto upper = annulus_mesh<double>(32, 4, 0.3, 0.9).transformed([](const Vec3d& p) { return Vec3d(p + Vec3d(0, 0, 0.3)); });
    try {
        boundary_endpoint_check(concatenate<double>({lower, upper}), 1);
        FAIL("expected a precondition error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Precondition);
    }
}

TEST_CASE("genus certificate") {
    SUBCASE("slices") {
        for (int g = 1; g <= 3; ++g) {
            const auto r = genus_certificate(slice(g, 0.6), g);
            CHECK(r.genus == g);
            CHECK(r.crossings == 3);
            CHECK(r.j == 1);
            REQUIRE(r.solution.has_value());
            CHECK(*r.solution == std::make_pair(0, 1));
            CHECK(r.pass);
        }
    }
    SUBCASE("genus 1 claimed against g = 2") {
        const auto r = genus_certificate(slice(1, 0.6), 2);
        CHECK(r.genus == 1);
        CHECK_FALSE(r.solution.has_value());
        CHECK_FALSE(r.pass);
    }
    SUBCASE("even crossing count") {
        const auto off = disc_mesh<double>(16, 3, 0.3).transformed([](const Vec3d& p) { return Vec3d(p + Vec3d(0.5, 0, 0)); });
        try {
            genus_certificate(off, 1);
            FAIL("expected inconsistent-with-origin");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::InconsistentWithOrigin);
        }
    }
    SUBCASE("disconnected or several loops") {
        CHECK_THROWS_AS(genus_certificate(catenoid_band(critical_catenoid(), 16, 6), 1), Error);
    }
}

TEST_CASE("seed selection and a short descent from the max slice") {
    const auto s = default_schedule<Quad>(2);
    const auto seed = max_area_seed(s, 24);
    const auto ts = sweep_t_grid(s, 24);
    double best = 0.0;
    for (const Quad& t : ts) best = std::max(best, static_cast<double>(build_slice(SliceSpec<Quad>{s, t, 0}).area()));
    CHECK(seed.area <= best);
    CHECK(seed.area >= best - mesh_tolerance(seed.mesh));
    for (int i = 0; i < seed.index; ++i)
        CHECK(static_cast<double>(build_slice(SliceSpec<Quad>{s, ts[i], 0}).area()) < best - mesh_tolerance(seed.mesh) * 0.999);

    MinimizeOptions o;
    o.symmetry = 3;
    o.expected_genus = 2;
    o.max_iter = 20;
    const auto r = minimize(seed.mesh, o);
    const auto& c = r.certificate;
    CHECK(c.genus == 2);
    CHECK(c.boundary_components == 1);
    CHECK(c.area_in_range);
    CHECK(c.equivariance_residual <= 1e-12);
    CHECK(c.endpoints_on_one_loop);
    CHECK(c.j == 1);
    CHECK((c.converged || c.stalled || c.iterations == 20));
    const auto gr = genus_certificate(r.mesh, 2);
    CHECK(gr.pass);
    CHECK(gr.j == 1);
}

TEST_CASE("certificate JSON and history CSV") {
    MinimizeOptions o;
    o.symmetry = 2;
    o.max_iter = 5;
    const auto r = minimize(perturbed_disc(16, 0.02, 1), o);
    std::ostringstream js;
    write_certificate_json(js, r.certificate, R"({"command":"minimize"})");
    const auto j = nlohmann::json::parse(js.str());
    for (const char* key : {"area", "mean_curvature_residual", "free_boundary_residual", "genus", "boundary_components",
                            "axis_residuals", "axis_crossings", "axis_orthogonality_residual", "equivariance_residual",
                            "j", "endpoints_on_one_loop", "converged", "stalled", "pass", "config"})
        CHECK(j.contains(key));
    CHECK(j["axis_residuals"].size() == 2);
    std::ostringstream csv;
    write_history_csv(csv, r.history);
    std::istringstream lines(csv.str());
    std::string header;
    std::getline(lines, header);
    CHECK(header == "iter,area,grad_norm,step,sphere_residual,equivariance_residual");
    int rows = 0;
    for (std::string l; std::getline(lines, l);) ++rows;
    CHECK(rows == static_cast<int>(r.history.size()));
}
