#include "fbms/width/width.hpp"

#include "fbms/geom/topology.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <deque>
#include <ostream>
#include <random>

namespace fbms {

std::vector<HalfBall> equivariant_half_balls(int n) {
    require(n >= 2, ErrorKind::Domain, "equivariant half-balls need n >= 2");
    std::vector<HalfBall> out{{Vec3d::UnitZ()}, {-Vec3d::UnitZ()}};
    if (n == 2) {
        // planes through xi_0 and xi_1 = e_y, and through xi_0 and xi_2 = -e_x
        for (const Vec3d& v : {Vec3d(Vec3d::UnitX()), Vec3d(Vec3d::UnitY())}) {
            out.push_back({v});
            out.push_back({-v});
        }
    }
    return out;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

SideField::SideField(const TriMesh<double>& mesh, double spacing) : bvh_(mesh), spacing_(spacing) {
    require(spacing > 0 && spacing < 0.5, ErrorKind::Precondition, "lattice spacing must lie in (0, 0.5)");
    // irrational shifts keep lattice edges off the symmetry planes of the slices
    origin_ = Vec3d(-1 + spacing * 0.41421356237, -1 + spacing * 0.73205080757, -1 + spacing * 0.23606797750);
    dim_ = static_cast<int>(std::ceil(2.0 / spacing)) + 1;
    const int total = dim_ * dim_ * dim_;
    label_.assign(total, -1);
    clear_.assign(total, -1.0);
    for (const Edge& e : edge_table(mesh.faces()))
        if (e.boundary()) boundary_sagitta_ = std::max(boundary_sagitta_, (mesh.vertex(e.a) - mesh.vertex(e.b)).squaredNorm() / 8);
    const double limit = 1 - spacing / 2;
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j)
            for (int k = 0; k < dim_; ++k) {
                const Vec3d p = anchor_position(i, j, k);
                if (p.norm() > limit) continue;
                clear_[anchor_index(i, j, k)] = bvh_.size() ? bvh_.distance(p, 2 * spacing) : 2 * spacing;
            }

    // parity across each lattice edge: 0/1, or -1 if ambiguous
    struct LatticeEdge {
        int a, b, parity;
        bool queried;
    };
    std::vector<LatticeEdge> edges;
    std::vector<std::vector<int>> adj(total);
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j)
            for (int k = 0; k < dim_; ++k) {
                const int a = anchor_index(i, j, k);
                if (clear_[a] < 0) continue;
                const int nb[3][3] = {{i + 1, j, k}, {i, j + 1, k}, {i, j, k + 1}};
                for (const auto& q : nb) {
                    if (q[0] >= dim_ || q[1] >= dim_ || q[2] >= dim_) continue;
                    const int b = anchor_index(q[0], q[1], q[2]);
                    if (clear_[b] < 0) continue;
                    LatticeEdge e{a, b, 0, false};
                    if (clear_[a] + clear_[b] <= spacing) {
                        const SegmentHits h = bvh_.segment_hits(anchor_position(i, j, k), anchor_position(q[0], q[1], q[2]));
                        e.parity = h.ambiguous ? -1 : (h.crossings & 1);
                        e.queried = true;
                    }
                    adj[a].push_back(static_cast<int>(edges.size()));
                    adj[b].push_back(static_cast<int>(edges.size()));
                    edges.push_back(e);
                }
            }

    // root label from the face normal convention
    int root = -1, root_label = 0;
    if (bvh_.size()) {
        for (int a = 0; a < total && root < 0; ++a) {
            if (clear_[a] < 0 || clear_[a] >= 2 * spacing) continue;
            const int i = a / (dim_ * dim_), j = (a / dim_) % dim_, k = a % dim_;
            const Vec3d p = anchor_position(i, j, k);
            const auto [f, dist] = bvh_.nearest(p);
            if (f < 0) continue;
            const Face& t = mesh.face(f);
            const Vec3d x0 = mesh.vertex(t[0]), x1 = mesh.vertex(t[1]), x2 = mesh.vertex(t[2]);
            const Vec3d nrm = (x1 - x0).cross(x2 - x0);
            if (!(nrm.norm() > 1e-14)) continue;
            const Vec3d probe = (x0 + x1 + x2) / 3 + 1e-9 * nrm.normalized();
            const SegmentHits h = bvh_.segment_hits(probe, p);
            if (h.ambiguous) continue;
            root = a;
            root_label = h.crossings & 1;
            (void)dist;
        }
    }
    if (root < 0)
        for (int a = 0; a < total; ++a)
            if (clear_[a] >= 0) {
                root = a;
                break;
            }
    require(root >= 0, ErrorKind::Geometry, "side field has no anchors");

    // propagate from the root, then from any unreached anchors
    std::deque<int> queue;
    auto flood = [&](int start, int value) {
        label_[start] = value;
        queue.push_back(start);
        while (!queue.empty()) {
            const int a = queue.front();
            queue.pop_front();
            for (int ei : adj[a]) {
                const LatticeEdge& e = edges[ei];
                if (e.parity < 0) continue;
                const int b = e.a == a ? e.b : e.a;
                if (label_[b] != -1) continue;
                label_[b] = label_[a] ^ e.parity;
                queue.push_back(b);
            }
        }
    };
    flood(root, root_label);
    for (int a = 0; a < total; ++a)
        if (clear_[a] >= 0 && label_[a] == -1) flood(a, 0);

    // every edge is re-checked; the count is normalized by the edges near the surface
    for (const LatticeEdge& e : edges) {
        if (e.parity < 0) continue;
        if (e.queried) ++checked_edges_;
        if ((label_[e.a] ^ label_[e.b]) != e.parity) ++bad_edges_;
    }
}

int SideField::anchor_index(int i, int j, int k) const { return (i * dim_ + j) * dim_ + k; }

Vec3d SideField::anchor_position(int i, int j, int k) const {
    return origin_ + spacing_ * Vec3d(i, j, k);
}

int SideField::label(const Vec3d& p) const {
    const Vec3d q = (p - origin_) / spacing_;
    const int ci = static_cast<int>(std::lround(q.x())), cj = static_cast<int>(std::lround(q.y())),
              ck = static_cast<int>(std::lround(q.z()));
    auto usable = [&](int i, int j, int k) {
        return i >= 0 && j >= 0 && k >= 0 && i < dim_ && j < dim_ && k < dim_ && label_[anchor_index(i, j, k)] >= 0;
    };
    if (usable(ci, cj, ck)) {
        const int a = anchor_index(ci, cj, ck);
        const Vec3d x = anchor_position(ci, cj, ck);
        if ((p - x).norm() < clear_[a]) return label_[a];
        const SegmentHits h = bvh_.segment_hits(x, p);
        if (!h.ambiguous) return label_[a] ^ (h.crossings & 1);
    }
    struct Cand {
        double d;
        int i, j, k;
    };
    Cand cands[125];
    int nc = 0;
    for (int di = -2; di <= 2; ++di)
        for (int dj = -2; dj <= 2; ++dj)
            for (int dk = -2; dk <= 2; ++dk) {
                const int i = ci + di, j = cj + dj, k = ck + dk;
                if (!usable(i, j, k)) continue;
                cands[nc++] = {(anchor_position(i, j, k) - p).squaredNorm(), i, j, k};
            }
    std::sort(cands, cands + nc, [](const Cand& a, const Cand& b) { return a.d < b.d; });
    for (int c = 0; c < nc && c < 8; ++c) {
        const int a = anchor_index(cands[c].i, cands[c].j, cands[c].k);
        const Vec3d x = anchor_position(cands[c].i, cands[c].j, cands[c].k);
        if (std::sqrt(cands[c].d) < clear_[a]) return label_[a];
        const SegmentHits h = bvh_.segment_hits(x, p);
        if (!h.ambiguous) return label_[a] ^ (h.crossings & 1);
    }
    return -1;
}

VolumeEstimate half_volume_residual(const SideField& field, long samples, std::uint64_t seed) {
    require(samples >= 1000, ErrorKind::Precondition, "half_volume_residual needs at least 1000 samples");
    const double ball = 4.0 * pi<double>() / 3.0;
    // one jittered point per cell of an m^3 grid over the cube; about samples points land in the ball
    const int m = static_cast<int>(std::lround(std::cbrt(samples / (ball / 8.0))));
    const double cell = 2.0 / m;
    std::mt19937_64 rng(splitmix64(seed));
    std::uniform_real_distribution<double> U(0.0, 1.0);
    VolumeEstimate est;
    double inside = 0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k) {
                const Vec3d x(-1 + (i + U(rng)) * cell, -1 + (j + U(rng)) * cell, -1 + (k + U(rng)) * cell);
                if (x.squaredNorm() > 1) continue;
                ++est.samples;
                const int l = field.label(x);
                if (l < 0) {
                    ++est.unlabeled;
                    inside += 0.5;
                } else {
                    inside += l;
                }
            }
    est.volume = inside * cell * cell * cell;
    est.residual = std::abs(est.volume - ball / 2);
    const double p = std::clamp(est.volume / ball, 0.0, 1.0);
    est.sigma = ball * std::sqrt(std::max(p * (1 - p), 1e-12) / std::max<long>(est.samples, 1));
    est.inconsistency = field.inconsistency();
    return est;
}

VolumeEstimate half_volume_residual(const TriMesh<double>& mesh, long samples, std::uint64_t seed, double max_inconsistency) {
    const SideField field(mesh);
    require(field.inconsistency() <= max_inconsistency, ErrorKind::Geometry,
            "surface does not separate the ball: " + std::to_string(field.inconsistency()) +
                " of lattice edges have inconsistent crossing parity");
    return half_volume_residual(field, samples, seed);
}

ComplementCheck complement_symmetry_check(const SideField& field, int g, long samples, std::uint64_t seed, double exclusion) {
    require(g >= 1, ErrorKind::Precondition, "complement check needs g >= 1");
    const auto G = dihedral_group<double>(g + 1);
    const Isometry<double>& psi = G.half_turn(1);
    std::mt19937_64 rng(splitmix64(seed ^ 0x5bd1e995ULL));
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    if (exclusion < 0) exclusion = std::max(2 * field.boundary_sagitta(), 1e-9);
    ComplementCheck out;
    const bool has_mesh = field.bvh().size() > 0;
    while (out.samples < samples) {
        const Vec3d x(U(rng), U(rng), U(rng));
        if (x.squaredNorm() > 1) continue;
        ++out.samples;
        const Vec3d y = psi(x);
        if (has_mesh && (field.bvh().distance(x, exclusion) < exclusion || field.bvh().distance(y, exclusion) < exclusion)) {
            ++out.skipped;
            continue;
        }
        const int a = field.label(x), b = field.label(y);
        if (a < 0 || b < 0) {
            ++out.skipped;
            continue;
        }
        ++out.compared;
        if (a == b) ++out.mismatches;
    }
    out.ok = out.compared > 0 && out.mismatches == 0;
    return out;
}

ComplementCheck complement_symmetry_check(const TriMesh<double>& mesh, int g, long samples, std::uint64_t seed,
                                          double exclusion) {
    return complement_symmetry_check(SideField(mesh), g, samples, seed, exclusion);
}

Quad stage_bound_deficit(const SweepoutSchedule<Quad>& s, const Quad& t) {
    using std::log;
    const Quad n(s.n());
    switch (stage_of(t, s)) {
        case Stage::Ribbons: return -slice_area_bound_excess(s.g, t, s.eps_fn(t));
        case Stage::Necks: return pi<Quad>() * s.t0 * s.t0 * (Quad(1) - Quad(4) * n / (-log(s.t0)));
        default: return n * pi<Quad>() * s.r * (s.r - Quad(4) * s.t0);
    }
}

WidthBracket width_bracket(const SweepReport& sweep) {
    require(!sweep.slices.empty(), ErrorKind::Precondition, "width bracket needs a non-empty sweep");
    const Quad three_pi = Quad(3) * pi<Quad>();
    WidthBracket b;
    b.lower = pi<double>();
    bool first = true;
    for (const auto& c : sweep.slices) {
        require(c.error.empty(), ErrorKind::Precondition, "sweep contains a slice that could not be built: " + c.error);
        if (c.area >= three_pi)
            throw Error(ErrorKind::BracketViolation, "slice at t = " + std::to_string(c.t) + " has area >= 3 pi");
        require(c.passed(), ErrorKind::Precondition, "sweep contains an uncertified slice at t = " + std::to_string(c.t));
        const Quad discrete_margin = three_pi - c.area - Quad(c.tolerance);
        const Quad analytic_margin = stage_bound_deficit(sweep.schedule, c.t_exact);
        const Quad margin = std::max(discrete_margin, analytic_margin);
        const Quad discrete_upper = c.area + Quad(c.tolerance);
        if (first || margin < b.margin) {
            b.margin = margin;
            b.upper = three_pi - margin;
        }
        if (first || discrete_upper > b.upper_discrete) b.upper_discrete = discrete_upper;
        first = false;
    }
    if (!(b.margin > Quad(0))) throw Error(ErrorKind::BracketViolation, "upper bound is not below 3 pi");
    return b;
}

bool WidthReport::volumes_ok() const {
    return !slices.empty() && slices.size() == sweep.slices.size() &&
           std::all_of(slices.begin(), slices.end(), [](const WidthSlice& s) { return s.volume_ok; });
}

bool WidthReport::complements_ok() const {
    return !slices.empty() && slices.size() == sweep.slices.size() &&
           std::all_of(slices.begin(), slices.end(), [](const WidthSlice& s) { return s.complement_ok; });
}

WidthReport audit_width(const SweepoutSchedule<Quad>& s, const WidthOptions& opt) {
    WidthReport rep;
    rep.g = s.g;
    rep.options = opt;
    std::vector<WidthSlice> measured;
    std::uint64_t index = 0;
    auto visit = [&](const SliceSpec<Quad>& spec, const TriMesh<Quad>& mesh, SliceCertificate& c) {
        WidthSlice w;
        w.t = c.t;
        w.area = c.area;
        w.tolerance = c.tolerance;
        const std::uint64_t stream = splitmix64(opt.seed + 0x9e3779b97f4a7c15ULL * (++index));
        try {
            const SideField field(mesh.cast<double>());
            require(field.inconsistency() <= opt.max_inconsistency, ErrorKind::Geometry, "slice does not separate the ball");
            const auto v = half_volume_residual(field, opt.volume_samples, stream);
            w.volume_residual = v.residual;
            w.volume_sigma = v.sigma;
            w.volume_ok = v.within(opt.sigma_k);
            w.complement_ok = complement_symmetry_check(field, s.g, opt.complement_samples, stream).ok;
        } catch (const Error&) {
            w.volume_ok = false;
            w.complement_ok = false;
        }
        (void)spec;
        measured.push_back(w);
    };
    rep.sweep = run_sweep(s, opt.grid, opt.resolution, visit);
    std::size_t m = 0;
    for (const auto& c : rep.sweep.slices) {
        if (m < measured.size() && c.error.empty() && measured[m].t == c.t) {
            rep.slices.push_back(measured[m++]);
        } else {
            WidthSlice w;
            w.t = c.t;
            w.area = c.area;
            rep.slices.push_back(w);
        }
    }
    try {
        rep.bracket = width_bracket(rep.sweep);
        rep.bracket_ok = true;
        const Quad three_pi = Quad(3) * pi<Quad>();
        for (std::size_t i = 0; i < rep.slices.size(); ++i) {
            const auto& c = rep.sweep.slices[i];
            rep.slices[i].margin = std::max(three_pi - c.area - Quad(c.tolerance), stage_bound_deficit(s, c.t_exact));
        }
    } catch (const Error& e) {
        rep.bracket_error = e.what();
    }
    return rep;
}

void write_width_json(std::ostream& os, const WidthReport& r, const std::string& extra_json) {
    nlohmann::ordered_json j;
    j["g"] = r.g;
    j["grid_size"] = r.sweep.slices.size();
    j["lower"] = r.bracket.lower;
    j["upper"] = static_cast<double>(r.bracket.upper);
    j["margin"] = static_cast<double>(r.bracket.margin);
    j["upper_discrete_plus_tolerance"] = static_cast<double>(r.bracket.upper_discrete);
    j["bracket_ok"] = r.bracket_ok;
    if (!r.bracket_error.empty()) j["bracket_error"] = r.bracket_error;
    j["seed"] = r.options.seed;
    j["volume_samples"] = r.options.volume_samples;
    j["complement_samples"] = r.options.complement_samples;
    auto& per = j["per_slice"] = nlohmann::ordered_json::array();
    for (const auto& s : r.slices)
        per.push_back({{"t", s.t},
                       {"area", static_cast<double>(s.area)},
                       {"volume_residual", s.volume_residual},
                       {"volume_sigma", s.volume_sigma},
                       {"complement_ok", s.complement_ok}});
    if (!extra_json.empty()) j["config"] = nlohmann::ordered_json::parse(extra_json);
    os << j.dump(2) << '\n';
}

}  // namespace fbms
