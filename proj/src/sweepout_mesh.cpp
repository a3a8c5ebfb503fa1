#include "fbms/sweepout/sweepout.hpp"

#include "fbms/geom/primitives.hpp"
#include "fbms/geom/topology.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace fbms {

const char* to_string(Stage s) {
    switch (s) {
        case Stage::Ribbons: return "ribbons";
        case Stage::Necks: return "necks";
        case Stage::Widening: return "widening";
        case Stage::Retraction: return "retraction";
    }
    return "unknown";
}

namespace {

// One sector of the unit disc between the rays at angles -alpha and +alpha,
// centred on the anchor c = (1, 0). Points are c + d (-cos psi, -sin psi).
// Columns j = 0..M sweep from the boundary arc next to ray +alpha, through
// the origin (j = M/2), to the arc next to ray -alpha. Rows run from a hole
// of radius b around c (mu = 0) to the polyline e_A -> 0 -> e_B (mu = 1).
template <typename S>
struct SectorFrame {
    int n = 0;
    int M = 0;
    S alpha, d_edge, log_d_edge;
    std::vector<S> log_d_out, tau_out;

    SectorFrame(int n_, int M_) : n(n_), M(M_) {
        using std::acos;
        using std::atan2;
        using std::cos;
        using std::log;
        using std::sin;
        using std::sqrt;
        alpha = pi<S>() / S(2 * n);
        d_edge = S(2) * sin(alpha / S(2));
        log_d_edge = log(d_edge);
        const S psi_edge = acos(d_edge / S(2));
        log_d_out.assign(M + 1, S(0));
        tau_out.assign(M + 1, S(0.5));
        const S ca = cos(alpha), sa = sin(alpha);
        for (int j = 0; j < M / 2; ++j) {
            const S lam = S(2 * j) / S(M);
            const S dx = (S(1) - lam) * ca - S(1);
            const S dy = (S(1) - lam) * sa;
            const S psi = atan2(-dy, -dx);
            log_d_out[j] = log(sqrt(dx * dx + dy * dy));
            tau_out[j] = (psi + psi_edge) / (S(2) * psi_edge);
            log_d_out[M - j] = log_d_out[j];
            tau_out[M - j] = S(1) - tau_out[j];
        }
    }

    // Point on row mu, column j, for a hole of radius exp(log_b).
    Vec2<S> point(const S& mu, int j, const S& log_b) const {
        using std::acos;
        using std::cos;
        using std::exp;
        using std::sin;
        if (j > M / 2) {
            const Vec2<S> p = point(mu, M - j, log_b);
            return Vec2<S>(p.x(), -p.y());
        }
        const S one_minus = S(1) - mu;
        const S d = exp(one_minus * log_b + mu * log_d_out[j]);
        const S dl = exp(one_minus * log_b + mu * log_d_edge);
        const S psi_l = -acos(dl / S(2));
        const S tau = one_minus * S(j) / S(M) + mu * tau_out[j];
        if (2 * j == M) return Vec2<S>(S(1) - d, S(0));
        const S psi = psi_l * (S(1) - S(2) * tau);
        return Vec2<S>(S(1) - d * cos(psi), -d * sin(psi));
    }

    // Circle of radius rho about c, cut off by the unit circle, at the M + 1
    // column angles.
    std::vector<Vec2<S>> hole_arc(const S& rho) const {
        using std::acos;
        using std::cos;
        using std::sin;
        std::vector<Vec2<S>> out(M + 1);
        const S psi_l = -acos(rho / S(2));
        for (int j = 0; j <= M / 2; ++j) {
            if (2 * j == M) {
                out[j] = Vec2<S>(S(1) - rho, S(0));
                continue;
            }
            const S psi = psi_l * (S(1) - S(2 * j) / S(M));
            const S x = S(1) - rho * cos(psi), y = -rho * sin(psi);
            out[j] = Vec2<S>(x, y);
            out[M - j] = Vec2<S>(x, -y);
        }
        return out;
    }

    // Row mu-values with geometric spacing near a small hole (at most 16
    // geometric rows) followed by at least M/4 rows uniform in distance.
    std::vector<S> standard_mus(const S& b) const {
        using std::ceil;
        using std::log;
        using std::pow;
        const S step = pi<S>() * d_edge / S(M);
        S ratio(2);
        if (log(step / b) / log(S(2)) > S(16)) ratio = pow(step / b, S(1) / S(16));
        std::vector<S> ds{b};
        while (ds.back() * (ratio - S(1)) < step && ds.back() * ratio < d_edge) ds.push_back(ds.back() * ratio);
        const S last = ds.back();
        const S rem = d_edge - last;
        const int k = std::max(static_cast<int>(ceil(rem / step)), M / 4);
        for (int i = 1; i <= k; ++i) ds.push_back(last + rem * S(i) / S(k));
        const S span = log(d_edge / b);
        std::vector<S> mus;
        for (const S& d : ds) mus.push_back(log(d / b) / span);
        mus.front() = S(0);
        mus.back() = S(1);
        return mus;
    }

    static std::vector<S> uniform_mus(int rows, const S& start = S(0)) {
        std::vector<S> mus(rows + 1);
        for (int i = 0; i <= rows; ++i) mus[i] = start + (S(1) - start) * S(i) / S(rows);
        mus.back() = S(1);
        return mus;
    }
};

// Reference-sector grid: rows[0] is the hole boundary, rows.back() the outer
// polyline (replaced by shared ray vertices during assembly).
template <typename S>
struct SectorGrid {
    std::vector<std::vector<Vec2<S>>> rows;
    bool cap = false;
};

// Rows between the hole and the outer polyline follow log-polar paths about
// the anchor, which keeps tiny holes well graded. With `straight`, interior
// columns are straight segments instead: in narrow sectors, or when the hole
// nearly touches the bounding rays, the log-polar paths bulge across the rays
// and the grid folds. Boundary columns stay on the unit circle either way.
template <typename S>
SectorGrid<S> make_grid(const SectorFrame<S>& fr, const S& b, const std::vector<S>& mus, bool cap,
                        bool straight = false) {
    using std::log;
    SectorGrid<S> g;
    g.cap = cap;
    const S log_b = log(b);
    const auto arc = fr.hole_arc(b);
    g.rows.resize(mus.size());
    for (std::size_t i = 0; i < mus.size(); ++i) {
        if (i == 0 && mus[0] == S(0)) {
            g.rows[0] = arc;
            continue;
        }
        g.rows[i].resize(fr.M + 1);
        if (i + 1 == mus.size()) continue;
        for (int j = 0; j <= fr.M / 2; ++j) {
            if (straight && j > 0) {
                const Vec2<S> out = fr.point(S(1), j, log_b);
                g.rows[i][j] = arc[j] * (S(1) - mus[i]) + out * mus[i];
            } else {
                g.rows[i][j] = fr.point(mus[i], j, log_b);
            }
            g.rows[i][fr.M - j] = Vec2<S>(g.rows[i][j].x(), -g.rows[i][j].y());
        }
    }
    return g;
}

template <typename S>
class Assembler {
public:
    explicit Assembler(const SectorFrame<S>& fr) : fr_(fr), n_(fr.n), M_(fr.M) {
        using std::cos;
        using std::sin;
        for (int k = 0; k < 2 * n_; ++k) {
            const S th = (S(k) + S(0.5)) * pi<S>() / S(n_);
            sector_cs_.emplace_back(cos(th), sin(th));
            const S ray = S(k) * pi<S>() / S(n_);
            ray_cs_.emplace_back(cos(ray), sin(ray));
        }
    }

    Vec2<S> rotate(int k, const Vec2<S>& p) const {
        const Vec2<S>& cs = sector_cs_[k];
        return Vec2<S>(cs.x() * p.x() - cs.y() * p.y(), cs.y() * p.x() + cs.x() * p.y());
    }

    // Sheet at height z; sector k uses `plus` for even k (anchor p^+) and
    // `minus` for odd k. Returns the hole-row vertex indices per sector
    // (empty for capped sectors).
    std::vector<std::vector<int>> sheet(const S& z, const SectorGrid<S>& plus, const SectorGrid<S>& minus, FacePart part,
                                        bool on_axes) {
        using std::sqrt;
        const S scale = sqrt(S(1) - z * z);
        auto lift = [&](const Vec2<S>& p) { return Vec3<S>(scale * p.x(), scale * p.y(), z); };
        const int dom = static_cast<int>(part);
        std::map<std::pair<int, int>, int> shared;
        const int origin = add(Vec3<S>(S(0), S(0), z), {false, 0, dom});
        auto ray_vertex = [&](int ray, int dist) {
            if (dist == 0) return origin;
            ray %= 2 * n_;
            auto it = shared.find({ray, dist});
            if (it != shared.end()) return it->second;
            const S len = S(2 * dist) / S(M_);
            const int axis = on_axes ? (ray % n_ == 0 ? n_ : ray % n_) : -1;
            const int id = add(lift(Vec2<S>(len * ray_cs_[ray].x(), len * ray_cs_[ray].y())), {2 * dist == M_, axis, dom});
            shared[{ray, dist}] = id;
            return id;
        };
        std::vector<std::vector<int>> holes(2 * n_);
        for (int k = 0; k < 2 * n_; ++k) {
            const SectorGrid<S>& g = (k % 2 == 0) ? plus : minus;
            const int R = static_cast<int>(g.rows.size()) - 1;
            std::vector<std::vector<int>> idx(R + 1, std::vector<int>(M_ + 1));
            for (int i = 0; i <= R; ++i)
                for (int j = 0; j <= M_; ++j) {
                    if (i == R) {
                        idx[i][j] = 2 * j < M_ ? ray_vertex(k + 1, M_ / 2 - j) : ray_vertex(k, j - M_ / 2);
                    } else {
                        idx[i][j] = add(lift(rotate(k, g.rows[i][j])), {j == 0 || j == M_, -1, dom});
                    }
                }
            grid_faces(idx, part);
            if (g.cap) {
                const int apex = add(lift(rotate(k, Vec2<S>(S(1), S(0)))), {true, -1, dom});
                for (int j = 0; j < M_; ++j) push_face({apex, idx[0][j + 1], idx[0][j]}, part);
            } else {
                holes[k] = idx[0];
            }
        }
        return holes;
    }

    // Wall in sector k joining the hole rows `lower` and `upper`; the
    // interior rows sit at heights zs with boundary curves curve(|z|).
    template <typename Curve>
    void wall(int k, const std::vector<int>& lower, const std::vector<int>& upper, const std::vector<S>& zs, Curve&& curve) {
        using std::abs;
        using std::sqrt;
        const int dom = static_cast<int>(FacePart::Wall);
        std::vector<std::vector<int>> idx;
        idx.push_back(lower);
        for (const S& z : zs) {
            const S scale = sqrt(S(1) - z * z);
            const std::vector<Vec2<S>> pts = curve(abs(z));
            std::vector<int> row(M_ + 1);
            for (int j = 0; j <= M_; ++j) {
                const Vec2<S> p = rotate(k, pts[j]);
                row[j] = add(Vec3<S>(scale * p.x(), scale * p.y(), z), {j == 0 || j == M_, -1, dom});
            }
            idx.push_back(std::move(row));
        }
        idx.push_back(upper);
        grid_faces(idx, FacePart::Wall);
    }

    // Orients all faces consistently with the reference face (part `up`)
    // having normal +z.
    TriMesh<S> finish(FacePart up) {
        std::vector<Face> faces = orient_consistently(faces_);
        for (std::size_t f = 0; f < faces.size(); ++f) {
            if (parts_[f] != up) continue;
            const Face& t = faces[f];
            const Vec3<S> nrm = (verts_[t[1]] - verts_[t[0]]).cross(verts_[t[2]] - verts_[t[0]]);
            if (nrm.z() == S(0)) continue;
            if (nrm.z() < S(0))
                for (auto& face : faces) std::swap(face[1], face[2]);
            break;
        }
        return TriMesh<S>(std::move(verts_), std::move(faces), std::move(tags_), std::move(parts_));
    }

private:
    int add(const Vec3<S>& p, VertexTag tag) {
        verts_.push_back(p);
        tags_.push_back(tag);
        return static_cast<int>(verts_.size()) - 1;
    }

    void push_face(const Face& f, FacePart part) {
        faces_.push_back(f);
        parts_.push_back(part);
    }

    // Quads split along mirrored diagonals so the left and right halves of
    // a sector are reflections of each other.
    void grid_faces(const std::vector<std::vector<int>>& idx, FacePart part) {
        for (std::size_t i = 0; i + 1 < idx.size(); ++i)
            for (int j = 0; j < M_; ++j) {
                const int a = idx[i][j], b = idx[i + 1][j], c = idx[i + 1][j + 1], d = idx[i][j + 1];
                if (2 * j < M_) {
                    push_face({a, b, c}, part);
                    push_face({a, c, d}, part);
                } else {
                    push_face({a, b, d}, part);
                    push_face({b, c, d}, part);
                }
            }
    }

    const SectorFrame<S>& fr_;
    int n_, M_;
    std::vector<Vec2<S>> sector_cs_, ray_cs_;
    std::vector<Vec3<S>> verts_;
    std::vector<VertexTag> tags_;
    std::vector<Face> faces_;
    std::vector<FacePart> parts_;
};

template <typename S>
int checked_sector_columns(int g, int resolution) {
    const int n = g + 1;
    require(resolution % (4 * n) == 0 && resolution >= 16 * n, ErrorKind::Precondition,
            "resolution must be a multiple of 4(g+1) and at least 16(g+1), got " + std::to_string(resolution));
    return resolution / (2 * n);
}

// Heights of the interior rows of a neck wall with radius profile
// rho(z) = rho0 cosh(s z): uniform in z/t0 + log_4(rho/rho0) + (rho - rho0)/step.
template <typename S>
std::vector<S> neck_rows(const S& s, const S& t0, const S& rho0, const S& step) {
    using std::ceil;
    using std::cosh;
    using std::log;
    auto f = [&](const S& z) {
        const S c = cosh(s * z);
        return z / t0 + log(c) / log(S(4)) + rho0 * (c - S(1)) / step;
    };
    const S total = f(t0);
    const int K = std::max(2, static_cast<int>(ceil(total)));
    std::vector<S> zs;
    for (int i = 1; i < K; ++i) {
        const S target = total * S(i) / S(K);
        S lo(0), hi = t0;
        for (int it = 0; it < 130; ++it) {
            const S mid = (lo + hi) / S(2);
            (f(mid) < target ? lo : hi) = mid;
        }
        zs.push_back((lo + hi) / S(2));
    }
    return zs;
}

template <typename S>
std::vector<S> scaled_rows(const S& height, int K) {
    std::vector<S> zs;
    for (int i = 1; i < K; ++i) zs.push_back(height * S(i) / S(K));
    return zs;
}

template <typename S>
std::vector<S> negated(std::vector<S> v) {
    for (auto& x : v) x = -x;
    return v;
}

template <typename S>
bool in_stage(const S& t, Stage st, const S& t0) {
    switch (st) {
        case Stage::Ribbons: return t >= t0 && t < S(1);
        case Stage::Necks: return t >= t0 / S(2) && t <= t0;
        case Stage::Widening: return t >= t0 / S(4) && t <= t0 / S(2);
        case Stage::Retraction: return t > S(0) && t <= t0 / S(4);
    }
    return false;
}

}  // namespace

template <typename Scalar>
Stage stage_of(const Scalar& t, const SweepoutSchedule<Scalar>& s) {
    require(t > Scalar(0) && t < Scalar(1), ErrorKind::DegenerateSlice, "slice parameter must lie in (0, 1)");
    if (t >= s.t0) return Stage::Ribbons;
    if (t >= s.t0 / Scalar(2)) return Stage::Necks;
    if (t >= s.t0 / Scalar(4)) return Stage::Widening;
    return Stage::Retraction;
}

template <typename Scalar>
std::vector<Vec3<Scalar>> anchor_points(int g) {
    using std::cos;
    using std::sin;
    require(g >= 1, ErrorKind::Precondition, "anchor_points needs g >= 1");
    const int n = g + 1;
    std::vector<Vec3<Scalar>> out;
    for (int k = 0; k < n; ++k)
        for (int sgn : {1, -1}) {
            const Scalar a = (Scalar(2 * k) + Scalar(sgn) / Scalar(2)) * pi<Scalar>() / Scalar(n);
            out.emplace_back(cos(a), sin(a), Scalar(0));
        }
    return out;
}

template <typename Scalar>
TriMesh<Scalar> punctured_disc_mesh(int g, const Scalar& eps, int sign, int resolution) {
    using std::sin;
    require(g >= 1, ErrorKind::Precondition, "punctured_disc_mesh needs g >= 1");
    require(sign == 1 || sign == -1, ErrorKind::Precondition, "sign must be +1 or -1");
    const int n = g + 1;
    require(eps > Scalar(0) && eps < sin(pi<Scalar>() / Scalar(2 * n)), ErrorKind::Precondition,
            "puncture radius must lie in (0, sin(pi/(2g+2)))");
    const int M = checked_sector_columns<Scalar>(g, resolution > 0 ? resolution : 64 * n);
    SectorFrame<Scalar> fr(n, M);
    const auto hole = make_grid(fr, eps, fr.standard_mus(eps), false);
    const Scalar b_cap = fr.d_edge / Scalar(8);
    const auto cap = make_grid(fr, b_cap, fr.standard_mus(b_cap), true);
    Assembler<Scalar> as(fr);
    if (sign > 0)
        as.sheet(Scalar(0), hole, cap, FacePart::Middle, true);
    else
        as.sheet(Scalar(0), cap, hole, FacePart::Middle, true);
    return as.finish(FacePart::Middle);
}

template <typename Scalar>
TriMesh<Scalar> build_slice_in_stage(const SliceSpec<Scalar>& spec, Stage stage) {
    using std::ceil;
    using std::cosh;
    using std::sqrt;
    using S = Scalar;
    const auto& sch = spec.schedule;
    sch.validate();
    const int n = sch.n();
    const int M = checked_sector_columns<S>(sch.g, spec.effective_resolution());
    const S t = spec.t;
    require(t > S(0) && t < S(1), ErrorKind::DegenerateSlice, "slice parameter must lie in (0, 1)");
    require(in_stage(t, stage, sch.t0), ErrorKind::Precondition,
            std::string("t outside the parameter interval of stage ") + to_string(stage));

    SectorFrame<S> fr(n, M);
    const S b_cap = fr.d_edge / S(8);
    const auto cap = make_grid(fr, b_cap, fr.standard_mus(b_cap), true);
    // Stages 3-4 and the upper sheets of stage 2 use a row count fixed by r so
    // vertex positions vary continuously with the hole radius.
    const int fixed_rows = static_cast<int>(fr.standard_mus(sch.r).size()) - 1;
    const S r = sch.r;
    const S t0 = sch.t0;
    const S r_wide = sch.r_bar() - (sch.r_bar() - r) / S(4);

    Assembler<S> as(fr);
    auto add_walls = [&](const auto& top, const auto& mid, const auto& bot, const std::vector<S>& zs, auto&& curve) {
        const auto down = negated(zs);
        for (int k = 0; k < 2 * n; ++k) {
            if (k % 2 == 0)
                as.wall(k, mid[k], top[k], zs, curve);
            else
                as.wall(k, mid[k], bot[k], down, curve);
        }
    };

    switch (stage) {
        case Stage::Ribbons: {
            const S eps = sch.eps_fn(t);
            const auto hole = make_grid(fr, eps, fr.standard_mus(eps), false);
            const auto top = as.sheet(t, hole, cap, FacePart::Top, false);
            const auto mid = as.sheet(S(0), hole, hole, FacePart::Middle, true);
            const auto bot = as.sheet(-t, cap, hole, FacePart::Bottom, false);
            const int K = std::max(2, static_cast<int>(ceil(t * S(M) / S(4))));
            const auto arc = fr.hole_arc(eps);
            add_walls(top, mid, bot, scaled_rows(t, K), [&](const S&) { return arc; });
            break;
        }
        case Stage::Necks: {
            const S eps0 = sch.eps_fn(t0);
            const S s0 = safe_acosh(r / eps0) / t0;
            const S s = s0 * (t - t0 / S(2)) / (t0 / S(2));
            const S rho0 = r / cosh(s * t0);
            const auto outer = make_grid(fr, r, SectorFrame<S>::uniform_mus(fixed_rows), false, true);
            const auto inner = rho0 < r ? make_grid(fr, rho0, fr.standard_mus(rho0), false) : outer;
            const auto top = as.sheet(t0, outer, cap, FacePart::Top, false);
            const auto mid = as.sheet(S(0), inner, inner, FacePart::Middle, true);
            const auto bot = as.sheet(-t0, cap, outer, FacePart::Bottom, false);
            add_walls(top, mid, bot, neck_rows(s, t0, rho0, pi<S>() * fr.d_edge / S(M)), [&](const S& z) { return fr.hole_arc(rho0 * cosh(s * z)); });
            break;
        }
        case Stage::Widening: {
            const S R = r + (r_wide - r) * (t0 / S(2) - t) / (t0 / S(4));
            const auto hole = make_grid(fr, R, SectorFrame<S>::uniform_mus(fixed_rows), false, true);
            const auto top = as.sheet(t0, hole, cap, FacePart::Top, false);
            const auto mid = as.sheet(S(0), hole, hole, FacePart::Middle, true);
            const auto bot = as.sheet(-t0, cap, hole, FacePart::Bottom, false);
            const auto arc = hole.rows[0];
            add_walls(top, mid, bot, scaled_rows(t0, 2), [&](const S&) { return arc; });
            break;
        }
        case Stage::Retraction: {
            const S lam = S(4) * t / t0;
            const S mu_h = S(1) - lam;
            const auto hole = make_grid(fr, r_wide, SectorFrame<S>::uniform_mus(fixed_rows, mu_h), false, true);
            const S z = lam * t0;
            const auto top = as.sheet(z, hole, cap, FacePart::Top, false);
            const auto mid = as.sheet(S(0), hole, hole, FacePart::Middle, true);
            const auto bot = as.sheet(-z, cap, hole, FacePart::Bottom, false);
            const auto arc = hole.rows[0];
            add_walls(top, mid, bot, scaled_rows(z, 2), [&](const S&) { return arc; });
            break;
        }
    }
    return as.finish(FacePart::Middle);
}

template <typename Scalar>
TriMesh<Scalar> build_slice(const SliceSpec<Scalar>& spec) {
    return build_slice_in_stage(spec, stage_of(spec.t, spec.schedule));
}

EndpointSlice endpoint_slice(int which, int g, int resolution) {
    require(which == 0 || which == 1, ErrorKind::Precondition, "endpoint index must be 0 or 1");
    require(g >= 1, ErrorKind::Precondition, "endpoint_slice needs g >= 1");
    const int n = g + 1;
    const int res = resolution > 0 ? resolution : 64 * n;
    EndpointSlice out;
    out.mesh = disc_mesh<double>(res, std::max(4, res / 8));
    if (which == 1) {
        const auto anchors = anchor_points<double>(g);
        for (std::size_t i = 0; i < anchors.size(); ++i) {
            const double zsign = i % 2 == 0 ? 1.0 : -1.0;
            std::vector<Vec3d> arc;
            for (int k = 0; k <= 32; ++k) {
                const double phi = 0.5 * pi<double>() * k / 32.0;
                arc.emplace_back(std::cos(phi) * anchors[i].x(), std::cos(phi) * anchors[i].y(), zsign * std::sin(phi));
            }
            out.arcs.push_back(std::move(arc));
        }
    }
    return out;
}

#define FBMS_INSTANTIATE(S)                                                                 \
    template Stage stage_of<S>(const S&, const SweepoutSchedule<S>&);                       \
    template std::vector<Vec3<S>> anchor_points<S>(int);                                    \
    template TriMesh<S> punctured_disc_mesh<S>(int, const S&, int, int);                    \
    template TriMesh<S> build_slice_in_stage<S>(const SliceSpec<S>&, Stage);                \
    template TriMesh<S> build_slice<S>(const SliceSpec<S>&);

FBMS_INSTANTIATE(double)
FBMS_INSTANTIATE(Quad)
#undef FBMS_INSTANTIATE

}  // namespace fbms
