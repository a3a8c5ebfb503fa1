#include "fbms/geom/obj_io.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace fbms {

namespace {

template <typename Scalar>
Scalar parse_scalar(const std::string& tok) {
    if constexpr (std::is_same_v<Scalar, double>) {
        return std::stod(tok);
    } else {
        return Scalar(tok);
    }
}

}  // namespace

template <typename Scalar>
void write_obj(std::ostream& os, const TriMesh<Scalar>& mesh) {
    const int digits = std::max(17, std::numeric_limits<Scalar>::max_digits10);
    os << std::setprecision(digits);
    for (const auto& v : mesh.vertices()) os << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
    for (const auto& f : mesh.faces()) os << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
}

template <typename Scalar>
void write_obj(const std::string& path, const TriMesh<Scalar>& mesh) {
    std::ofstream os(path);
    require(static_cast<bool>(os), ErrorKind::Io, "cannot open " + path + " for writing");
    write_obj(os, mesh);
    require(static_cast<bool>(os), ErrorKind::Io, "write failed for " + path);
}

template <typename Scalar>
TriMesh<Scalar> read_obj(std::istream& is) {
    std::vector<Vec3<Scalar>> verts;
    std::vector<Face> faces;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag)) continue;
        if (tag == "v") {
            std::string x, y, z;
            require(static_cast<bool>(ls >> x >> y >> z), ErrorKind::Io, "malformed vertex at line " + std::to_string(lineno));
            verts.emplace_back(parse_scalar<Scalar>(x), parse_scalar<Scalar>(y), parse_scalar<Scalar>(z));
        } else if (tag == "f") {
            std::vector<int> idx;
            std::string tok;
            while (ls >> tok) {
                const int i = std::stoi(tok.substr(0, tok.find('/')));
                idx.push_back(i > 0 ? i - 1 : static_cast<int>(verts.size()) + i);
            }
            require(idx.size() >= 3, ErrorKind::Io, "face with fewer than 3 vertices at line " + std::to_string(lineno));
            for (std::size_t k = 1; k + 1 < idx.size(); ++k) faces.push_back({idx[0], idx[k], idx[k + 1]});
        }
    }
    return TriMesh<Scalar>(std::move(verts), std::move(faces));
}

template <typename Scalar>
TriMesh<Scalar> read_obj(const std::string& path) {
    std::ifstream is(path);
    require(static_cast<bool>(is), ErrorKind::Io, "cannot open " + path);
    return read_obj<Scalar>(is);
}

template void write_obj<double>(std::ostream&, const TriMesh<double>&);
template void write_obj<double>(const std::string&, const TriMesh<double>&);
template TriMesh<double> read_obj<double>(std::istream&);
template TriMesh<double> read_obj<double>(const std::string&);
template void write_obj<Quad>(std::ostream&, const TriMesh<Quad>&);
template void write_obj<Quad>(const std::string&, const TriMesh<Quad>&);
template TriMesh<Quad> read_obj<Quad>(std::istream&);
template TriMesh<Quad> read_obj<Quad>(const std::string&);

}  // namespace fbms
