#pragma once

#include <stdexcept>
#include <string>

namespace fbms {

enum class ErrorKind {
    InvalidOrder,
    Topology,
    UnsupportedTopology,
    Domain,
    Precondition,
    NoRoots,
    DegenerateSlice,
    DegenerateMesh,
    Geometry,
    BracketViolation,
    InconsistentWithOrigin,
    Io,
    Usage,
};

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidOrder: return "invalid-order";
        case ErrorKind::Topology: return "topology";
        case ErrorKind::UnsupportedTopology: return "unsupported-topology";
        case ErrorKind::Domain: return "domain";
        case ErrorKind::Precondition: return "precondition";
        case ErrorKind::NoRoots: return "no-roots";
        case ErrorKind::DegenerateSlice: return "degenerate-slice";
        case ErrorKind::DegenerateMesh: return "degenerate-mesh";
        case ErrorKind::Geometry: return "geometry";
        case ErrorKind::BracketViolation: return "bracket-violation";
        case ErrorKind::InconsistentWithOrigin: return "inconsistent-with-origin";
        case ErrorKind::Io: return "io";
        case ErrorKind::Usage: return "usage";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline void require(bool cond, ErrorKind kind, const std::string& what) {
    if (!cond) throw Error(kind, what);
}

}  // namespace fbms
