#pragma once

#include <stdexcept>
#include <string>

namespace netmoment {

enum class ErrorKind {
    InvalidSize,
    Parameter,
    Degeneracy,
    NotConnected,
    InvalidMatrix,
    SizeCap,
    DimensionMismatch,
    CostCap,
    Io,
    Config,
};

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidSize: return "invalid-size";
        case ErrorKind::Parameter: return "parameter";
        case ErrorKind::Degeneracy: return "degeneracy";
        case ErrorKind::NotConnected: return "not-connected";
        case ErrorKind::InvalidMatrix: return "invalid-matrix";
        case ErrorKind::SizeCap: return "size-cap";
        case ErrorKind::DimensionMismatch: return "dimension-mismatch";
        case ErrorKind::CostCap: return "cost-cap";
        case ErrorKind::Io: return "io";
        case ErrorKind::Config: return "config";
    }
    return "unknown";
}

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace netmoment
