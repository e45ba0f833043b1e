#pragma once

// Shared value types, error reporting and the small threading helper used by
// the assembly loops.

#include <algorithm>
#include <complex>
#include <cstddef>
#include <cstdlib>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <Eigen/Dense>

namespace nanohom {

using Complex = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using CVec3 = Eigen::Vector3cd;
using CMat3 = Eigen::Matrix3cd;

inline constexpr double pi = std::numbers::pi;
inline constexpr Complex I_unit{0.0, 1.0};

enum class ErrorCode {
    NonIntegerTiling,
    InvalidH,
    InvalidConfig,
    MotifOutOfCell,
    CoincidentPoints,
    NotPSD,
    NotSymmetric,
    QuadratureFailure,
    SingularT1,
    SingularShift,
    SeparationMismatch,
    DegenerateDenominator,
    SizeGuard,
    SingularSystem,
    GridMismatch,
    ConfigError,
    IoError,
};

constexpr std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::NonIntegerTiling: return "NonIntegerTiling";
        case ErrorCode::InvalidH: return "InvalidH";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
        case ErrorCode::MotifOutOfCell: return "MotifOutOfCell";
        case ErrorCode::CoincidentPoints: return "CoincidentPoints";
        case ErrorCode::NotPSD: return "NotPSD";
        case ErrorCode::NotSymmetric: return "NotSymmetric";
        case ErrorCode::QuadratureFailure: return "QuadratureFailure";
        case ErrorCode::SingularT1: return "SingularT1";
        case ErrorCode::SingularShift: return "SingularShift";
        case ErrorCode::SeparationMismatch: return "SeparationMismatch";
        case ErrorCode::DegenerateDenominator: return "DegenerateDenominator";
        case ErrorCode::SizeGuard: return "SizeGuard";
        case ErrorCode::SingularSystem: return "SingularSystem";
        case ErrorCode::GridMismatch: return "GridMismatch";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the codes above, so
/// callers (the CLI in particular) can map it onto an exit status.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

    /// Config and IO problems are user input errors; everything else is numerical.
    bool is_config_error() const noexcept {
        return code_ == ErrorCode::ConfigError || code_ == ErrorCode::InvalidConfig ||
               code_ == ErrorCode::InvalidH || code_ == ErrorCode::NonIntegerTiling ||
               code_ == ErrorCode::MotifOutOfCell || code_ == ErrorCode::IoError ||
               code_ == ErrorCode::NotPSD || code_ == ErrorCode::NotSymmetric;
    }

private:
    ErrorCode code_;
};

/// Worker cap: NANOHOM_THREADS if set and positive, else hardware concurrency.
inline unsigned worker_count() {
    if (const char* env = std::getenv("NANOHOM_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs body(i) for i in [0, count) on contiguous chunks. Each index is
/// processed by exactly one worker, so results written per index do not
/// depend on the thread count.
template <typename Body>
void parallel_for(std::size_t count, Body&& body) {
    const std::size_t workers = std::min<std::size_t>(worker_count(), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (count + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(count, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([begin, end, &body] {
            for (std::size_t i = begin; i < end; ++i) body(i);
        });
    }
}

/// a x b without conjugation (Eigen's complex cross() conjugates its result).
inline CVec3 cross(const Vec3& a, const CVec3& b) {
    return {a(1) * b(2) - a(2) * b(1), a(2) * b(0) - a(0) * b(2), a(0) * b(1) - a(1) * b(0)};
}

inline double spectral_norm(const Mat3& m) {
    Eigen::JacobiSVD<Mat3> svd(m);
    return svd.singularValues()(0);
}

}  // namespace nanohom
