#ifndef CURVCANON_ERRORS_HPP
#define CURVCANON_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace curvcanon {

// Every failure mode the library reports. Kept as a flat enum so callers
// (and tests) can dispatch on the kind without string matching.
enum class errc {
    not_squarefree,
    singular_curve,
    unsupported_degree,
    chart_invalid,
    not_on_curve,
    no_convergence,
    singularity_saturation,
    not_positive_definite,
    rank_deficient,
    points_not_distinct,
    gate_failed,
    agreement_failed,
    parse_error,
    validation_error,
};

inline const char* errc_name(errc k)
{
    switch (k) {
        case errc::not_squarefree: return "NotSquarefree";
        case errc::singular_curve: return "SingularCurve";
        case errc::unsupported_degree: return "UnsupportedDegree";
        case errc::chart_invalid: return "ChartInvalid";
        case errc::not_on_curve: return "NotOnCurve";
        case errc::no_convergence: return "NoConvergence";
        case errc::singularity_saturation: return "SingularitySaturation";
        case errc::not_positive_definite: return "NotPositiveDefinite";
        case errc::rank_deficient: return "RankDeficient";
        case errc::points_not_distinct: return "PointsNotDistinct";
        case errc::gate_failed: return "GateFailed";
        case errc::agreement_failed: return "AgreementFailed";
        case errc::parse_error: return "ParseError";
        case errc::validation_error: return "ValidationError";
    }
    return "UnknownError";
}

class error : public std::runtime_error {
public:
    error(errc kind, const std::string& what)
        : std::runtime_error(std::string(errc_name(kind)) + ": " + what), kind_(kind)
    {
    }

    errc kind() const noexcept { return kind_; }

private:
    errc kind_;
};

[[noreturn]] inline void fail(errc kind, const std::string& what) { throw error(kind, what); }

} // namespace curvcanon

#endif
