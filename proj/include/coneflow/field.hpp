#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "coneflow/cone.hpp"
#include "coneflow/linalg.hpp"

namespace coneflow {

// Time-dependent map f(t, x) on [0, T) x U. Evaluation must be re-entrant.
struct VectorField {
    std::size_t dim = 0;
    std::function<Vec(double, const Vec&)> eval;
    std::function<Mat(double, const Vec&)> jacobian;  // optional (empty when absent)
    DomainSpec domain = DomainSpec::whole_space();
    double horizon = kInf;
    OrderCone cone = OrderCone::orthant(1);

    bool has_jacobian() const { return static_cast<bool>(jacobian); }
};

enum class Verdict { Pass, Fail, Inconclusive };

inline const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::Fail: return "fail";
        case Verdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

struct Witness {
    double t = 0.0;
    std::vector<Vec> points;
    Vec functional;       // dual functional involved, when applicable
    double violation = 0.0;
    double lambda = -1.0;  // convex weight, when applicable
    std::string note;
};

struct CertReport {
    Verdict verdict = Verdict::Inconclusive;
    std::optional<Witness> witness;
    long samples_tested = 0;
    long skipped = 0;
    double tolerance = 0.0;
    std::string detail;
};

// Sampling region: a box [lo, hi] intersected with the field's domain,
// times drawn from [0, t_max].
struct SamplerSpec {
    long count = 1000;
    std::uint64_t seed = 0;
    Vec lo, hi;
    double t_max = 1.0;
};

}  // namespace coneflow
