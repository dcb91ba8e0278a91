#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "coneflow/linalg.hpp"

namespace coneflow {

enum class ConeKind { NonnegativeOrthant, Polyhedral };

// A proper closed cone C in R^d given by its dual generators: x is in C iff
// l_j(x) >= 0 for every generator l_j. Induces the partial order x <= y iff
// y - x in C. Immutable after construction.
class OrderCone {
public:
    static OrderCone orthant(std::size_t d, Norm norm = Norm::Euclidean);
    static OrderCone polyhedral(std::size_t d, std::vector<Vec> dual_generators,
                                Norm norm = Norm::Euclidean);

    std::size_t dimension() const { return dim_; }
    ConeKind kind() const { return kind_; }
    Norm norm_kind() const { return norm_; }
    const std::vector<Vec>& dual_generators() const { return gens_; }

    double norm_of(const Vec& v) const { return vector_norm(v, norm_); }

    // x <= y with relative-absolute slack tol*(1+||y-x||).
    bool leq(const Vec& x, const Vec& y, double tol) const;

    // x in C up to the same slack convention (against ||x||).
    bool contains(const Vec& x, double tol = 0.0) const;

    // Largest violation of the dual inequalities for y - x (0 when x <= y).
    double leq_violation(const Vec& x, const Vec& y) const;

    // mu_C with 0 <= x <= y  =>  ||x|| <= mu_C ||y||. Exactly 1 for the
    // orthant; sampled upper estimate (x1.1) for polyhedral cones.
    double normality_constant() const;
    bool normality_is_sampled() const { return kind_ == ConeKind::Polyhedral; }

    // `count` functionals in C*: all dual generators first, then random
    // nonnegative combinations. Deterministic given seed.
    std::vector<Vec> dual_sample(int count, std::uint64_t seed) const;

    // Rejection-sample a point of C from a seeded stream (unit norm).
    Vec sample_cone_point(std::uint64_t seed, int which) const;

private:
    OrderCone() = default;
    void check_proper() const;

    std::size_t dim_ = 0;
    ConeKind kind_ = ConeKind::NonnegativeOrthant;
    Norm norm_ = Norm::Euclidean;
    std::vector<Vec> gens_;
    mutable double mu_cache_ = -1.0;
};

enum class DomainKind { WholeSpace, SublevelSet, Finiteness, Shrunken };

// Open convex order-regular set U with membership and a margin function
// (lower bound on the distance to the complement; +inf for the whole space).
class DomainSpec {
public:
    static DomainSpec whole_space();
    // {x : g(x) < b} with g convex, nondecreasing in the cone order and
    // Lipschitz with constant g_lip; margin = max(0, (b - g(x)) / g_lip).
    static DomainSpec sublevel(std::function<double(const Vec&)> g, double b, double g_lip = 1.0);
    // Membership by finiteness of a user evaluation; margin by bisection
    // along x + s*ones (the boundary of an order-regular set is reached in
    // increasing directions), capped at probe_max.
    static DomainSpec finiteness(std::function<bool(const Vec&)> finite, double probe_max = 16.0);
    // Domain on the first `head` coordinates of a larger (augmented) state.
    static DomainSpec project_head(const DomainSpec& inner, std::size_t head);

    bool contains(const Vec& x) const { return contains_(x); }
    double margin(const Vec& x) const { return margin_(x); }
    DomainKind kind() const { return kind_; }

    DomainSpec shrink(double kappa) const;

private:
    DomainKind kind_ = DomainKind::WholeSpace;
    std::function<bool(const Vec&)> contains_;
    std::function<double(const Vec&)> margin_;
};

}  // namespace coneflow
