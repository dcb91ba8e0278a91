#include "coneflow/cone.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace coneflow {

OrderCone OrderCone::orthant(std::size_t d, Norm norm) {
    if (d == 0) throw std::invalid_argument("OrderCone: dimension must be positive");
    OrderCone c;
    c.dim_ = d;
    c.kind_ = ConeKind::NonnegativeOrthant;
    c.norm_ = norm;
    c.gens_.resize(d, Vec(d, 0.0));
    for (std::size_t j = 0; j < d; ++j) c.gens_[j][j] = 1.0;
    return c;
}

OrderCone OrderCone::polyhedral(std::size_t d, std::vector<Vec> dual_generators, Norm norm) {
    if (d == 0) throw std::invalid_argument("OrderCone: dimension must be positive");
    OrderCone c;
    c.dim_ = d;
    c.kind_ = ConeKind::Polyhedral;
    c.norm_ = norm;
    c.gens_ = std::move(dual_generators);
    for (const Vec& g : c.gens_) {
        if (g.size() != d) throw std::invalid_argument("OrderCone: generator dimension mismatch");
        if (vector_norm(g, Norm::Max) == 0.0)
            throw std::invalid_argument("OrderCone: zero dual generator");
    }
    c.check_proper();
    return c;
}

// Properness <=> generator matrix has full column rank d (Gaussian elimination).
void OrderCone::check_proper() const {
    std::size_t m = gens_.size();
    if (m < dim_) throw std::invalid_argument("OrderCone: dual generators do not span (rank < d)");
    std::vector<Vec> rows = gens_;
    std::size_t rank = 0;
    for (std::size_t col = 0; col < dim_ && rank < m; ++col) {
        std::size_t piv = rank;
        for (std::size_t r = rank; r < m; ++r)
            if (std::abs(rows[r][col]) > std::abs(rows[piv][col])) piv = r;
        if (std::abs(rows[piv][col]) < 1e-12) continue;
        std::swap(rows[piv], rows[rank]);
        for (std::size_t r = rank + 1; r < m; ++r) {
            double f = rows[r][col] / rows[rank][col];
            for (std::size_t k = col; k < dim_; ++k) rows[r][k] -= f * rows[rank][k];
        }
        ++rank;
    }
    if (rank < dim_) throw std::invalid_argument("OrderCone: dual generators rank-deficient");
}

bool OrderCone::leq(const Vec& x, const Vec& y, double tol) const {
    if (x.size() != dim_ || y.size() != dim_)
        throw std::invalid_argument("OrderCone::leq: dimension mismatch");
    if (tol < 0.0) throw std::invalid_argument("OrderCone::leq: tol must be >= 0");
    Vec d = vsub(y, x);
    double slack = tol * (1.0 + norm_of(d));
    for (const Vec& l : gens_)
        if (dot(l, d) < -slack) return false;
    return true;
}

bool OrderCone::contains(const Vec& x, double tol) const {
    if (x.size() != dim_) throw std::invalid_argument("OrderCone::contains: dimension mismatch");
    double slack = tol * (1.0 + norm_of(x));
    for (const Vec& l : gens_)
        if (dot(l, x) < -slack) return false;
    return true;
}

double OrderCone::leq_violation(const Vec& x, const Vec& y) const {
    Vec d = vsub(y, x);
    double worst = 0.0;
    for (const Vec& l : gens_) worst = std::max(worst, -dot(l, d));
    return worst;
}

Vec OrderCone::sample_cone_point(std::uint64_t seed, int which) const {
    std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ULL + std::uint64_t(which));
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int attempt = 0; attempt < 100000; ++attempt) {
        Vec v(dim_);
        if (kind_ == ConeKind::NonnegativeOrthant) {
            for (auto& c : v) c = std::abs(gauss(rng));
        } else {
            for (auto& c : v) c = gauss(rng);
            if (!contains(v, 0.0)) continue;
        }
        double n = norm_of(v);
        if (n < 1e-12) continue;
        return vscale(1.0 / n, v);
    }
    throw std::runtime_error("OrderCone: cone point sampling failed (degenerate cone?)");
}

double OrderCone::normality_constant() const {
    if (mu_cache_ > 0.0) return mu_cache_;
    if (kind_ == ConeKind::NonnegativeOrthant) {
        mu_cache_ = 1.0;
        return mu_cache_;
    }
    // Sampled upper proxy: pairs (x, x+b) with x, b in C cover all 0<=x<=y.
    // Max of ||x||/||y|| over 1e5 pairs, times 1.1. Sampled, not certified.
    std::mt19937_64 rng(0x5eedULL);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double best = 1.0;
    long found = 0;
    long attempts = 0;
    while (found < 100000 && attempts < 10000000) {
        ++attempts;
        Vec a(dim_), b(dim_);
        for (auto& c : a) c = gauss(rng);
        for (auto& c : b) c = gauss(rng);
        if (!contains(a, 0.0) || !contains(b, 0.0)) continue;
        double scale = unif(rng) * 4.0;  // vary the relative size of the gap
        Vec y = vaxpy(a, scale, b);
        double ny = norm_of(y);
        if (ny < 1e-12) continue;
        best = std::max(best, norm_of(a) / ny);
        ++found;
    }
    if (found == 0) throw std::runtime_error("OrderCone: normality sampling found no cone points");
    mu_cache_ = best * 1.1;
    return mu_cache_;
}

std::vector<Vec> OrderCone::dual_sample(int count, std::uint64_t seed) const {
    if (count < 1) throw std::invalid_argument("OrderCone::dual_sample: count >= 1 required");
    std::vector<Vec> out;
    for (const Vec& g : gens_) {
        if ((int)out.size() >= count) break;
        out.push_back(g);
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    while ((int)out.size() < count) {
        Vec l(dim_, 0.0);
        for (const Vec& g : gens_) {
            double w = unif(rng);
            for (std::size_t k = 0; k < dim_; ++k) l[k] += w * g[k];
        }
        double n = norm_of(l);
        if (n < 1e-12) continue;
        out.push_back(vscale(1.0 / n, l));
    }
    return out;
}

DomainSpec DomainSpec::whole_space() {
    DomainSpec d;
    d.kind_ = DomainKind::WholeSpace;
    d.contains_ = [](const Vec&) { return true; };
    d.margin_ = [](const Vec&) { return kInf; };
    return d;
}

DomainSpec DomainSpec::sublevel(std::function<double(const Vec&)> g, double b, double g_lip) {
    if (g_lip <= 0.0) throw std::invalid_argument("DomainSpec::sublevel: g_lip must be > 0");
    DomainSpec d;
    d.kind_ = DomainKind::SublevelSet;
    d.contains_ = [g, b](const Vec& x) { return g(x) < b; };
    d.margin_ = [g, b, g_lip](const Vec& x) { return std::max(0.0, (b - g(x)) / g_lip); };
    return d;
}

DomainSpec DomainSpec::finiteness(std::function<bool(const Vec&)> finite, double probe_max) {
    DomainSpec d;
    d.kind_ = DomainKind::Finiteness;
    d.contains_ = finite;
    d.margin_ = [finite, probe_max](const Vec& x) {
        if (!finite(x)) return 0.0;
        auto shifted = [&](double s) {
            Vec y(x);
            for (auto& c : y) c += s;
            return y;
        };
        if (finite(shifted(probe_max))) return probe_max;
        double lo = 0.0, hi = probe_max;
        for (int it = 0; it < 60; ++it) {
            double mid = 0.5 * (lo + hi);
            if (finite(shifted(mid)))
                lo = mid;
            else
                hi = mid;
        }
        return lo;
    };
    return d;
}

DomainSpec DomainSpec::project_head(const DomainSpec& inner, std::size_t head) {
    DomainSpec d;
    d.kind_ = inner.kind_;
    auto c = inner.contains_;
    auto m = inner.margin_;
    d.contains_ = [c, head](const Vec& z) { return c(Vec(z.begin(), z.begin() + head)); };
    d.margin_ = [m, head](const Vec& z) { return m(Vec(z.begin(), z.begin() + head)); };
    return d;
}

DomainSpec DomainSpec::shrink(double kappa) const {
    if (kappa <= 0.0) throw std::invalid_argument("DomainSpec::shrink: kappa must be > 0");
    if (kind_ == DomainKind::WholeSpace) return *this;
    DomainSpec d;
    d.kind_ = DomainKind::Shrunken;
    auto m = margin_;
    d.contains_ = [m, kappa](const Vec& x) { return m(x) > kappa; };
    d.margin_ = [m, kappa](const Vec& x) { return std::max(0.0, m(x) - kappa); };
    return d;
}

}  // namespace coneflow
