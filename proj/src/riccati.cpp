#include "coneflow/riccati.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

#include "coneflow/certify.hpp"
#include "coneflow/halton.hpp"
#include "coneflow/quad.hpp"

namespace coneflow {

namespace {

struct DensityNodes {
    std::vector<Vec> xi;
    std::vector<double> w;       // quadrature weight times density value
    std::vector<int> shell;      // -1 for |xi| <= 1, else geometric shell index
    int shells = 0;
};

// Tensor Gauss-Legendre over [0, r_max]^d with a panel split at 1 per axis.
DensityNodes build_density_nodes(const JumpMeasure::Density& den, std::size_t d, Norm norm) {
    std::vector<double> nodes1, w1;
    auto add_panel = [&](double a, double b, int n) {
        if (b <= a) return;
        QuadRule q = gauss_legendre_on(n, a, b);
        nodes1.insert(nodes1.end(), q.nodes.begin(), q.nodes.end());
        w1.insert(w1.end(), q.weights.begin(), q.weights.end());
    };
    int n = den.nodes_per_axis;
    if (den.r_max > 1.0) {
        add_panel(0.0, 1.0, n);
        add_panel(1.0, den.r_max, n);
    } else {
        add_panel(0.0, den.r_max, n);
    }
    DensityNodes out;
    std::size_t per_axis = nodes1.size();
    std::size_t total = 1;
    for (std::size_t i = 0; i < d; ++i) total *= per_axis;
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t rem = idx;
        Vec xi(d);
        double w = 1.0;
        for (std::size_t i = 0; i < d; ++i) {
            std::size_t k = rem % per_axis;
            rem /= per_axis;
            xi[i] = nodes1[k];
            w *= w1[k];
        }
        double rho = den.value(xi);
        if (rho <= 0.0) continue;
        double r = vector_norm(xi, norm);
        int shell = -1;
        if (r > 1.0) {
            shell = 0;
            double edge = 2.0;
            while (r > edge) {
                ++shell;
                edge *= 2.0;
            }
        }
        out.xi.push_back(std::move(xi));
        out.w.push_back(w * rho);
        out.shell.push_back(shell);
        out.shells = std::max(out.shells, shell + 1);
    }
    return out;
}

struct PreparedMeasure {
    std::vector<JumpMeasure::Atom> small_atoms, big_atoms;  // split at |xi| = 1
    DensityNodes density;
    bool has_density = false;
};

PreparedMeasure prepare(const JumpMeasure& m, std::size_t d, Norm norm) {
    PreparedMeasure p;
    for (const auto& a : m.atoms) {
        if (a.xi.size() != d) throw std::invalid_argument("JumpMeasure: atom dimension mismatch");
        if (a.mass <= 0.0) throw std::invalid_argument("JumpMeasure: atom mass must be > 0");
        double r = vector_norm(a.xi, norm);
        if (r == 0.0) throw std::invalid_argument("JumpMeasure: atom at the origin");
        for (double c : a.xi)
            if (c < 0.0) throw std::invalid_argument("JumpMeasure: atom outside the orthant");
        (r <= 1.0 ? p.small_atoms : p.big_atoms).push_back(a);
    }
    if (m.density) {
        p.density = build_density_nodes(*m.density, d, norm);
        p.has_density = true;
    }
    return p;
}

constexpr double kExpGuard = 690.0;  // e^x overflows shortly above this

// Compensated integrand value for one jump location.
double jump_term(const Vec& x, const Vec& xi, bool small) {
    double e = dot(x, xi);
    if (e > kExpGuard) return kInf;
    double v = std::expm1(e);
    if (small) v -= e;
    return v;
}

struct PreparedParams {
    AffineParams params;
    std::vector<PreparedMeasure> measures;
};

std::shared_ptr<PreparedParams> prepare_all(const AffineParams& params) {
    auto p = std::make_shared<PreparedParams>();
    p->params = params;
    if (params.coords.size() != params.d)
        throw std::invalid_argument("AffineParams: coords size must equal d");
    for (const auto& c : params.coords) {
        if (c.beta.size() != params.d)
            throw std::invalid_argument("AffineParams: beta dimension mismatch");
        p->measures.push_back(prepare(c.jumps, params.d, params.norm));
    }
    return p;
}

double eval_component(const PreparedParams& p, std::size_t i, const Vec& x) {
    const auto& c = p.params.coords[i];
    const auto& m = p.measures[i];
    double v = 0.5 * c.alpha * x[i] * x[i] + dot(x, c.beta) - c.c;
    for (const auto& a : m.small_atoms) v += a.mass * jump_term(x, a.xi, true);
    for (const auto& a : m.big_atoms) v += a.mass * jump_term(x, a.xi, false);
    if (!std::isfinite(v)) return kInf;
    if (m.has_density) {
        std::vector<double> shell_sum(std::max(m.density.shells, 1), 0.0);
        double acc = 0.0;
        for (std::size_t k = 0; k < m.density.xi.size(); ++k) {
            int sh = m.density.shell[k];
            double term = m.density.w[k] * jump_term(x, m.density.xi[k], sh < 0);
            if (!std::isfinite(term)) return kInf;
            acc += term;
            if (sh >= 0) shell_sum[sh] += term;
        }
        // divergence heuristic: tail shell sums growing geometrically means
        // the un-truncated integral diverges at this x
        int ns = m.density.shells;
        if (ns >= 3 && shell_sum[ns - 1] > 10.0 * std::abs(shell_sum[ns - 2]) &&
            shell_sum[ns - 2] > 10.0 * std::abs(shell_sum[ns - 3]) && shell_sum[ns - 1] > 1.0)
            return kInf;
        v += acc;
    }
    return std::isfinite(v) ? v : kInf;
}

double jac_component(const PreparedParams& p, std::size_t i, std::size_t k, const Vec& x) {
    const auto& c = p.params.coords[i];
    const auto& m = p.measures[i];
    double v = (i == k ? c.alpha * x[i] : 0.0) + c.beta[k];
    for (const auto& a : m.small_atoms) {
        double e = dot(x, a.xi);
        if (e > kExpGuard) return kInf;
        v += a.mass * a.xi[k] * std::expm1(e);
    }
    for (const auto& a : m.big_atoms) {
        double e = dot(x, a.xi);
        if (e > kExpGuard) return kInf;
        v += a.mass * a.xi[k] * std::exp(e);
    }
    if (m.has_density) {
        for (std::size_t q = 0; q < m.density.xi.size(); ++q) {
            double e = dot(x, m.density.xi[q]);
            if (e > kExpGuard) return kInf;
            bool small = m.density.shell[q] < 0;
            v += m.density.w[q] * m.density.xi[q][k] * (small ? std::expm1(e) : std::exp(e));
        }
    }
    return v;
}

}  // namespace

CertReport validate(const AffineParams& params) {
    CertReport rep;
    rep.verdict = Verdict::Pass;
    auto p = prepare_all(params);
    auto fail = [&](std::size_t i, const std::string& what, double v) {
        rep.verdict = Verdict::Fail;
        Witness w;
        w.violation = v;
        w.note = "coordinate " + std::to_string(i + 1) + ": " + what;
        rep.witness = w;
    };
    for (std::size_t i = 0; i < params.d && rep.verdict == Verdict::Pass; ++i) {
        const auto& c = params.coords[i];
        const auto& m = p->measures[i];
        if (c.alpha < 0.0) {
            fail(i, "alpha < 0", -c.alpha);
            break;
        }
        if (c.c < 0.0) {
            fail(i, "c < 0", -c.c);
            break;
        }
        // off-diagonal drift bullet: beta_k - int_{|xi|<=1} xi_k mu >= 0, k != i
        for (std::size_t k = 0; k < params.d; ++k) {
            if (k == i) continue;
            double compensator = 0.0;
            for (const auto& a : m.small_atoms) compensator += a.mass * a.xi[k];
            if (m.has_density)
                for (std::size_t q = 0; q < m.density.xi.size(); ++q)
                    if (m.density.shell[q] < 0) compensator += m.density.w[q] * m.density.xi[q][k];
            double v = c.beta[k] - compensator;
            if (v < -1e-12) {
                fail(i, "beta_" + std::to_string(k + 1) + " - small-jump compensator < 0", -v);
                break;
            }
        }
        if (rep.verdict != Verdict::Pass) break;
        // finite mass beyond |xi| > 1 (atoms exact; truncated quadrature finite by
        // construction, checked for overflow)
        double big_mass = 0.0;
        for (const auto& a : m.big_atoms) big_mass += a.mass;
        if (m.has_density)
            for (std::size_t q = 0; q < m.density.xi.size(); ++q)
                if (m.density.shell[q] >= 0) big_mass += m.density.w[q];
        if (!std::isfinite(big_mass)) {
            fail(i, "large-jump mass not finite", big_mass);
            break;
        }
        // small-jump integrability: sum_{k!=i}|xi_k| + xi_i^2 near the origin.
        // Exact for atoms; for densities a two-resolution quadrature check.
        if (m.has_density) {
            auto small_integral = [&](int nodes) {
                JumpMeasure::Density den = *params.coords[i].jumps.density;
                den.nodes_per_axis = nodes;
                den.r_max = std::min(den.r_max, 1.0);
                DensityNodes dn = build_density_nodes(den, params.d, params.norm);
                double s = 0.0;
                for (std::size_t q = 0; q < dn.xi.size(); ++q) {
                    double g = dn.xi[q][i] * dn.xi[q][i];
                    for (std::size_t k = 0; k < params.d; ++k)
                        if (k != i) g += std::abs(dn.xi[q][k]);
                    s += dn.w[q] * g;
                }
                return s;
            };
            int n = params.coords[i].jumps.density->nodes_per_axis;
            double s1 = small_integral(n), s2 = small_integral(2 * n);
            rep.detail += "small-jump integral[" + std::to_string(i + 1) +
                          "]=" + std::to_string(s2) + " ";
            if (!std::isfinite(s2) || std::abs(s2 - s1) > 0.2 * (1.0 + std::abs(s2))) {
                fail(i, "small-jump integrability check did not converge", std::abs(s2 - s1));
                break;
            }
        }
        ++rep.samples_tested;
    }
    return rep;
}

Vec eval_f(const AffineParams& params, const Vec& x) {
    auto p = prepare_all(params);
    Vec out(params.d);
    for (std::size_t i = 0; i < params.d; ++i) out[i] = eval_component(*p, i, x);
    return out;
}

Vec eval_f_split(const AffineParams& params, const Vec& x) {
    auto p = prepare_all(params);
    Vec out(params.d);
    for (std::size_t i = 0; i < params.d; ++i) {
        const auto& c = params.coords[i];
        const auto& m = p->measures[i];
        // f_dagger: drift-diffusion plus compensated small jumps
        double fd = 0.5 * c.alpha * x[i] * x[i] + dot(x, c.beta) - c.c;
        for (const auto& a : m.small_atoms) fd += a.mass * jump_term(x, a.xi, true);
        // large-jump part, uncompensated
        double big = 0.0;
        for (const auto& a : m.big_atoms) big += a.mass * jump_term(x, a.xi, false);
        if (m.has_density)
            for (std::size_t q = 0; q < m.density.xi.size(); ++q)
                big += m.density.w[q] *
                       jump_term(x, m.density.xi[q], m.density.shell[q] < 0);
        out[i] = fd + big;
        if (!std::isfinite(out[i])) out[i] = kInf;
    }
    return out;
}

namespace {

// Field construction without the admissibility gate; used by the audit in
// check_proposition, which must be able to exhibit certifier failures on
// inadmissible parameter sets.
VectorField build_field(const AffineParams& params, Norm norm) {
    auto p = prepare_all(params);
    const std::size_t d = params.d;
    VectorField f;
    f.dim = d;
    f.horizon = kInf;
    f.cone = OrderCone::orthant(d, norm);
    f.eval = [p, d](double, const Vec& x) {
        Vec out(d);
        for (std::size_t i = 0; i < d; ++i) out[i] = eval_component(*p, i, x);
        return out;
    };
    f.jacobian = [p, d](double, const Vec& x) {
        Mat j(d, d);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t k = 0; k < d; ++k) j(i, k) = jac_component(*p, i, k, x);
        return j;
    };
    f.domain = DomainSpec::finiteness([p, d](const Vec& x) {
        for (std::size_t i = 0; i < d; ++i)
            if (!std::isfinite(eval_component(*p, i, x))) return false;
        return true;
    });
    return f;
}

}  // namespace

VectorField as_vector_field(const AffineParams& params, Norm norm) {
    CertReport v = validate(params);
    if (v.verdict != Verdict::Pass)
        throw std::invalid_argument("as_vector_field: admissibility failed: " +
                                    (v.witness ? v.witness->note : std::string("unknown")));
    return build_field(params, norm);
}

double cir_closed_form(double alpha, double beta, double x, double t) {
    if (t < 0.0) throw std::invalid_argument("cir_closed_form: t must be >= 0");
    if (beta == 0.0) {
        double denom = 1.0 - 0.5 * alpha * t * x;
        if (denom <= 0.0) throw std::domain_error("cir_closed_form: blow-up time crossed");
        return x / denom;
    }
    double ebt = std::exp(beta * t);
    double denom = 1.0 + (alpha * x / (2.0 * beta)) * (1.0 - ebt);
    if (denom <= 0.0) throw std::domain_error("cir_closed_form: blow-up time crossed");
    return x * ebt / denom;
}

AffineParams cir_params(double alpha, double beta) {
    AffineParams p;
    p.d = 1;
    AffineParams::Coordinate c;
    c.alpha = alpha;
    c.beta = {beta};
    c.c = 0.0;
    p.coords.push_back(c);
    return p;
}

CertReport check_proposition(const AffineParams& params, const SamplerSpec& sampler, double tol) {
    VectorField field = build_field(params, params.norm);
    CertReport conv = check_convexity(field, sampler, tol);
    CertReport qm = check_quasimonotone(field, sampler, tol);

    // order regularity of U: x in U and y <= x imply y in U
    CertReport reg;
    reg.tolerance = tol;
    Halton h(2 * params.d + 1, sampler.seed);
    for (long n = 0; n < std::min<long>(sampler.count, 2000); ++n) {
        std::vector<double> u = h.next();
        Vec x(params.d), drop(params.d);
        for (std::size_t i = 0; i < params.d; ++i) {
            x[i] = sampler.lo[i] + u[i] * (sampler.hi[i] - sampler.lo[i]);
            drop[i] = u[params.d + i] * 2.0;  // nonnegative cone direction
        }
        if (!field.domain.contains(x)) {
            ++reg.skipped;
            continue;
        }
        Vec y = vsub(x, drop);
        ++reg.samples_tested;
        if (!field.domain.contains(y)) {
            reg.verdict = Verdict::Fail;
            Witness w;
            w.points = {x, y};
            w.note = "order regularity of U violated: x in U, y <= x, y not in U";
            reg.witness = w;
            break;
        }
    }
    if (reg.verdict != Verdict::Fail)
        reg.verdict = reg.samples_tested > 0 ? Verdict::Pass : Verdict::Inconclusive;

    CertReport rep;
    rep.tolerance = tol;
    rep.samples_tested = conv.samples_tested + qm.samples_tested + reg.samples_tested;
    rep.detail = std::string("convexity=") + verdict_name(conv.verdict) +
                 " quasimonotone=" + verdict_name(qm.verdict) +
                 " order-regularity=" + verdict_name(reg.verdict);
    for (const CertReport* r : {&conv, &qm, &reg}) {
        if (r->verdict == Verdict::Fail) {
            rep.verdict = Verdict::Fail;
            rep.witness = r->witness;
            return rep;
        }
    }
    rep.verdict = (conv.verdict == Verdict::Pass && qm.verdict == Verdict::Pass &&
                   reg.verdict == Verdict::Pass)
                      ? Verdict::Pass
                      : Verdict::Inconclusive;
    return rep;
}

}  // namespace coneflow
