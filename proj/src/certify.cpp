#include "coneflow/certify.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "coneflow/halton.hpp"

namespace coneflow {

namespace {

Vec box_point(const Vec& lo, const Vec& hi, const double* u) {
    Vec x(lo.size());
    for (std::size_t i = 0; i < lo.size(); ++i) x[i] = lo[i] + u[i] * (hi[i] - lo[i]);
    return x;
}

double sample_time(const VectorField& field, const SamplerSpec& s, double u) {
    double tmax = std::min(s.t_max, field.horizon * 0.999);
    if (!std::isfinite(tmax)) tmax = s.t_max;
    return u * tmax;
}

}  // namespace

CertReport check_convexity(const VectorField& field, const SamplerSpec& s, double tol) {
    if (s.count < 1) throw std::invalid_argument("check_convexity: count >= 1 required");
    const std::size_t d = field.dim;
    if (s.lo.size() != d || s.hi.size() != d)
        throw std::invalid_argument("check_convexity: region dimension mismatch");
    CertReport rep;
    rep.tolerance = tol;
    Halton h(2 * d + 2, s.seed);
    for (long n = 0; n < s.count; ++n) {
        std::vector<double> u = h.next();
        double t = sample_time(field, s, u[0]);
        double lambda = u[1];
        Vec x = box_point(s.lo, s.hi, &u[2]);
        Vec y = box_point(s.lo, s.hi, &u[2 + d]);
        Vec z = lerp(x, y, lambda);
        if (!field.domain.contains(x) || !field.domain.contains(y) || !field.domain.contains(z)) {
            ++rep.skipped;
            continue;
        }
        Vec fx = field.eval(t, x), fy = field.eval(t, y), fz = field.eval(t, z);
        if (!all_finite(fx) || !all_finite(fy) || !all_finite(fz)) {
            ++rep.skipped;
            continue;
        }
        ++rep.samples_tested;
        Vec rhs = lerp(fx, fy, lambda);
        if (!field.cone.leq(fz, rhs, tol)) {
            rep.verdict = Verdict::Fail;
            Witness w;
            w.t = t;
            w.lambda = lambda;
            w.points = {x, y};
            w.violation = field.cone.leq_violation(fz, rhs);
            w.note = "convexity: f(lx+(1-l)y) !<= l f(x)+(1-l) f(y)";
            rep.witness = w;
            return rep;
        }
        if (field.has_jacobian()) {
            // gradient inequality f(y) - f(x) >= f'(x)(y - x)
            Vec gx = matvec(field.jacobian(t, x), vsub(y, x));
            Vec diff = vsub(fy, fx);
            if (!field.cone.leq(gx, diff, tol)) {
                rep.verdict = Verdict::Fail;
                Witness w;
                w.t = t;
                w.points = {x, y};
                w.violation = field.cone.leq_violation(gx, diff);
                w.note = "convexity (gradient form): f'(x)(y-x) !<= f(y)-f(x)";
                rep.witness = w;
                return rep;
            }
        }
    }
    if (rep.skipped > rep.samples_tested) {
        rep.verdict = Verdict::Inconclusive;
        rep.detail = "more than 50% of samples fell outside the domain";
    } else {
        rep.verdict = Verdict::Pass;
    }
    return rep;
}

CertReport check_quasimonotone(const VectorField& field, const SamplerSpec& s, double tol) {
    if (s.count < 1) throw std::invalid_argument("check_quasimonotone: count >= 1 required");
    const std::size_t d = field.dim;
    if (s.lo.size() != d || s.hi.size() != d)
        throw std::invalid_argument("check_quasimonotone: region dimension mismatch");
    CertReport rep;
    rep.tolerance = tol;
    if (d == 1 && field.cone.kind() == ConeKind::NonnegativeOrthant) {
        // x <= y with l(x) = l(y), l != 0, forces x = y in one dimension.
        rep.verdict = Verdict::Pass;
        rep.detail = "vacuous in dimension 1";
        return rep;
    }
    const auto& gens = field.cone.dual_generators();
    Halton hseq(2 * d + 2, s.seed);
    long constructed = 0;
    for (long n = 0; n < s.count; ++n) {
        std::vector<double> u = hseq.next();
        double t = sample_time(field, s, u[0]);
        Vec x = box_point(s.lo, s.hi, &u[2]);
        // direction h in C from the tail coordinates
        Vec h(d);
        for (std::size_t i = 0; i < d; ++i) h[i] = u[2 + d + i];
        std::size_t j = std::size_t(u[1] * double(gens.size()));
        if (j >= gens.size()) j = gens.size() - 1;
        const Vec& l = gens[j];
        if (field.cone.kind() == ConeKind::NonnegativeOrthant) {
            h[j] = 0.0;  // enforce l(h) = 0 for l = e_j*
        } else {
            double ll = dot(l, l);
            double f = dot(l, h) / ll;
            for (std::size_t i = 0; i < d; ++i) h[i] -= f * l[i];
            if (!field.cone.contains(h, 0.0)) {
                ++rep.skipped;
                continue;
            }
        }
        double hn = field.cone.norm_of(h);
        if (hn < 1e-12) {
            ++rep.skipped;
            continue;
        }
        Vec y = vadd(x, h);
        if (!field.domain.contains(x) || !field.domain.contains(y)) {
            ++rep.skipped;
            continue;
        }
        Vec fx = field.eval(t, x), fy = field.eval(t, y);
        if (!all_finite(fx) || !all_finite(fy)) {
            ++rep.skipped;
            continue;
        }
        ++constructed;
        ++rep.samples_tested;
        double scale = 1.0 + std::abs(dot(l, fx)) + std::abs(dot(l, fy));
        if (dot(l, fy) < dot(l, fx) - tol * scale) {
            rep.verdict = Verdict::Fail;
            Witness w;
            w.t = t;
            w.points = {x, h};
            w.functional = l;
            w.violation = dot(l, fx) - dot(l, fy);
            w.note = "quasi-monotonicity: l(f(x+h)) < l(f(x)) with h in C, l(h)=0";
            rep.witness = w;
            return rep;
        }
        if (field.has_jacobian()) {
            Vec jh = matvec(field.jacobian(t, x), h);
            double v = dot(l, jh);
            if (v < -tol * (1.0 + field.cone.norm_of(jh))) {
                rep.verdict = Verdict::Fail;
                Witness w;
                w.t = t;
                w.points = {x, h};
                w.functional = l;
                w.violation = -v;
                w.note = "quasi-monotonicity (Jacobian form): l(f'(x)h) < 0";
                rep.witness = w;
                return rep;
            }
        }
    }
    if (constructed == 0) {
        rep.verdict = Verdict::Inconclusive;
        rep.detail = "could not construct any admissible (l, h) pair";
    } else if (rep.skipped > rep.samples_tested) {
        rep.verdict = Verdict::Inconclusive;
        rep.detail = "more than 50% of samples fell outside the domain";
    } else {
        rep.verdict = Verdict::Pass;
    }
    return rep;
}

double lipschitz_estimate(const VectorField& field, double t, const Vec& lo, const Vec& hi,
                          int grid_per_axis, int time_points) {
    const std::size_t d = field.dim;
    if (lo.size() != d || hi.size() != d)
        throw std::invalid_argument("lipschitz_estimate: box dimension mismatch");
    if (t >= field.horizon) throw std::invalid_argument("lipschitz_estimate: t beyond horizon");
    // probe a few box points for containment in U
    for (int corner = 0; corner < (1 << std::min<std::size_t>(d, 10)); ++corner) {
        Vec x(d);
        for (std::size_t i = 0; i < d; ++i) x[i] = (corner >> i) & 1 ? hi[i] : lo[i];
        if (!field.domain.contains(x))
            throw std::invalid_argument("lipschitz_estimate: K not contained in U");
    }
    std::vector<double> times;
    if (t <= 0.0 || time_points <= 1)
        times.push_back(0.0);
    else
        for (int i = 0; i < time_points; ++i) times.push_back(t * double(i) / double(time_points - 1));

    double best = 0.0;
    if (field.has_jacobian()) {
        // grid sweep of the induced operator norm of f'
        std::size_t total = 1;
        for (std::size_t i = 0; i < d; ++i) total *= std::size_t(grid_per_axis);
        for (double tau : times) {
            for (std::size_t idx = 0; idx < total; ++idx) {
                std::size_t rem = idx;
                Vec x(d);
                for (std::size_t i = 0; i < d; ++i) {
                    std::size_t k = rem % grid_per_axis;
                    rem /= grid_per_axis;
                    x[i] = grid_per_axis == 1
                               ? 0.5 * (lo[i] + hi[i])
                               : lo[i] + (hi[i] - lo[i]) * double(k) / double(grid_per_axis - 1);
                }
                best = std::max(best, operator_norm(field.jacobian(tau, x), field.cone.norm_kind()));
            }
        }
        return best;
    }
    // difference quotients over low-discrepancy pairs
    Halton h(2 * d, 7);
    const long pairs = 2000;
    for (double tau : times) {
        for (long n = 0; n < pairs; ++n) {
            std::vector<double> u = h.next();
            Vec x = box_point(lo, hi, u.data());
            Vec y = box_point(lo, hi, u.data() + d);
            double dn = field.cone.norm_of(vsub(y, x));
            if (dn < 1e-10) continue;
            Vec fx = field.eval(tau, x), fy = field.eval(tau, y);
            if (!all_finite(fx) || !all_finite(fy)) continue;
            best = std::max(best, field.cone.norm_of(vsub(fy, fx)) / dn);
        }
    }
    return best;
}

CertReport validate_jacobian(const VectorField& field, const SamplerSpec& s, double rel_tol) {
    if (!field.has_jacobian()) throw std::invalid_argument("validate_jacobian: no jacobian");
    const std::size_t d = field.dim;
    CertReport rep;
    rep.tolerance = rel_tol;
    Halton h(d + 1, s.seed);
    for (long n = 0; n < s.count; ++n) {
        std::vector<double> u = h.next();
        double t = sample_time(field, s, u[0]);
        Vec x = box_point(s.lo, s.hi, &u[1]);
        if (!field.domain.contains(x) || field.domain.margin(x) < 1e-3) {
            ++rep.skipped;
            continue;
        }
        Mat jac = field.jacobian(t, x);
        double scale = 0.0;
        for (double v : jac.a) scale = std::max(scale, std::abs(v));
        scale = std::max(scale, 1.0);
        bool bad = false;
        double worst = 0.0;
        for (std::size_t k = 0; k < d && !bad; ++k) {
            double step = 1e-6 * std::max(1.0, std::abs(x[k]));
            Vec xp = x, xm = x;
            xp[k] += step;
            xm[k] -= step;
            if (!field.domain.contains(xp) || !field.domain.contains(xm)) continue;
            Vec fp = field.eval(t, xp), fm = field.eval(t, xm);
            if (!all_finite(fp) || !all_finite(fm)) continue;
            for (std::size_t i = 0; i < d; ++i) {
                double fd = (fp[i] - fm[i]) / (2.0 * step);
                double err = std::abs(fd - jac(i, k)) / scale;
                worst = std::max(worst, err);
                if (err > rel_tol) bad = true;
            }
        }
        ++rep.samples_tested;
        if (bad) {
            rep.verdict = Verdict::Fail;
            Witness w;
            w.t = t;
            w.points = {x};
            w.violation = worst;
            w.note = "jacobian does not match central finite differences";
            rep.witness = w;
            return rep;
        }
    }
    rep.verdict = rep.samples_tested > 0 ? Verdict::Pass : Verdict::Inconclusive;
    return rep;
}

}  // namespace coneflow
