#include "erspec/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "erspec/errors.hpp"
#include "erspec/graph.hpp"

namespace erspec {

double b_star() { return 1.0 / (2.0 * std::numbers::ln2 - 1.0); }

double lambda_of_alpha(double alpha) {
    if (!(alpha >= 2.0)) throw DomainError("Lambda needs alpha >= 2");
    return alpha / std::sqrt(alpha - 1.0);
}

double alpha_of_lambda(double lambda) {
    if (!(lambda >= 2.0)) throw DomainError("Lambda^{-1} needs lambda >= 2");
    double l2 = lambda * lambda;
    return 0.5 * l2 * (1.0 + std::sqrt(std::max(0.0, 1.0 - 4.0 / l2)));
}

namespace {
double entropy(double alpha) { return alpha * std::log(alpha) - alpha + 1.0; }
}  // namespace

double theta(double b, double alpha) {
    if (!(b > 0)) throw ParameterError("theta needs b > 0");
    if (!(alpha >= 2.0)) throw DomainError("theta needs alpha >= 2");
    return std::max(0.0, 1.0 - b * entropy(alpha));
}

double rho(double b, double lambda) {
    if (std::abs(lambda) < 2.0) return 1.0;
    return theta(b, alpha_of_lambda(std::abs(lambda)));
}

double bisect(const std::function<double(double)>& f, double lo, double hi, double tol) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0) return lo;
    if (fhi == 0) return hi;
    if ((flo > 0) == (fhi > 0)) throw NumericError("bisection bracket does not change sign");
    for (int it = 0; it < 400 && hi - lo > tol * std::max(1.0, std::abs(lo)); ++it) {
        double mid = 0.5 * (lo + hi);
        double fm = f(mid);
        if (fm == 0) return mid;
        if ((fm > 0) == (flo > 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

std::optional<double> alpha_max(double b) {
    if (!(b > 0)) throw ParameterError("alpha_max needs b > 0");
    if (b >= b_star()) return std::nullopt;
    auto g = [b](double a) { return 1.0 - b * entropy(a); };
    double hi = 20.0;
    while (g(hi) > 0) hi *= 2.0;
    return bisect(g, 2.0, hi, 1e-15);
}

std::optional<double> lambda_max(double b) {
    auto a = alpha_max(b);
    if (!a) return std::nullopt;
    return lambda_of_alpha(*a);
}

double f_d(double d, double alpha) {
    if (!(alpha >= 1.0)) throw DomainError("f_d needs alpha >= 1");
    return d * entropy(alpha) + 0.5 * std::log(2.0 * std::numbers::pi * alpha * d);
}

double beta_l(double d, double n, double l) {
    double target = std::log(n / l);
    if (!(l > 0) || target < f_d(d, 1.0)) throw DomainError("beta_l: l out of range");
    auto g = [&](double a) { return f_d(d, a) - target; };
    double hi = 2.0;
    while (g(hi) < 0) hi *= 2.0;
    return bisect(g, 1.0, hi, 1e-15);
}

double xi(double n, double d) { return std::sqrt(std::log(n)) * std::log(d) / d; }

double xi_u(double n, double d, double u) {
    if (!(u > 0)) throw DomainError("xi_u needs u > 0");
    return std::sqrt(std::log(n)) / (d * u);
}

int r_star(double n, double c) { return static_cast<int>(std::floor(c * std::sqrt(std::log(n)))); }

double phi_a(double a, double n, double d) { return a * std::cbrt(std::log(n) / (d * d)); }

double PhaseParams::xi_u(double u) const { return erspec::xi_u(n, d, u); }

PhaseParams phase_params(double n, double d, double c) {
    PhaseParams p;
    p.n = n;
    p.d = d;
    p.b = d / std::log(n);
    p.xi = xi(n, d);
    p.r_star = r_star(n, c);
    p.c = c;
    p.b_star = b_star();
    return p;
}

std::vector<CountingRow> counting_check(const DegreeProfile& profile, const std::vector<double>& alpha_grid,
                                        double zeta) {
    double n = static_cast<double>(profile.degree.size());
    double scale = std::pow(std::log(n), 2.0 * zeta);
    std::vector<CountingRow> rows;
    for (double a : alpha_grid) {
        CountingRow row;
        row.alpha = a;
        for (double ax : profile.alpha)
            if (ax >= a) ++row.count;
        double expected = n * std::exp(-f_d(profile.d, a));
        row.lower = std::max(0L, static_cast<long>(std::floor((expected - 1.0) / scale)));
        row.upper = static_cast<long>(std::ceil((expected + 1.0) * scale));
        row.contained = row.count >= row.lower && row.count <= row.upper;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace erspec
