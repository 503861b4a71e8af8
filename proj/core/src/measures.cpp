#include "erspec/measures.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include "erspec/errors.hpp"
#include "erspec/exponents.hpp"

namespace erspec {

cplx m_semicircle(cplx z) {
    if (!(z.imag() > 0)) throw DomainError("m(z) needs Im z > 0");
    cplx s = std::sqrt(z * z - 4.0);
    cplx m = 0.5 * (-z + s);
    if (m.imag() <= 0) m = 0.5 * (-z - s);
    return m;
}

cplx m_alpha(double alpha, cplx z) {
    if (!(alpha >= 0)) throw DomainError("m_alpha needs alpha >= 0");
    return -1.0 / (z + alpha * m_semicircle(z));
}

double MuAlpha::density(double u) const {
    if (std::abs(u) >= 2.0 || alpha == 0) return 0.0;
    double den = (1.0 - alpha) * u * u + alpha * alpha;
    return alpha / (2.0 * std::numbers::pi) * std::sqrt(4.0 - u * u) / den;
}

namespace {

constexpr double kHalfPi = std::numbers::pi / 2;

// g_alpha(2 sin t) * 2 cos t with the square root cancelled analytically.
double density_in_angle(double alpha, double t) {
    double s = std::sin(t);
    double c = std::cos(t);
    // Both forms are sums of nonnegative terms on their branch; the second keeps
    // c^2 / den accurate near t = +-pi/2 when alpha is close to 2.
    double den = alpha < 1 ? 4.0 * (1.0 - alpha) * s * s + alpha * alpha
                           : (alpha - 2.0) * (alpha - 2.0) + 4.0 * (alpha - 1.0) * c * c;
    if (den <= 0) return 0.0;
    return alpha / (2.0 * std::numbers::pi) * 4.0 * c * c / den;
}

template <class F>
double integrate(F f, double tol, double* err) {
    using boost::math::quadrature::gauss_kronrod;
    double e = 0;
    double v = gauss_kronrod<double, 31>::integrate(f, -kHalfPi, kHalfPi, 30, tol, &e);
    if (err) *err = e;
    return v;
}

}  // namespace

double MuAlpha::continuous_mass(double tol) const {
    if (alpha == 0) return 0.0;
    double a = alpha;
    return integrate([a](double t) { return density_in_angle(a, t); }, tol, nullptr);
}

MuAlpha mu_alpha(double alpha) {
    if (!(alpha >= 0)) throw DomainError("mu_alpha needs alpha >= 0");
    MuAlpha mu;
    mu.alpha = alpha;
    if (alpha > 2) {
        mu.atom_mass = (alpha - 2.0) / (2.0 * alpha - 2.0);
        mu.atom_location = lambda_of_alpha(alpha);
    } else if (alpha == 0) {
        mu.atom_mass = 0.5;
        mu.atom_location = 0.0;
    }
    return mu;
}

QuadratureResult stieltjes_quadrature(const MuAlpha& mu, cplx z, double tol) {
    if (!(z.imag() > 0)) throw DomainError("stieltjes_quadrature needs Im z > 0");
    QuadratureResult r;
    if (mu.alpha > 0) {
        double a = mu.alpha;
        double er = 0, ei = 0;
        double re = integrate(
            [a, z](double t) { return (density_in_angle(a, t) / (2.0 * std::sin(t) - z)).real(); }, tol, &er);
        double im = integrate(
            [a, z](double t) { return (density_in_angle(a, t) / (2.0 * std::sin(t) - z)).imag(); }, tol, &ei);
        r.value = cplx(re, im);
        r.error_estimate = std::hypot(er, ei);
    }
    if (mu.atom_mass > 0) {
        double s = mu.atom_location;
        r.value += mu.atom_mass * (1.0 / (s - z) + 1.0 / (-s - z));
    }
    if (!(r.error_estimate <= 1e-6)) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "quadrature reached only %.3g", r.error_estimate);
        throw NumericError(buf);
    }
    return r;
}

void write_density_csv(std::ostream& os, const MuAlpha& mu, int points) {
    if (points < 2) throw ParameterError("density grid needs at least 2 points");
    os << "u,g_alpha\n";
    char buf[80];
    for (int i = 0; i < points; ++i) {
        double u = -2.0 + 4.0 * i / (points - 1);
        std::snprintf(buf, sizeof buf, "%.12g,%.12g\n", u, mu.density(u));
        os << buf;
    }
}

}  // namespace erspec
