#pragma once

#include <complex>
#include <iosfwd>
#include <vector>

namespace erspec {

using cplx = std::complex<double>;

// Stieltjes transform of the semicircle law, Im z > 0.
cplx m_semicircle(cplx z);
// m_alpha(z) = -1 / (z + alpha m(z)).
cplx m_alpha(double alpha, cplx z);

struct MuAlpha {
    double alpha = 0;
    double atom_mass = 0;      // h_alpha, carried by each of the two atoms
    double atom_location = 0;  // s_alpha; atoms at +-s_alpha
    double density(double u) const;
    // Integral of the density over (-2, 2).
    double continuous_mass(double tol = 1e-13) const;
    double total_mass(double tol = 1e-13) const { return continuous_mass(tol) + 2.0 * atom_mass; }
};

MuAlpha mu_alpha(double alpha);

struct QuadratureResult {
    cplx value;
    double error_estimate = 0;
};

// Integral of mu_alpha(du) / (u - z) by adaptive Gauss-Kronrod in u = 2 sin(t).
QuadratureResult stieltjes_quadrature(const MuAlpha& mu, cplx z, double tol = 1e-12);

void write_density_csv(std::ostream& os, const MuAlpha& mu, int points);

}  // namespace erspec
