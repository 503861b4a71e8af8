#pragma once

#include <functional>
#include <optional>
#include <vector>

namespace erspec {

struct DegreeProfile;

// 1 / (2 log 2 - 1): above this b every vertex has alpha_x < 2 asymptotically.
double b_star();

// Lambda(alpha) = alpha / sqrt(alpha - 1), alpha >= 2.
double lambda_of_alpha(double alpha);
// Inverse of Lambda on [2, inf).
double alpha_of_lambda(double lambda);

double theta(double b, double alpha);
double rho(double b, double lambda);
// nullopt when b >= b_star (no semilocalized phase).
std::optional<double> alpha_max(double b);
std::optional<double> lambda_max(double b);

double f_d(double d, double alpha);
// Solves f_d(beta) = log(n / l) on [1, inf).
double beta_l(double d, double n, double l);

double xi(double n, double d);
double xi_u(double n, double d, double u);
int r_star(double n, double c = 0.25);
double phi_a(double a, double n, double d);

struct PhaseParams {
    double n = 0;
    double d = 0;
    double b = 0;
    double xi = 0;
    int r_star = 0;
    double c = 0.25;
    double b_star = 0;
    double xi_u(double u) const;
};

PhaseParams phase_params(double n, double d, double c = 0.25);

// Monotone bracketed bisection; f(lo) and f(hi) must differ in sign.
double bisect(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-14);

struct CountingRow {
    double alpha = 0;
    long count = 0;
    long lower = 0;
    long upper = 0;
    bool contained = false;
};

std::vector<CountingRow> counting_check(const DegreeProfile& profile, const std::vector<double>& alpha_grid,
                                        double zeta);

}  // namespace erspec
