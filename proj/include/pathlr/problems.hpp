#ifndef PATHLR_PROBLEMS_HPP
#define PATHLR_PROBLEMS_HPP

#include <Eigen/Core>

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include "pathlr/mesh.hpp"

namespace pathlr {

/// One reaction-diffusion benchmark: dissipation rate V(x, t) bounded from
/// below, nonnegative initial density f(x), diffusivity and horizon.
struct ProblemSpec {
    std::function<double(double, double)> V;  // V(x, t)
    std::function<double(double)> f;          // f(x)
    double sigma = 0.0;
    double T = 0.0;
    std::string name;
};

inline double gaussian_density(double alpha, double x) {
    return std::sqrt(alpha / M_PI) * std::exp(-alpha * x * x);
}

/// f = sqrt(beta/pi) exp(-beta x^2), V = x^2 / (t + 1).
inline ProblemSpec harmonic_problem(double beta = 1.0, double sigma = 0.25,
                                    double T = 10.0) {
    if (!(beta > 0.0)) throw std::invalid_argument("harmonic_problem: beta must be positive");
    ProblemSpec p;
    p.V = [](double x, double t) { return x * x / (t + 1.0); };
    p.f = [beta](double x) { return gaussian_density(beta, x); };
    p.sigma = sigma;
    p.T = T;
    p.name = "harmonic";
    return p;
}

/// State of the harmonic-oscillator closed-form recurrence: Gaussian widths
/// beta_k (k = 0..n), shifted widths gamma_k (k = 1..n) and the accumulated
/// prefactors Gamma_k = prod_{j>=k} sqrt(beta_j / gamma_j).
struct OscillatorRecurrence {
    std::vector<double> beta_seq;   // beta_seq[k] = beta_k, k = 0..n
    std::vector<double> gamma_seq;  // gamma_seq[k] = gamma_k, k = 1..n (index 0 unused)
    std::vector<double> Gamma;      // Gamma[k], k = 1..n (index 0 unused)

    double beta0() const { return beta_seq.front(); }
    double prefactor() const { return Gamma[1]; }
};

inline OscillatorRecurrence oscillator_recurrence(const TimeGrid& tg, double sigma,
                                                  double beta) {
    if (!(beta > 0.0)) throw std::invalid_argument("oscillator_recurrence: beta must be positive");
    const double lambda = 1.0 / (4.0 * sigma * tg.dt);
    const size_t n = static_cast<size_t>(tg.n);
    OscillatorRecurrence rec;
    rec.beta_seq.assign(n + 1, 0.0);
    rec.gamma_seq.assign(n + 1, 0.0);
    rec.Gamma.assign(n + 1, 1.0);
    rec.beta_seq[n] = beta;
    double running = 1.0;
    for (size_t k = n; k >= 1; --k) {
        const double gamma_k =
            rec.beta_seq[k] + tg.w[k] * tg.dt / (1.0 + static_cast<double>(n - k) * tg.dt);
        rec.gamma_seq[k] = gamma_k;
        running *= std::sqrt(rec.beta_seq[k] / gamma_k);
        rec.Gamma[k] = running;
        rec.beta_seq[k - 1] = lambda * gamma_k / (lambda + gamma_k);
        if (!(rec.beta_seq[k - 1] > 0.0))
            throw std::invalid_argument("oscillator_recurrence: recurrence left (0, inf)");
    }
    return rec;
}

/// Exact discrete-in-time harmonic-oscillator solution on the given
/// abscissas, including the final exponential factor.
inline Eigen::VectorXd oscillator_exact(const Eigen::VectorXd& x, const TimeGrid& tg,
                                        double sigma, double beta) {
    const OscillatorRecurrence rec = oscillator_recurrence(tg, sigma, beta);
    Eigen::VectorXd u(x.size());
    const double w0 = tg.w.front();
    for (Index i = 0; i < x.size(); ++i) {
        const double xi = x[i];
        const double psi = rec.prefactor() * gaussian_density(rec.beta0(), xi);
        u[i] = psi * std::exp(-w0 * (xi * xi / (tg.T + 1.0)) * tg.dt);
    }
    return u;
}

/// V = -1/(t+1) + 2 sigma (3x^2 - 1)/(x^2 + 1)^2, f = (1/pi) / (x^2 + 1).
inline ProblemSpec cauchy_problem(double sigma = 0.5, double T = 1.0) {
    ProblemSpec p;
    p.V = [sigma](double x, double t) {
        const double d = x * x + 1.0;
        return -1.0 / (t + 1.0) + 2.0 * sigma * (3.0 * x * x - 1.0) / (d * d);
    };
    p.f = [](double x) { return (1.0 / M_PI) / (x * x + 1.0); };
    p.sigma = sigma;
    p.T = T;
    p.name = "cauchy";
    return p;
}

inline double cauchy_exact(double x, double t) {
    return (1.0 / M_PI) * (t + 1.0) / (x * x + 1.0);
}

/// Nonperiodic oscillating potential with an impurity well at x = -a and a
/// Gaussian initial density centered at x = a; a = 0.5, beta = 0.5.
inline ProblemSpec impurity_problem(double sigma = 0.25, double T = 20.0) {
    constexpr double a = 0.5;
    constexpr double beta = 0.5;
    ProblemSpec p;
    p.V = [](double x, double) {
        const double y = x / a + 1.0;
        const double s = std::sin(M_PI * y);
        const double y2 = y * y;
        const double y8 = y2 * y2 * y2 * y2;
        return a + s * s - 1.0 / (1.0 + y8);
    };
    p.f = [](double x) { return gaussian_density(beta, x - a); };
    p.sigma = sigma;
    p.T = T;
    p.name = "impurity";
    return p;
}

}  // namespace pathlr

#endif  // PATHLR_PROBLEMS_HPP
