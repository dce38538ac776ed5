#pragma once

// Special-function kernels: modified Bessel K, the Bessel-ratio factor
// Lambda_nu, Gaussian/Green kernels, surface harmonics, the conditional
// hitting-site density g_alpha on the sphere, incomplete gamma integrals,
// and the sausage log-kernel N(lambda).
//
// All functions are pure, deterministic and thread-safe. No caching.

#include <stdexcept>
#include <string>
#include <vector>

namespace bmlab::specfun {

// Truncation control for the g_alpha series.
struct SeriesControl {
    double rel_tol = 1e-12;   // in (0, 1e-3]
    int max_terms = 256;      // >= 8

    void validate() const;
};

// Bessel order nu = d/2 - 1 tied to the ambient dimension d >= 2.
struct Order {
    double nu;
    int d;

    static Order from_dim(int d);
};

// Thrown when the g_alpha partial sums fail the stop rule within
// max_terms; carries the last partial sum for diagnostics.
class TruncationError : public std::runtime_error {
public:
    TruncationError(const std::string& what, double partial)
        : std::runtime_error(what), last_partial_(partial) {}
    double last_partial() const { return last_partial_; }

private:
    double last_partial_;
};

// K_nu(y), nu >= 0, y > 0.  Relative error <= ~1e-12 on y in [1e-6, 700].
// Underflows to +0.0 once e^{-y} is not representable.
double bessel_k(double nu, double y);

// e^y K_nu(y); stays representable for large y.
double bessel_k_scaled(double nu, double y);

// Ratios K_nu0(y) / K_{nu0+n}(y) for n = 0..nmax, computed by the stable
// forward ratio recurrence (no overflow for large n).
std::vector<double> bessel_k_ratios(double nu0, double y, int nmax);

// Lambda_nu(y) = (2 pi)^{nu+1} / (2 y^nu K_nu(y)); Lambda_nu(0) is the
// y->0 limit 2 pi^{nu+1} / Gamma(nu) for nu > 0 (undefined at nu = 0).
double lambda_nu(const Order& order, double y);

// log Lambda_nu(y); finite where lambda_nu would overflow (Lambda grows
// like e^y).
double log_lambda_nu(const Order& order, double y);

// Heat kernel p_t^{(d)}(x) = (2 pi t)^{-d/2} exp(-x^2 / 2t).
double gauss_kernel(int d, double t, double x);
double log_gauss_kernel(int d, double t, double x);

// Green function G^{(d)}(x) = Gamma(nu) / (2 pi^{nu+1} x^{2 nu}), d >= 3.
double green_kernel(int d, double x);

// Surface harmonic H_n(theta): cos(n theta) for d = 2, else
// (n+nu) Gamma(nu) / (sqrt(pi) Gamma(nu+1/2)) * C_n^nu(cos theta) with the
// Gegenbauer polynomial evaluated by its three-term recurrence.
double surface_harmonic(const Order& order, int n, double theta);

// Gegenbauer polynomial C_n^nu(z) (exposed for tests).
double gegenbauer(int n, double nu, double z);

// Conditional hitting-site density on the unit sphere given sigma = t,
//   g_alpha(theta) = sum_n [K_nu(alpha) / K_{n+nu}(alpha)] H_n(theta),
// with g_0 == 1.  The series is summed until the stop rule (three
// consecutive terms below rel_tol * |partial|) holds; a negative result
// is returned as-is and signals truncation trouble to the caller.
double g_density(const Order& order, double alpha, double theta,
                 const SeriesControl& ctrl = SeriesControl{});

// Upper incomplete gamma integral int_z^inf e^{-y} y^{nu-1} dy.
// nu = 0 (exponential integral E_1) requires z > 0.
double upper_gamma(double nu, double z);

// Lower incomplete gamma integral int_0^z e^{-y} y^{nu-1} dy, nu > 0.
// Computed by the stable series when z < nu + 1 (no cancellation).
double lower_gamma(double nu, double z);

// N(lambda) = int_0^inf e^{-lambda u} [(lg u)^2 + pi^2]^{-1} u^{-1} du,
// lambda > 0, by adaptive quadrature after the substitution u = e^{pi tan phi}.
// Relative error <= 1e-8.
double n_of_lambda(double lam);

// Quadrature refinement knob for n_of_lambda (tests use two depths).
double n_of_lambda_at_depth(double lam, int min_depth);

// Area of the n-dimensional unit sphere S^n in R^{n+1}.
double sphere_area(int n);

// Colatitude density of the uniform probability measure on the unit
// sphere of R^d: w_d(theta) = Gamma(d/2)/(sqrt(pi) Gamma((d-1)/2)) sin^{d-2}(theta).
double colatitude_weight(int d, double theta);

// Integrate f(theta) against the uniform sphere probability measure in
// colatitude, int_0^pi f(theta) w_d(theta) dtheta, composite Simpson.
template <typename F>
double sphere_average(int d, F&& f, int panels = 2048) {
    const double pi = 3.14159265358979323846;
    const double h = pi / panels;
    double acc = 0.0;
    for (int i = 0; i < panels; ++i) {
        const double a = i * h;
        const double m = a + 0.5 * h;
        const double b = a + h;
        const double fa = f(a) * colatitude_weight(d, a);
        const double fm = f(m) * colatitude_weight(d, m);
        const double fb = f(b) * colatitude_weight(d, b);
        acc += (h / 6.0) * (fa + 4.0 * fm + fb);
    }
    return acc;
}

}  // namespace bmlab::specfun
