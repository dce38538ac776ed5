#include "bmlab/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bmlab::specfun {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kEps = std::numeric_limits<double>::epsilon();

// Coefficients of 1/Gamma(z) = sum c_k z^k (Abramowitz & Stegun 6.1.34).
constexpr double kInvGammaC[15] = {
    0.0,
    1.0,
    0.5772156649015329,
    -0.6558780715202538,
    -0.0420026350340952,
    0.1665386113822915,
    -0.0421977345555443,
    -0.0096219715278770,
    0.0072189432466630,
    -0.0011651675918591,
    -0.0002152416741149,
    0.0001280502823882,
    -0.0000201348547807,
    -0.0000012504934821,
    0.0000011330272320,
};

// gam1 = [1/Gamma(1-mu) - 1/Gamma(1+mu)] / (2 mu)  (even in mu),
// gam2 = [1/Gamma(1-mu) + 1/Gamma(1+mu)] / 2.
// The difference cancels catastrophically for small mu, where the even
// power series in mu^2 is used instead.
void temme_gammas(double mu, double& gam1, double& gam2) {
    const double inv_gp = std::exp(-std::lgamma(1.0 + mu));
    const double inv_gm = std::exp(-std::lgamma(1.0 - mu));
    gam2 = 0.5 * (inv_gm + inv_gp);
    if (std::fabs(mu) >= 0.1) {
        gam1 = (inv_gm - inv_gp) / (2.0 * mu);
    } else {
        const double m2 = mu * mu;
        gam1 = -(kInvGammaC[2] +
                 m2 * (kInvGammaC[4] +
                       m2 * (kInvGammaC[6] +
                             m2 * (kInvGammaC[8] +
                                   m2 * (kInvGammaC[10] +
                                         m2 * (kInvGammaC[12] +
                                               m2 * kInvGammaC[14]))))));
    }
}

// Scaled pair (e^y K_mu(y), e^y K_{mu+1}(y)) for |mu| <= 1/2, y > 0.
// Temme's series below y = 2, Steed's continued fraction CF2 above.
void besselk_pair_reduced(double mu, double y, double& kmu, double& kmup1) {
    const double mu2 = mu * mu;
    if (y <= 2.0) {
        const double x2 = 0.5 * y;
        const double pimu = kPi * mu;
        const double fact =
            (std::fabs(pimu) < 1e-300) ? 1.0 : pimu / std::sin(pimu);
        const double dlog = -std::log(x2);
        const double e = mu * dlog;
        const double fact2 = (std::fabs(e) < 1e-12)
                                 ? 1.0 + e * e / 6.0
                                 : std::sinh(e) / e;
        double gam1, gam2;
        temme_gammas(mu, gam1, gam2);
        double f = fact * (gam1 * std::cosh(e) + gam2 * fact2 * dlog);
        double sum = f;
        const double ee = std::exp(e);  // (2/y)^mu
        double p = 0.5 * ee * std::exp(std::lgamma(1.0 + mu));
        double q = 0.5 / ee * std::exp(std::lgamma(1.0 - mu));
        double c = 1.0;
        const double x2sq = x2 * x2;
        double sum1 = p;
        for (int k = 1; k <= 300; ++k) {
            f = (k * f + p + q) / (k * k - mu2);
            c *= x2sq / k;
            p /= (k - mu);
            q /= (k + mu);
            const double del = c * f;
            sum += del;
            sum1 += c * (p - k * f);
            if (std::fabs(del) < std::fabs(sum) * kEps) break;
        }
        const double scale = std::exp(y);
        kmu = sum * scale;
        kmup1 = sum1 * (2.0 / y) * scale;
        return;
    }
    // CF2, already in scaled form.
    double b = 2.0 * (1.0 + y);
    double d = 1.0 / b;
    double h = d, delh = d;
    double q1 = 0.0, q2 = 1.0;
    const double a1 = 0.25 - mu2;
    double q = a1, c = a1;
    double a = -a1;
    double s = 1.0 + q * delh;
    for (int i = 2; i <= 30000; ++i) {
        a -= 2.0 * (i - 1);
        c = -a * c / i;
        const double qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        const double dels = q * delh;
        s += dels;
        if (std::fabs(dels) < std::fabs(s) * kEps) break;
    }
    h = a1 * h;
    kmu = std::sqrt(kPi / (2.0 * y)) / s;
    kmup1 = kmu * (mu + y + 0.5 - h) / y;
}

// Scaled pair at arbitrary order nu >= 0 by upward recurrence from the
// reduced order mu in [-1/2, 1/2].
void besselk_scaled_pair(double nu, double y, double& knu, double& knup1) {
    const int nl = static_cast<int>(nu + 0.5);
    const double mu = nu - nl;
    double kmu, kmup1;
    besselk_pair_reduced(mu, y, kmu, kmup1);
    for (int i = 1; i <= nl; ++i) {
        const double knext = kmu + (2.0 * (mu + i) / y) * kmup1;
        kmu = kmup1;
        kmup1 = knext;
    }
    knu = kmu;
    knup1 = kmup1;
}

double simpson_adaptive(double (*f)(double, double), double lam, double a,
                        double b, double fa, double fm, double fb, double tol,
                        int depth, int min_depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm, lam);
    const double frm = f(rm, lam);
    const double h = b - a;
    const double whole = (h / 6.0) * (fa + 4.0 * fm + fb);
    const double left = (h / 12.0) * (fa + 4.0 * flm + fm);
    const double right = (h / 12.0) * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth >= min_depth && (std::fabs(delta) <= 15.0 * tol || depth >= 48)) {
        return left + right + delta / 15.0;
    }
    return simpson_adaptive(f, lam, a, m, fa, flm, fm, 0.5 * tol, depth + 1,
                            min_depth) +
           simpson_adaptive(f, lam, m, b, fm, frm, fb, 0.5 * tol, depth + 1,
                            min_depth);
}

// Integrand of N(lambda) after u = exp(pi tan(phi)):
//   N(lambda) = (1/pi) int_{-pi/2}^{pi/2} exp(-lambda e^{pi tan phi}) dphi.
double n_integrand(double phi, double lam) {
    const double w = kPi * std::tan(phi);
    if (w > 709.0) return 0.0;
    return std::exp(-lam * std::exp(w)) / kPi;
}

}  // namespace

void SeriesControl::validate() const {
    if (!(rel_tol > 0.0 && rel_tol <= 1e-3))
        throw std::domain_error("SeriesControl: rel_tol must be in (0, 1e-3]");
    if (max_terms < 8)
        throw std::domain_error("SeriesControl: max_terms must be >= 8");
}

Order Order::from_dim(int d) {
    if (d < 2) throw std::domain_error("Order: dimension must be >= 2");
    return Order{0.5 * d - 1.0, d};
}

double bessel_k_scaled(double nu, double y) {
    if (nu < 0.0) throw std::domain_error("bessel_k: order must be >= 0");
    if (!(y > 0.0)) throw std::domain_error("bessel_k: argument must be > 0");
    double knu, knup1;
    besselk_scaled_pair(nu, y, knu, knup1);
    return knu;
}

double bessel_k(double nu, double y) {
    // e^{-y} underflow is the natural "underflow to zero" signal.
    return bessel_k_scaled(nu, y) * std::exp(-y);
}

std::vector<double> bessel_k_ratios(double nu0, double y, int nmax) {
    if (nu0 < 0.0 || !(y > 0.0) || nmax < 0)
        throw std::domain_error("bessel_k_ratios: bad arguments");
    std::vector<double> r(static_cast<size_t>(nmax) + 1);
    r[0] = 1.0;
    if (nmax == 0) return r;
    double knu, knup1;
    besselk_scaled_pair(nu0, y, knu, knup1);
    double rho = knup1 / knu;  // K_{nu0+1} / K_{nu0}
    r[1] = 1.0 / rho;
    for (int n = 2; n <= nmax; ++n) {
        rho = 2.0 * (nu0 + n - 1.0) / y + 1.0 / rho;
        r[n] = r[n - 1] / rho;
    }
    return r;
}

double log_lambda_nu(const Order& order, double y) {
    const double nu = order.nu;
    if (y < 0.0) throw std::domain_error("lambda_nu: y must be >= 0");
    if (y == 0.0) {
        if (nu <= 0.0)
            throw std::domain_error("lambda_nu: Lambda_0(0) is undefined");
        return std::log(2.0) + (nu + 1.0) * std::log(kPi) - std::lgamma(nu);
    }
    // log[(2 pi)^{nu+1} e^y / (2 y^nu \hat K_nu(y))]
    return (nu + 1.0) * std::log(2.0 * kPi) - std::log(2.0) -
           nu * std::log(y) - std::log(bessel_k_scaled(nu, y)) + y;
}

double lambda_nu(const Order& order, double y) {
    return std::exp(log_lambda_nu(order, y));
}

double log_gauss_kernel(int d, double t, double x) {
    if (d < 1) throw std::domain_error("gauss_kernel: d must be >= 1");
    if (!(t > 0.0)) throw std::domain_error("gauss_kernel: t must be > 0");
    return -0.5 * d * std::log(2.0 * kPi * t) - x * x / (2.0 * t);
}

double gauss_kernel(int d, double t, double x) {
    return std::exp(log_gauss_kernel(d, t, x));
}

double green_kernel(int d, double x) {
    if (d < 3) throw std::domain_error("green_kernel: d must be >= 3");
    if (!(x > 0.0)) throw std::domain_error("green_kernel: x must be > 0");
    const double nu = 0.5 * d - 1.0;
    return std::exp(std::lgamma(nu) - std::log(2.0) -
                    (nu + 1.0) * std::log(kPi) - 2.0 * nu * std::log(x));
}

double gegenbauer(int n, double nu, double z) {
    if (n == 0) return 1.0;
    double cm2 = 1.0;
    double cm1 = 2.0 * nu * z;
    if (n == 1) return cm1;
    double c = 0.0;
    for (int k = 2; k <= n; ++k) {
        c = (2.0 * z * (k + nu - 1.0) * cm1 - (k + 2.0 * nu - 2.0) * cm2) / k;
        cm2 = cm1;
        cm1 = c;
    }
    return c;
}

double surface_harmonic(const Order& order, int n, double theta) {
    if (n < 0) throw std::domain_error("surface_harmonic: n must be >= 0");
    if (theta < -1e-12 || theta > kPi + 1e-12)
        throw std::domain_error("surface_harmonic: theta must be in [0, pi]");
    theta = std::clamp(theta, 0.0, kPi);
    if (order.d == 2) return std::cos(n * theta);
    // Zonal kernel normalized so that H_0 == 1 and int H_n dm_1 = 0 for
    // n >= 1 (the exterior-sphere Poisson kernel normalization); for d = 3
    // this is (2n+1) P_n(cos theta).
    const double nu = order.nu;
    return ((n + nu) / nu) * gegenbauer(n, nu, std::cos(theta));
}

double g_density(const Order& order, double alpha, double theta,
                 const SeriesControl& ctrl) {
    ctrl.validate();
    if (alpha < 0.0) throw std::domain_error("g_density: alpha must be >= 0");
    if (theta < -1e-12 || theta > kPi + 1e-12)
        throw std::domain_error("g_density: theta must be in [0, pi]");
    theta = std::clamp(theta, 0.0, kPi);
    if (alpha == 0.0) return 1.0;

    const double nu = order.nu;
    // Ratio K_nu(alpha)/K_{n+nu}(alpha); reduces to K_0/K_n when d = 2.
    const std::vector<double> ratio =
        bessel_k_ratios(nu, alpha, ctrl.max_terms);

    const double z = std::cos(theta);
    double cm2 = 0.0, cm1 = 0.0;  // Gegenbauer running values
    double sum = 0.0;
    int small_streak = 0;
    for (int n = 0; n <= ctrl.max_terms; ++n) {
        double hn;
        if (order.d == 2) {
            hn = std::cos(n * theta);
        } else {
            double cn;
            if (n == 0) {
                cn = 1.0;
            } else if (n == 1) {
                cn = 2.0 * nu * z;
            } else {
                cn = (2.0 * z * (n + nu - 1.0) * cm1 -
                      (n + 2.0 * nu - 2.0) * cm2) /
                     n;
            }
            cm2 = cm1;
            cm1 = cn;
            hn = ((n + nu) / nu) * cn;
        }
        const double term = ratio[n] * hn;
        sum += term;
        if (std::fabs(term) < ctrl.rel_tol * std::fabs(sum)) {
            if (++small_streak >= 3) return sum;
        } else {
            small_streak = 0;
        }
    }
    throw TruncationError("g_density: series did not converge within max_terms",
                          sum);
}

double upper_gamma(double nu, double z) {
    if (nu < 0.0) throw std::domain_error("upper_gamma: nu must be >= 0");
    if (z < 0.0) throw std::domain_error("upper_gamma: z must be >= 0");
    if (z == 0.0) {
        if (nu == 0.0)
            throw std::domain_error("upper_gamma: Gamma(0, 0) diverges");
        return std::exp(std::lgamma(nu));
    }
    if (nu == 0.0) {
        // Exponential integral E_1(z).
        if (z <= 1.0) {
            double sum = -0.5772156649015329 - std::log(z);
            double term = 1.0;
            for (int k = 1; k <= 60; ++k) {
                term *= -z / k;
                const double del = -term / k;
                sum += del;
                if (std::fabs(del) < std::fabs(sum) * kEps) break;
            }
            return sum;
        }
        // Lentz continued fraction for E_1.
        const double tiny = 1e-300;
        double b = z + 1.0;
        double c = 1.0 / tiny;
        double d = 1.0 / b;
        double h = d;
        for (int i = 1; i <= 400; ++i) {
            const double an = -static_cast<double>(i) * i;
            b += 2.0;
            d = an * d + b;
            if (std::fabs(d) < tiny) d = tiny;
            c = b + an / c;
            if (std::fabs(c) < tiny) c = tiny;
            d = 1.0 / d;
            const double del = d * c;
            h *= del;
            if (std::fabs(del - 1.0) < kEps) break;
        }
        return h * std::exp(-z);
    }
    if (z < nu + 1.0) {
        // Series for the regularized lower gamma, complemented.
        double ap = nu;
        double del = 1.0 / nu;
        double sum = del;
        for (int k = 0; k < 500; ++k) {
            ap += 1.0;
            del *= z / ap;
            sum += del;
            if (std::fabs(del) < std::fabs(sum) * kEps) break;
        }
        const double p =
            sum * std::exp(-z + nu * std::log(z) - std::lgamma(nu));
        return std::exp(std::lgamma(nu)) * (1.0 - p);
    }
    // Lentz continued fraction for Q(nu, z).
    const double tiny = 1e-300;
    double b = z + 1.0 - nu;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -i * (i - nu);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h * std::exp(-z + nu * std::log(z));
}

double lower_gamma(double nu, double z) {
    if (!(nu > 0.0)) throw std::domain_error("lower_gamma: nu must be > 0");
    if (z < 0.0) throw std::domain_error("lower_gamma: z must be >= 0");
    if (z == 0.0) return 0.0;
    if (z < nu + 1.0) {
        double ap = nu;
        double del = 1.0 / nu;
        double sum = del;
        for (int k = 0; k < 500; ++k) {
            ap += 1.0;
            del *= z / ap;
            sum += del;
            if (std::fabs(del) < std::fabs(sum) * kEps) break;
        }
        return sum * std::exp(-z + nu * std::log(z));
    }
    return std::exp(std::lgamma(nu)) - upper_gamma(nu, z);
}

double n_of_lambda_at_depth(double lam, int min_depth) {
    if (!(lam > 0.0)) throw std::domain_error("n_of_lambda: lambda must be > 0");
    const double a = -0.5 * kPi, b = 0.5 * kPi;
    const double fa = 1.0 / kPi;  // integrand limit at phi -> -pi/2
    const double fb = 0.0;        // and at phi -> +pi/2
    const double fm = n_integrand(0.0, lam);
    return simpson_adaptive(&n_integrand, lam, a, b, fa, fm, fb, 1e-13, 0,
                            min_depth);
}

double n_of_lambda(double lam) { return n_of_lambda_at_depth(lam, 6); }

double sphere_area(int n) {
    if (n < 0) throw std::domain_error("sphere_area: n must be >= 0");
    return 2.0 * std::exp(0.5 * (n + 1) * std::log(kPi) -
                          std::lgamma(0.5 * (n + 1)));
}

double colatitude_weight(int d, double theta) {
    if (d < 2) throw std::domain_error("colatitude_weight: d must be >= 2");
    const double norm = std::exp(std::lgamma(0.5 * d) - 0.5 * std::log(kPi) -
                                 std::lgamma(0.5 * (d - 1)));
    if (d == 2) return norm;  // 1/pi, flat in theta
    return norm * std::pow(std::sin(theta), d - 2);
}

}  // namespace bmlab::specfun
