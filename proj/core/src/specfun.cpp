#include "ipsc/specfun.hpp"

#include <cmath>
#include <limits>

#include "ipsc/errors.hpp"

namespace ipsc::specfun {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSqrt2Pi = 2.50662827463100050241576528481;
constexpr double kLogSqrt2Pi = 0.918938533204672741780329736406;
constexpr double kInvSqrt2 = 0.707106781186547524400844362105;

// Largest noncentrality handled by the exact Poisson-window series; beyond it
// the survival function uses a three-moment gamma fit.
constexpr double kSeriesMaxLambda = 1000.0;
// Standardized distance from the mean at which q_ncx2 switches to the
// analytic tail asymptote.
constexpr double kDeepTailSd = 10.0;
// Incomplete gamma: above this shape parameter use the uniform asymptotic.
constexpr double kTemmeMinS = 1000.0;
// Bessel I: ascending series below, large-argument asymptotic above.
constexpr double kBesselAsymT = 3000.0;

double logaddexp(double a, double b) {
    if (a == -kInf) return b;
    if (b == -kInf) return a;
    double m = std::max(a, b);
    return m + std::log1p(std::exp(std::min(a, b) - m));
}

/// log(1 - e^t) for t < 0.
double log1mexp(double t) {
    if (t >= 0.0) return -kInf;  // callers guarantee t < 0; t == 0 -> log 0
    if (t > -0.6931471805599453) return std::log(-std::expm1(t));
    return std::log1p(-std::exp(t));
}

// --- incomplete gamma -------------------------------------------------------

double log_gamma_p_series(double s, double x) {
    double ap = s;
    double sum = 1.0 / s;
    double del = sum;
    for (int i = 0; i < 100000; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-17) break;
    }
    return s * std::log(x) - x - std::lgamma(s) + std::log(sum);
}

double log_gamma_q_cf(double s, double x) {
    double b = x + 1.0 - s;
    double c = 1e308;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 100000; ++i) {
        double an = -i * (i - s);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < 1e-300) d = 1e-300;
        c = b + an / c;
        if (std::abs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return s * std::log(x) - x - std::lgamma(s) + std::log(h);
}

// Uniform asymptotic (Temme) for large shape; relative error O(1/s).
// Returns {log Q, log P}.
struct LogPq {
    double log_q;
    double log_p;
};

LogPq log_gamma_temme(double s, double x) {
    double delta = x / s - 1.0;
    double eta2_half = delta - std::log1p(delta);  // = eta^2 / 2
    double eta = std::sqrt(2.0 * eta2_half);
    if (delta < 0) eta = -eta;
    double t = eta * std::sqrt(s);
    double c0;
    if (std::abs(delta) < 1e-3) {
        c0 = -1.0 / 3.0 + delta / 12.0;
    } else {
        c0 = 1.0 / delta - 1.0 / eta;
    }
    double log_r_abs = -s * eta2_half - 0.5 * std::log(2.0 * M_PI * s) +
                       std::log(std::abs(c0));
    double sign_r = c0 >= 0 ? 1.0 : -1.0;

    double log_main_q = log_norm_sf(t);
    double log_main_p = log_norm_sf(-t);
    double log_q = log_main_q;
    double log_p = log_main_p;
    // Q = main_q + R, P = main_p - R.
    if (sign_r > 0) {
        log_q = logaddexp(log_main_q, log_r_abs);
        log_p = log_main_p + log1mexp(log_r_abs - log_main_p);
    } else {
        log_q = log_main_q + log1mexp(log_r_abs - log_main_q);
        log_p = logaddexp(log_main_p, log_r_abs);
    }
    return {log_q, log_p};
}

}  // namespace

double log_gamma_q(double s, double x) {
    if (x <= 0.0) return 0.0;
    if (x == kInf) return -kInf;
    if (s >= kTemmeMinS) return log_gamma_temme(s, x).log_q;
    if (x < s + 1.0) {
        double lp = log_gamma_p_series(s, x);
        return log1mexp(lp);
    }
    return log_gamma_q_cf(s, x);
}

double log_gamma_p(double s, double x) {
    if (x <= 0.0) return -kInf;
    if (x == kInf) return 0.0;
    if (s >= kTemmeMinS) return log_gamma_temme(s, x).log_p;
    if (x < s + 1.0) return log_gamma_p_series(s, x);
    return log1mexp(log_gamma_q_cf(s, x));
}

// --- Gaussian ---------------------------------------------------------------

double norm_pdf(double x, double sigma) {
    double z = x / sigma;
    return std::exp(-0.5 * z * z) / (sigma * kSqrt2Pi);
}

double norm_cdf(double x, double sigma) {
    return 0.5 * std::erfc(-x / (sigma * M_SQRT2));
}

double erfcx_pos(double x) {
    if (x < 25.0) {
        // erfc is representable down to ~26.6, so the product is safe here.
        return std::exp(x * x + std::log(std::erfc(x)));
    }
    // Laplace continued fraction, excellent for large x.
    double f = 0.0;
    for (int k = 16; k >= 1; --k) {
        f = (0.5 * k) / (x + f);
    }
    return 1.0 / ((x + f) * 1.77245385090551602729816748334);  // sqrt(pi)
}

double log_norm_sf(double z) {
    if (z <= 0.0) return std::log(0.5 * std::erfc(z * kInvSqrt2));
    return -0.5 * z * z + std::log(0.5 * erfcx_pos(z * kInvSqrt2));
}

namespace {

// q_gauss for the "at or above the top edge" configuration z_hi >= 0, where
// z_lo = (n - n_lo)/sigma > z_hi = (n - n_hi)/sigma.
double q_gauss_above(double z_lo, double z_hi, double sigma) {
    double e;  // exp(-(z_lo^2 - z_hi^2)/2) <= 1
    double ex_lo;
    if (z_lo == kInf) {
        e = 0.0;
        ex_lo = 0.0;
    } else {
        e = std::exp(-0.5 * (z_lo - z_hi) * (z_lo + z_hi));
        ex_lo = erfcx_pos(z_lo * kInvSqrt2) * e;
    }
    double den = erfcx_pos(z_hi * kInvSqrt2) - ex_lo;
    return (2.0 / (kSqrt2Pi * sigma)) * (e - 1.0) / den;
}

}  // namespace

double q_gauss(double n, double n_lo, double n_hi, double sigma) {
    if (!(n_lo < n_hi)) throw InvalidInput("q_gauss: bin bounds must satisfy n_lo < n_hi");
    if (!(sigma > 0.0)) throw InvalidInput("q_gauss: sigma must be positive");

    double z_lo = n_lo == -kInf ? kInf : (n - n_lo) / sigma;
    double z_hi = n_hi == kInf ? -kInf : (n - n_hi) / sigma;

    if (z_hi >= 0.0) return q_gauss_above(z_lo, z_hi, sigma);
    if (z_lo <= 0.0) return -q_gauss_above(-z_hi, -z_lo, sigma);

    // Straddle: the mean is inside the bin, no cancellation in the CDFs.
    double p = 0.5 * (std::erf(z_lo * kInvSqrt2) - std::erf(z_hi * kInvSqrt2));
    double num = (z_lo == kInf ? 0.0 : std::exp(-0.5 * z_lo * z_lo) / kSqrt2Pi) -
                 (z_hi == -kInf ? 0.0 : std::exp(-0.5 * z_hi * z_hi) / kSqrt2Pi);
    return num / (sigma * p);
}

// --- Bessel I (log, for the pdf) ---------------------------------------------

namespace {

// log(e^-t I_a(t)) for a >= 0, t >= 0. The scaled form keeps the huge-t
// exponential out of the result so callers can cancel it analytically.
double log_bessel_i_scaled(double a, double t) {
    if (t == 0.0) return a == 0.0 ? 0.0 : -kInf;
    if (t < kBesselAsymT) {
        // Ascending series sum_m (t/2)^(2m+a) / (m! Gamma(m+a+1)), accumulated
        // in linear domain relative to the peak term at m* where the term
        // ratio (t/2)^2 / ((m+1)(m+a+1)) crosses 1.
        const double h2 = 0.25 * t * t;  // (t/2)^2
        const double ap1 = a + 1.0;
        auto m_peak = static_cast<long>(
            std::max(0.0, std::floor(0.5 * (std::sqrt(ap1 * ap1 + 4.0 * h2) - ap1 - 1.0))));
        const double lpeak = (2.0 * m_peak + a) * std::log(0.5 * t) -
                             std::lgamma(m_peak + 1.0) - std::lgamma(m_peak + a + 1.0);
        double sum = 1.0;
        double term = 1.0;
        for (long m = m_peak; m-- > 0;) {  // downward: ratio (m+1)(m+a+1)/(t/2)^2
            term *= (m + 1.0) * (m + ap1) / h2;
            sum += term;
            if (term < 1e-18 * sum) break;
        }
        term = 1.0;
        for (long m = m_peak; m < m_peak + 200000; ++m) {  // upward
            term *= h2 / ((m + 1.0) * (m + ap1));
            sum += term;
            if (term < 1e-18 * sum) break;
        }
        return lpeak + std::log(sum) - t;
    }
    // Large-argument asymptotic with the (mu - (2k-1)^2)/(8t) correction terms.
    double mu = 4.0 * a * a;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k <= 30; ++k) {
        double num = mu - (2.0 * k - 1.0) * (2.0 * k - 1.0);
        term *= -num / (8.0 * t * k);
        if (std::abs(term) < 1e-18) break;
        sum += term;
    }
    return -0.5 * std::log(2.0 * M_PI * t) + std::log(sum);
}

double central_chi2_log_pdf(double xi, double dof) {
    if (xi < 0.0) return -kInf;
    if (xi == 0.0) {
        if (dof == 2.0) return std::log(0.5);
        return dof < 2.0 ? kInf : -kInf;
    }
    return (0.5 * dof - 1.0) * std::log(xi) - 0.5 * xi - 0.5 * dof * M_LN2 -
           std::lgamma(0.5 * dof);
}

}  // namespace

double ncx2_log_pdf(double xi, int dof, double lambda) {
    if (dof < 1) throw InvalidInput("ncx2: dof must be >= 1");
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw InvalidInput("ncx2: lambda must be finite and >= 0");
    }
    if (xi < 0.0 || xi == kInf) return -kInf;
    if (lambda == 0.0) return central_chi2_log_pdf(xi, dof);
    if (xi == 0.0) {
        if (dof == 2) return std::log(0.5) - 0.5 * lambda;
        return dof < 2 ? kInf : -kInf;
    }
    if (lambda < 1e-8) {
        // One Poisson correction term is already below double precision noise.
        return central_chi2_log_pdf(xi, dof) - 0.5 * lambda +
               std::log1p(0.5 * lambda * xi / dof);
    }
    double a = 0.5 * dof - 1.0;
    // (xi + lambda)/2 - sqrt(lambda xi) = (sqrt(xi) - sqrt(lambda))^2 / 2,
    // computed in the subtracted form to avoid cancellation at huge lambda.
    double root_gap = std::sqrt(xi) - std::sqrt(lambda);
    double t = std::sqrt(xi) * std::sqrt(lambda);
    return -0.5 * root_gap * root_gap + 0.5 * a * std::log(xi / lambda) +
           log_bessel_i_scaled(a, t) - M_LN2;
}

double ncx2_pdf(double xi, int dof, double lambda) {
    return std::exp(ncx2_log_pdf(xi, dof, lambda));
}

double ncx2_log_sf(double xi, int dof, double lambda) {
    if (dof < 1) throw InvalidInput("ncx2: dof must be >= 1");
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw InvalidInput("ncx2: lambda must be finite and >= 0");
    }
    if (xi <= 0.0) return 0.0;
    if (xi == kInf) return -kInf;
    if (lambda == 0.0) return log_gamma_q(0.5 * dof, 0.5 * xi);
    if (lambda > kSeriesMaxLambda) {
        // Three-moment central chi^2 fit (Pearson): X ~ b + c * chi^2_k.
        double nu = dof;
        double c = (nu + 3.0 * lambda) / (nu + 2.0 * lambda);
        double k = std::pow(nu + 2.0 * lambda, 3.0) / ((nu + 3.0 * lambda) * (nu + 3.0 * lambda));
        double b = -lambda * lambda / (nu + 3.0 * lambda);
        return log_gamma_q(0.5 * k, 0.5 * (xi - b) / c);
    }

    // Poisson-weighted window over central chi-squared survival functions,
    // with the upper gamma recurrence Q(s+1,x) = Q(s,x) + x^s e^-x / s!.
    // The three sequences advance by ratio/addition recurrences in a scaled
    // linear domain (one igamma anchor, a handful of logs in total).
    const double half_l = 0.5 * lambda;
    const double x = 0.5 * xi;
    const double j_peak = half_l;
    const double j_drift = 0.5 * std::sqrt(lambda * xi);  // where the summand can peak
    const double hw = 14.0 * std::sqrt(j_peak + 1.0) + 60.0;
    const auto j_lo =
        static_cast<long>(std::max(0.0, std::floor(std::min(j_peak, j_drift) - hw)));
    const auto j_hi = static_cast<long>(std::ceil(std::max(j_peak, j_drift) + hw));

    const double s0 = 0.5 * dof + static_cast<double>(j_lo);
    double lw0 = -half_l + j_lo * std::log(half_l) - std::lgamma(j_lo + 1.0);
    // Anchor the Poisson weights at their in-window peak so w_lin <= ~1.
    const long j_mode = std::max(j_lo, std::min(j_hi, static_cast<long>(half_l)));
    double lw_peak = -half_l + j_mode * std::log(half_l) - std::lgamma(j_mode + 1.0);
    if (half_l == 0.0) {
        lw0 = j_lo == 0 ? 0.0 : -kInf;
        lw_peak = 0.0;
    }
    double w_lin = std::exp(lw0 - lw_peak);

    double lq0 = log_gamma_q(s0, x);
    double q_shift = lq0;  // Q_j = q_lin * exp(q_shift)
    double q_lin = 1.0;
    double t_lin = std::exp(s0 * std::log(x) - x - std::lgamma(s0 + 1.0) - q_shift);

    double sum = 0.0;  // total = sum * exp(lw_peak + q_shift)
    for (long j = j_lo; j <= j_hi; ++j) {
        sum += w_lin * q_lin;
        const double s = 0.5 * dof + static_cast<double>(j);
        q_lin += t_lin;
        t_lin *= x / (s + 1.0);
        w_lin *= half_l / (static_cast<double>(j) + 1.0);
        if (q_lin > 1e250) {
            // Q grew far above its anchor; renormalize all scaled sequences.
            q_lin *= 1e-200;
            t_lin *= 1e-200;
            sum *= 1e-200;
            q_shift += 200.0 * M_LN10;
        }
    }
    double lsum = sum > 0.0 ? std::log(sum) + lw_peak + q_shift : -kInf;
    return std::min(lsum, 0.0);
}

double ncx2_sf(double xi, int dof, double lambda) {
    return std::exp(ncx2_log_sf(xi, dof, lambda));
}

namespace {

// log of the tail approximation SF_dof(xi; lambda) ~ 2 f_dof(xi; lambda) /
// (1 - sqrt(lambda/xi)), valid for xi far above the mean.
double log_sf_upper_asym(double xi, int dof, double lambda) {
    double r = std::sqrt(lambda / xi);
    return ncx2_log_pdf(xi, dof, lambda) + M_LN2 - std::log1p(-r);
}

// log of the lower-tail CDF approximation F_dof(xi; lambda) ~
// 2 f_dof(xi; lambda) / (sqrt(lambda/xi) - 1), valid for xi far below the
// mean with lambda > xi.
double log_cdf_lower_asym(double xi, int dof, double lambda) {
    double r = std::sqrt(lambda / xi);
    return ncx2_log_pdf(xi, dof, lambda) + M_LN2 - std::log(r - 1.0);
}

// (e^la - e^lb) expressed as {log|diff|, sign}; requires nothing about order.
struct LogDiff {
    double log_abs;
    double sign;
};

LogDiff log_diff_exp(double la, double lb) {
    if (la == lb) return {-kInf, 0.0};
    if (la > lb) return {la + log1mexp(lb - la), 1.0};
    return {lb + log1mexp(la - lb), -1.0};
}

}  // namespace

double q_ncx2(double lambda, double xi_lo, double xi_hi, int dof) {
    if (!(xi_lo >= 0.0) || !(xi_lo < xi_hi)) {
        throw InvalidInput("q_ncx2: need 0 <= xi_lo < xi_hi");
    }
    if (dof < 1) throw InvalidInput("q_ncx2: dof must be >= 1");
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw InvalidInput("q_ncx2: lambda must be finite and >= 0");
    }
    if (xi_lo == 0.0 && xi_hi == kInf) return 0.0;

    const double mean = dof + lambda;
    const double sd = std::sqrt(2.0 * (dof + 2.0 * lambda));

    double lf_lo = ncx2_log_pdf(xi_lo, dof + 2, lambda);
    double lf_hi = xi_hi == kInf ? -kInf : ncx2_log_pdf(xi_hi, dof + 2, lambda);
    LogDiff num = log_diff_exp(lf_lo, lf_hi);
    if (num.sign == 0.0) return 0.0;

    double log_den;
    if (xi_lo > mean + kDeepTailSd * sd) {
        // Whole bin deep in the upper tail.
        double ls_lo = log_sf_upper_asym(xi_lo, dof, lambda);
        double ls_hi = xi_hi == kInf ? -kInf : log_sf_upper_asym(xi_hi, dof, lambda);
        log_den = log_diff_exp(ls_lo, ls_hi).log_abs;
    } else if (xi_hi < mean - kDeepTailSd * sd && lambda > xi_hi) {
        // Whole bin deep in the lower tail.
        double lc_hi = log_cdf_lower_asym(xi_hi, dof, lambda);
        double lc_lo = xi_lo == 0.0 ? -kInf : log_cdf_lower_asym(xi_lo, dof, lambda);
        log_den = log_diff_exp(lc_hi, lc_lo).log_abs;
    } else {
        double ls_lo = ncx2_log_sf(xi_lo, dof, lambda);
        double ls_hi = ncx2_log_sf(xi_hi, dof, lambda);
        log_den = log_diff_exp(ls_lo, ls_hi).log_abs;
    }

    double log_q = num.log_abs - log_den;
    if (log_q > 207.0) log_q = 207.0;  // cap |q| at ~1e90, keeps scores finite
    return num.sign * std::exp(log_q);
}

}  // namespace ipsc::specfun
