#pragma once

// Independent reference implementations used to freeze expected values.
// Nothing here may call into the code paths under test.

#include <cmath>
#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <vector>

namespace ltrank::test {

/// Average precision computed directly from the definition.
inline double naive_average_precision(const std::vector<std::string>& ranked,
                                      const std::set<std::string>& relevant,
                                      std::size_t total_relevant) {
    double sum = 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        if (relevant.count(ranked[i])) {
            ++hits;
            sum += static_cast<double>(hits) / static_cast<double>(i + 1);
        }
    }
    return sum / static_cast<double>(total_relevant);
}

inline double naive_precision_at_k(const std::vector<std::string>& ranked,
                                   const std::set<std::string>& relevant, std::size_t k) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < ranked.size() && i < k; ++i) {
        if (relevant.count(ranked[i])) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(k);
}

namespace detail {

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa,
                               double fm, double fb, double whole, double eps, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m);
    double rm = 0.5 * (m + b);
    double flm = f(lm);
    double frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * eps) {
        return left + right + delta / 15.0;
    }
    return adaptive_simpson(f, a, m, fa, flm, fm, left, eps / 2.0, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, eps / 2.0, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b, double eps) {
    double m = 0.5 * (a + b);
    double fa = f(a);
    double fm = f(m);
    double fb = f(b);
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, eps, 48);
}

}  // namespace detail

/// Student t density with df degrees of freedom.
inline double t_pdf(double x, double df) {
    double c = std::lgamma((df + 1.0) / 2.0) - std::lgamma(df / 2.0) -
               0.5 * std::log(df * 3.14159265358979323846);
    return std::exp(c - (df + 1.0) / 2.0 * std::log1p(x * x / df));
}

/// Two-sided p-value by adaptive Simpson quadrature over the t density:
/// p = 1 - 2 * integral_0^{|t|} pdf. Independent of the incomplete beta
/// implementation under test.
inline double t_two_sided_p_by_quadrature(double t, double df) {
    double a = std::fabs(t);
    if (a == 0.0) return 1.0;
    double body = detail::integrate([df](double x) { return t_pdf(x, df); }, 0.0, a, 1e-13);
    return 1.0 - 2.0 * body;
}

/// Mutual information of two binary presence variables computed from raw
/// per-document presence flags by direct cell enumeration.
inline double naive_presence_mi(const std::vector<bool>& w_present, const std::vector<bool>& u_present) {
    std::size_t n = w_present.size();
    double cell[2][2] = {{0, 0}, {0, 0}};
    for (std::size_t i = 0; i < n; ++i) {
        cell[w_present[i] ? 1 : 0][u_present[i] ? 1 : 0] += 1.0;
    }
    double mi = 0.0;
    for (int xw = 0; xw < 2; ++xw) {
        for (int xu = 0; xu < 2; ++xu) {
            double joint = cell[xw][xu] / static_cast<double>(n);
            if (joint <= 0.0) continue;
            double pw = (cell[xw][0] + cell[xw][1]) / static_cast<double>(n);
            double pu = (cell[0][xu] + cell[1][xu]) / static_cast<double>(n);
            mi += joint * std::log(joint / (pw * pu));
        }
    }
    return mi;
}

}  // namespace ltrank::test
