#pragma once

#include "bozk/grid_field.hpp"
#include "bozk/smooth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace bozk {

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on P_n.
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n)
{
    std::vector<double> x(n), w(n);
    for (int i = 0; i < n; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = z;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16)
                break;
        }
        x[i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    return {x, w};
}

/// Integral of smooth_step over [0, u] for u in [0, 1].
inline double smooth_step_integral(double u)
{
    static const auto rule = gauss_legendre(24);
    if (u <= 0.0)
        return 0.0;
    u = std::min(u, 1.0);
    constexpr int panels = 4;
    double h = u / panels, sum = 0.0;
    for (int p = 0; p < panels; ++p) {
        double a = p * h;
        for (std::size_t k = 0; k < rule.first.size(); ++k)
            sum += rule.second[k] * smooth_step(a + 0.5 * h * (rule.first[k] + 1.0));
    }
    return 0.5 * h * sum;
}

enum class CutoffSelector { chi, chi_prime, phi, phi_tilde, psi };

inline CutoffSelector parse_cutoff_selector(const std::string& name)
{
    if (name == "chi") return CutoffSelector::chi;
    if (name == "chi_prime") return CutoffSelector::chi_prime;
    if (name == "phi") return CutoffSelector::phi;
    if (name == "phi_tilde") return CutoffSelector::phi_tilde;
    if (name == "psi") return CutoffSelector::psi;
    throw std::invalid_argument("unknown cutoff selector '" + name + "'");
}

/// @brief The weights chi, chi', phi, phi~, psi attached to (eps, b).
///
/// chi is the normalized antiderivative of the bump
///   beta(x) = S((x - eps)/w) S((b - x)/w),  w = eps / sharpness,
/// which equals 1 on [eps + w, b - w]. psi = S((eps/2 - x)/(eps/4)) drops from
/// 1 to 0 across [eps/4, eps/2]. phi and phi~ close the two partitions of unity,
/// so those identities hold by construction.
class CutoffFamily {
public:
    CutoffFamily(double eps, double b, double sharpness) : eps_(eps), b_(b), w_(eps / sharpness), sharpness_(sharpness)
    {
        if (!(eps > 0.0) || !std::isfinite(eps))
            throw std::invalid_argument("eps must be positive");
        if (!(b >= 5.0 * eps) || !std::isfinite(b))
            throw std::invalid_argument("b must satisfy b >= 5 eps");
        if (!(sharpness >= 1.0))
            throw std::invalid_argument("sharpness must be at least 1");
        mass_ = b_ - eps_ - w_;
    }

    double eps() const { return eps_; }
    double b() const { return b_; }
    double sharpness() const { return sharpness_; }

    double beta(double x) const { return smooth_step((x - eps_) / w_) * smooth_step((b_ - x) / w_); }

    double chi(double x) const
    {
        if (x <= eps_)
            return 0.0;
        if (x >= b_)
            return 1.0;
        double acc = w_ * smooth_step_integral((std::min(x, eps_ + w_) - eps_) / w_);
        if (x > eps_ + w_)
            acc += std::min(x, b_ - w_) - (eps_ + w_);
        if (x > b_ - w_)
            acc += w_ * (0.5 - smooth_step_integral((b_ - x) / w_));
        return std::min(1.0, acc / mass_);
    }

    double chi_prime(double x) const { return beta(x) / mass_; }

    double psi(double x) const { return smooth_step((0.5 * eps_ - x) / (0.25 * eps_)); }

    double phi(double x) const { return 1.0 - chi(x) - psi(x); }

    double phi_tilde(double x) const
    {
        double c = chi(x);
        return std::sqrt(std::max(0.0, 1.0 - c * c - psi(x)));
    }

    double eval(CutoffSelector which, double x) const
    {
        switch (which) {
        case CutoffSelector::chi: return chi(x);
        case CutoffSelector::chi_prime: return chi_prime(x);
        case CutoffSelector::phi: return phi(x);
        case CutoffSelector::phi_tilde: return phi_tilde(x);
        case CutoffSelector::psi: return psi(x);
        }
        throw std::invalid_argument("unknown cutoff selector");
    }

private:
    double eps_, b_, w_, sharpness_, mass_;
};

struct PropertyCheck {
    std::string name;
    bool passed = false;
    double residual = 0.0;  // worst violation found, 0 when none
};

struct FamilyValidation {
    std::vector<PropertyCheck> checks;
    bool all_passed() const
    {
        for (const auto& c : checks)
            if (!c.passed)
                return false;
        return true;
    }
};

/// Samples the family on [-b, 2b] and checks properties (i)-(viii), both
/// partitions of unity, and the separation of supp(chi chi') from supp(psi).
inline FamilyValidation validate_family(const CutoffFamily& fam, int samples = 10000, double tol = 1e-10)
{
    const double eps = fam.eps(), b = fam.b();
    std::vector<double> xs;
    xs.reserve(samples + 16);
    for (int k = 0; k < samples; ++k)
        xs.push_back(-b + 3.0 * b * k / (samples - 1));
    for (double s : {0.25, 0.5, 1.0, 2.0, 3.0})
        xs.push_back(s * eps);
    xs.push_back(b - 2.0 * eps);
    xs.push_back(b);
    std::sort(xs.begin(), xs.end());

    double r1 = 0, r2 = 0, r3 = 0, r4 = 0, r5 = 0, r6 = 0, r7 = 0, r8 = 0, r9a = 0, r9b = 0;
    double prev_chi = -1.0;
    const double lb3 = 1.0 / (10.0 * (b - eps));
    const double lb4 = 0.5 * eps / (b - 3.0 * eps);
    double last_psi = -INFINITY, first_chichi = INFINITY;
    for (double x : xs) {
        const double c = fam.chi(x), cp = fam.chi_prime(x), p = fam.phi(x), pt = fam.phi_tilde(x),
                     s = fam.psi(x);
        r1 = std::max({r1, -cp, prev_chi - c});
        prev_chi = c;
        if (x <= eps)
            r2 = std::max(r2, std::abs(c));
        if (x >= b)
            r2 = std::max(r2, std::abs(c - 1.0));
        if (x >= 2.0 * eps && x <= b - 2.0 * eps)
            r3 = std::max(r3, lb3 - cp);
        if (x > 3.0 * eps)
            r4 = std::max(r4, lb4 - c);
        if (x < eps || x > b)
            r5 = std::max(r5, std::abs(cp));
        if (x < 0.25 * eps || x > b)
            r6 = std::max({r6, std::abs(p), std::abs(pt)});
        if (x >= 0.5 * eps && x <= eps)
            r7 = std::max({r7, std::abs(p - 1.0), std::abs(pt - 1.0)});
        if (x > 0.5 * eps)
            r8 = std::max(r8, std::abs(s));
        r9a = std::max(r9a, std::abs(c + p + s - 1.0));
        r9b = std::max(r9b, std::abs(c * c + pt * pt + s - 1.0));
        if (s > 0.0)
            last_psi = std::max(last_psi, x);
        if (c * cp > 0.0)
            first_chichi = std::min(first_chichi, x);
    }
    const double sep = first_chichi - last_psi;
    FamilyValidation v;
    auto add = [&](const std::string& name, double r, bool strict_zero) {
        v.checks.push_back({name, strict_zero ? r <= 0.0 : r <= tol, std::max(r, 0.0)});
    };
    add("(i) chi nondecreasing", r1, false);
    add("(ii) chi = 0 left of eps, 1 right of b", r2, true);
    add("(iii) chi' >= 1/(10(b-eps)) on [2eps, b-2eps]", r3, true);
    add("(iv) chi >= eps/(2(b-3eps)) for x > 3eps", r4, true);
    add("(v) supp chi' in [eps, b]", r5, true);
    add("(vi) supp phi, phi~ in [eps/4, b]", r6, true);
    add("(vii) phi = phi~ = 1 on [eps/2, eps]", r7, false);
    add("(viii) supp psi in (-inf, eps/2]", r8, true);
    add("partition chi + phi + psi = 1", r9a, false);
    add("partition chi^2 + phi~^2 + psi = 1", r9b, false);
    v.checks.push_back({"dist(supp chi chi', supp psi) >= eps/2", sep >= 0.5 * eps, std::max(0.0, 0.5 * eps - sep)});
    return v;
}

/// Builds a family for (eps, b). Property (iii) is validated after
/// construction and the bump is sharpened and rebuilt if it fails.
inline CutoffFamily make_family(double eps, double b)
{
    if (!(eps > 0.0))
        throw std::invalid_argument("eps must be positive");
    if (!(b >= 5.0 * eps))
        throw std::invalid_argument("b must satisfy b >= 5 eps");
    for (double sharpness = 1.0; sharpness <= 64.0; sharpness *= 2.0) {
        CutoffFamily fam(eps, b, sharpness);
        if (validate_family(fam).all_passed())
            return fam;
    }
    throw std::runtime_error("no cutoff family passed validation");
}

inline double eval_shifted(const CutoffFamily& fam, CutoffSelector which, double x, double v, double t)
{
    if (v < 0.0 || t < 0.0)
        throw std::invalid_argument("eval_shifted needs v >= 0 and t >= 0");
    return fam.eval(which, x + v * t);
}

/// Multiplies a field by w(x + v t)^power with w the selected cutoff; the
/// weight does not depend on y.
inline Field weight_field(const Field& f, const CutoffFamily& fam, CutoffSelector which, double v, double t, int power)
{
    if (power != 1 && power != 2)
        throw std::invalid_argument("power must be 1 or 2");
    const Grid& g = f.grid();
    std::vector<double> out = f.values();
    for (int i = 0; i < g.nx; ++i) {
        double w = eval_shifted(fam, which, g.x(i), v, t);
        if (power == 2)
            w *= w;
        for (int j = 0; j < g.ny; ++j)
            out[static_cast<std::size_t>(i) * g.ny + j] *= w;
    }
    return Field::from_values(g, std::move(out));
}

} // namespace bozk
