// Stand-alone generator for the frozen reference constants used in the test
// suite.  This program intentionally shares no code with the library: every
// value below is computed from first principles with generic quadrature, so
// the numbers it prints are independent cross-checks, not round-trips.
//
// Each constant is evaluated by two unrelated methods (adaptive Simpson and
// Richardson-extrapolated midpoint rule); the printed |diff| column shows the
// agreement between the two, which bounds the trustworthy digits.
//
// Usage:  oracles            prints all constants to stdout
//
// The printed values are copied verbatim into the tests that need them, with
// a comment pointing back at this tool.

#include <cmath>
#include <cstdio>
#include <functional>

namespace {

using Fn = std::function<double(double)>;

/// Classic adaptive Simpson quadrature on [a,b] with absolute tolerance eps.
double adaptive_simpson_rec(const Fn& f, double a, double b, double fa,
                            double fm, double fb, double whole, double eps,
                            int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * eps) {
        return left + right + (left + right - whole) / 15.0;
    }
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1)
         + adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1);
}

double adaptive_simpson(const Fn& f, double a, double b, double eps = 1e-15) {
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, eps, 40);
}

/// Composite midpoint rule with n panels.
double midpoint(const Fn& f, double a, double b, long n) {
    const double h = (b - a) / static_cast<double>(n);
    double s = 0.0;
    for (long i = 0; i < n; ++i) {
        s += f(a + (static_cast<double>(i) + 0.5) * h);
    }
    return s * h;
}

/// Two-level Richardson extrapolation of the midpoint rule (error ~ h^2,
/// so the n / 2n combination (4*I_{2n} - I_n) / 3 cancels the leading term).
double midpoint_richardson(const Fn& f, double a, double b, long n) {
    const double coarse = midpoint(f, a, b, n);
    const double fine = midpoint(f, a, b, 2 * n);
    return (4.0 * fine - coarse) / 3.0;
}

void report(const char* label, double simpson, double richardson) {
    std::printf("%-34s % .17e   |diff| = %.2e\n", label, simpson,
                std::fabs(simpson - richardson));
}

}  // namespace

int main() {
    std::printf("reference constants (adaptive Simpson, cross-checked by "
                "Richardson midpoint)\n\n");

    // Iterated integrals of the smooth curve W(z) = (cos z, sin z) over
    // [0, pi], with the convention
    //     I_{ij}(a,b) = \int_a^b (W_i(z) - W_i(a)) dW_j(z),
    // evaluated here in derivative form (the library instead accumulates
    // increment products, a genuinely different discretisation).
    const Fn f12 = [](double z) { return (std::cos(z) - 1.0) * std::cos(z); };
    const Fn f21 = [](double z) { return std::sin(z) * (-std::sin(z)); };
    const double i12_s = adaptive_simpson(f12, 0.0, M_PI);
    const double i12_r = midpoint_richardson(f12, 0.0, M_PI, 1L << 20);
    const double i21_s = adaptive_simpson(f21, 0.0, M_PI);
    const double i21_r = midpoint_richardson(f21, 0.0, M_PI, 1L << 20);
    report("levy I12(cos,sin;0,pi)", i12_s, i12_r);
    report("levy I21(cos,sin;0,pi)", i21_s, i21_r);
    report("levy area 0.5*(I12-I21)", 0.5 * (i12_s - i21_s),
           0.5 * (i12_r - i21_r));

    // The singular-in-time model integral \int_0^1 s^{-1/2} cos(s) ds.
    // Substituting s = u^2 removes the singularity exactly:
    //     \int_0^1 s^{-1/2} cos s ds = 2 \int_0^1 cos(u^2) du,
    // and the right-hand side is smooth, so plain quadrature converges fast.
    const Fn fres = [](double u) { return 2.0 * std::cos(u * u); };
    const double fr_s = adaptive_simpson(fres, 0.0, 1.0);
    const double fr_r = midpoint_richardson(fres, 0.0, 1.0, 1L << 20);
    report("int_0^1 s^{-1/2} cos s ds", fr_s, fr_r);

    // Weighted p-variation style check value used by the norm tests:
    // sup-norm plus scaled Holder seminorm of f(x) = sin x on [-4,4] at
    // alpha = 1/2.  The seminorm of sin at exponent 1/2 on a symmetric
    // interval is attained on a pair straddling 0; scan densely.
    {
        const double alpha = 0.5;
        long n = 1L << 14;
        double best = 0.0;
        for (long i = 0; i <= n; ++i) {
            const double x = -4.0 + 8.0 * static_cast<double>(i) / static_cast<double>(n);
            for (long j = i + 1; j <= n; j += 37) {  // strided second index
                const double y = -4.0 + 8.0 * static_cast<double>(j) / static_cast<double>(n);
                const double r = std::fabs(std::sin(y) - std::sin(x))
                               / std::pow(y - x, alpha);
                if (r > best) best = r;
            }
        }
        std::printf("%-34s % .17e   (dense scan, strided)\n",
                    "holder_{1/2}(sin;[-4,4]) approx", best);
    }

    return 0;
}
