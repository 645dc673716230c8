#include "gridshape/rational.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

#include "gridshape/errors.hpp"

namespace gridshape {

namespace {

bool all_finite(const Poly& p) {
    return std::all_of(p.begin(), p.end(), [](double c) { return std::isfinite(c); });
}

double max_abs(const Poly& p) {
    double m = 0.0;
    for (double c : p) m = std::max(m, std::abs(c));
    return m;
}

// Drop trailing coefficients that are zero relative to the polynomial scale.
Poly trimmed(Poly p) {
    const double tol = 4.0 * std::numeric_limits<double>::epsilon() * max_abs(p);
    while (p.size() > 1 && std::abs(p.back()) <= tol) p.pop_back();
    if (p.empty()) p.push_back(0.0);
    return p;
}

} // namespace

Poly poly_add(const Poly& a, const Poly& b) {
    Poly r(std::max(a.size(), b.size()), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] += b[i];
    return r;
}

Poly poly_mul(const Poly& a, const Poly& b) {
    Poly r(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

Poly poly_scale(const Poly& a, double k) {
    Poly r = a;
    for (double& c : r) c *= k;
    return r;
}

std::complex<double> poly_eval(const Poly& p, std::complex<double> s) {
    std::complex<double> acc = 0.0;
    for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * s + *it;
    return acc;
}

int poly_degree(const Poly& p) {
    const double tol = 4.0 * std::numeric_limits<double>::epsilon() * max_abs(p);
    for (int i = static_cast<int>(p.size()) - 1; i >= 0; --i)
        if (std::abs(p[i]) > tol) return i;
    return -1;
}

PolyDivision poly_divide(const Poly& a, const Poly& b) {
    const int db = poly_degree(b);
    if (db < 0) throw InvalidCoefficientError("polynomial division by zero polynomial");
    Poly rem = a;
    int da = poly_degree(rem);
    if (da < db) return {Poly{0.0}, trimmed(rem)};
    Poly quot(static_cast<std::size_t>(da - db) + 1, 0.0);
    for (int k = da - db; k >= 0; --k) {
        const double factor = rem[static_cast<std::size_t>(k + db)] / b[static_cast<std::size_t>(db)];
        quot[static_cast<std::size_t>(k)] = factor;
        for (int i = 0; i <= db; ++i)
            rem[static_cast<std::size_t>(k + i)] -= factor * b[static_cast<std::size_t>(i)];
    }
    rem.resize(static_cast<std::size_t>(std::max(db, 1)));
    return {trimmed(quot), trimmed(rem)};
}

RationalTransfer::RationalTransfer() : num_{0.0}, den_{1.0} {}

RationalTransfer::RationalTransfer(Poly num, Poly den) {
    if (num.empty()) num.push_back(0.0);
    if (!all_finite(num) || !all_finite(den))
        throw InvalidCoefficientError("transfer function has non-finite coefficients");
    den = trimmed(std::move(den));
    const int dd = poly_degree(den);
    if (den.empty() || dd < 0)
        throw InvalidCoefficientError("transfer function denominator is zero");
    const double lead = den.back();
    for (double& c : den) {
        c /= lead;
        if (c == 0.0) c = 0.0;  // canonical +0
    }
    for (double& c : num) {
        c /= lead;
        if (c == 0.0) c = 0.0;
    }
    if (!all_finite(num) || !all_finite(den))
        throw InvalidCoefficientError("transfer function normalization overflowed");
    num_ = trimmed(std::move(num));
    den_ = std::move(den);
}

RationalTransfer RationalTransfer::constant(double k) {
    return RationalTransfer(Poly{k}, Poly{1.0});
}

int RationalTransfer::num_degree() const { return std::max(poly_degree(num_), 0); }
int RationalTransfer::den_degree() const { return std::max(poly_degree(den_), 0); }
int RationalTransfer::relative_degree() const { return den_degree() - num_degree(); }

bool RationalTransfer::is_zero() const { return poly_degree(num_) < 0; }

namespace {

bool same_poly(const Poly& a, const Poly& b) {
    if (a.size() != b.size()) return false;
    const double tol = 4.0 * std::numeric_limits<double>::epsilon() *
                       std::max(max_abs(a), max_abs(b));
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::abs(a[i] - b[i]) > tol) return false;
    return true;
}

} // namespace

RationalTransfer tf_add(const RationalTransfer& lhs, const RationalTransfer& rhs) {
    // Identical denominators add over the common one; this keeps sums of
    // like terms coefficient-exact. No factoring is attempted otherwise.
    if (same_poly(lhs.den(), rhs.den()))
        return RationalTransfer(poly_add(lhs.num(), rhs.num()), lhs.den());
    return RationalTransfer(
        poly_add(poly_mul(lhs.num(), rhs.den()), poly_mul(rhs.num(), lhs.den())),
        poly_mul(lhs.den(), rhs.den()));
}

RationalTransfer tf_mul(const RationalTransfer& lhs, const RationalTransfer& rhs) {
    return RationalTransfer(poly_mul(lhs.num(), rhs.num()), poly_mul(lhs.den(), rhs.den()));
}

RationalTransfer tf_scale(const RationalTransfer& tf, double k) {
    return RationalTransfer(poly_scale(tf.num(), k), tf.den());
}

RationalTransfer tf_neg(const RationalTransfer& tf) { return tf_scale(tf, -1.0); }

std::complex<double> tf_evaluate(const RationalTransfer& tf, std::complex<double> s) {
    const std::complex<double> d = poly_eval(tf.den(), s);
    if (std::abs(d) < 1e-300)
        throw PoleEvaluationError("transfer function evaluated at a pole");
    return poly_eval(tf.num(), s) / d;
}

RationalTransfer closed_loop(const RationalTransfer& plant, const RationalTransfer& storage,
                             const std::optional<Poly>& cancel) {
    // h = 1/(1/g - c) = gn*cd / (gd*cd - cn*gn)
    Poly num = poly_mul(plant.num(), storage.den());
    Poly den = poly_add(poly_mul(plant.den(), storage.den()),
                        poly_scale(poly_mul(storage.num(), plant.num()), -1.0));
    if (poly_degree(den) < 0)
        throw DegenerateLoopError("closed loop has an identically zero denominator");
    if (cancel) {
        // Divide the known common factor out of both polynomials while the
        // division stays exact to within a 1e-9 relative remainder.
        for (;;) {
            const PolyDivision qn = poly_divide(num, *cancel);
            const PolyDivision qd = poly_divide(den, *cancel);
            const bool exact_n = max_abs(qn.remainder) <= 1e-9 * std::max(1.0, max_abs(num));
            const bool exact_d = max_abs(qd.remainder) <= 1e-9 * std::max(1.0, max_abs(den));
            if (!exact_n || !exact_d) break;
            if (poly_degree(qd.quotient) < 0) break;
            num = qn.quotient;
            den = qd.quotient;
        }
    }
    if (poly_degree(den) < 0)
        throw DegenerateLoopError("closed loop has an identically zero denominator");
    return RationalTransfer(std::move(num), std::move(den));
}

std::vector<std::complex<double>> tf_poles(const RationalTransfer& tf) {
    const int n = poly_degree(tf.den());
    std::vector<std::complex<double>> poles;
    if (n <= 0) return poles;
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i + 1 < n; ++i) companion(i, i + 1) = 1.0;
    const double lead = tf.den()[static_cast<std::size_t>(n)];
    for (int j = 0; j < n; ++j)
        companion(n - 1, j) = -tf.den()[static_cast<std::size_t>(j)] / lead;
    const Eigen::VectorXcd ev = companion.eigenvalues();
    poles.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) poles.push_back(ev(i));
    return poles;
}

double final_step_value(const RationalTransfer& tf) {
    if (!tf.is_proper())
        throw ImproperTransferError("final value requires a proper transfer function");
    for (const auto& p : tf_poles(tf)) {
        if (p.real() >= -1e-9)
            throw InstabilityError("final value requires all poles strictly in the left half plane");
    }
    return tf.num().front() / tf.den().front();
}

double initial_step_rate(const RationalTransfer& tf) {
    const int rel = tf.relative_degree();
    if (rel < 1)
        throw ImproperTransferError("initial step rate requires relative degree >= 1");
    if (rel > 1) return 0.0;
    // den is monic, so the limit is just the leading numerator coefficient.
    return tf.num()[static_cast<std::size_t>(tf.num_degree())];
}

} // namespace gridshape
