#ifndef GRIDSHAPE_RATIONAL_HPP
#define GRIDSHAPE_RATIONAL_HPP

#include <complex>
#include <optional>
#include <vector>

namespace gridshape {

/// Real polynomial with coefficients stored in ascending powers of s.
using Poly = std::vector<double>;

Poly poly_add(const Poly& a, const Poly& b);
Poly poly_mul(const Poly& a, const Poly& b);
Poly poly_scale(const Poly& a, double k);
std::complex<double> poly_eval(const Poly& p, std::complex<double> s);

/// Degree after ignoring trailing (highest-order) coefficients that are zero
/// relative to the largest coefficient. Returns -1 for the zero polynomial.
int poly_degree(const Poly& p);

/// Euclidean division: a = q*b + r with deg(r) < deg(b).
struct PolyDivision {
    Poly quotient;
    Poly remainder;
};
PolyDivision poly_divide(const Poly& a, const Poly& b);

/// SISO transfer function as a ratio of real-coefficient polynomials in s.
/// The denominator is stored with leading coefficient 1. May be improper.
class RationalTransfer {
public:
    /// Zero transfer function.
    RationalTransfer();

    /// Builds num/den; throws InvalidCoefficientError on non-finite input or
    /// a zero denominator. Coefficients are ascending in s.
    RationalTransfer(Poly num, Poly den);

    static RationalTransfer constant(double k);

    const Poly& num() const { return num_; }
    const Poly& den() const { return den_; }

    int num_degree() const;
    int den_degree() const;
    /// den_degree - num_degree; negative for improper functions.
    int relative_degree() const;
    bool is_proper() const { return relative_degree() >= 0; }
    bool is_zero() const;

private:
    Poly num_;
    Poly den_;
};

/// Exact coefficient arithmetic; no pole/zero cancellation is attempted.
RationalTransfer tf_add(const RationalTransfer& lhs, const RationalTransfer& rhs);
RationalTransfer tf_mul(const RationalTransfer& lhs, const RationalTransfer& rhs);
RationalTransfer tf_scale(const RationalTransfer& tf, double k);
RationalTransfer tf_neg(const RationalTransfer& tf);

/// Horner evaluation of num(s)/den(s). Throws PoleEvaluationError when the
/// denominator magnitude falls below 1e-300.
std::complex<double> tf_evaluate(const RationalTransfer& tf, std::complex<double> s);

/// Closes the storage feedback loop around a plant: returns
/// h = 1 / (1/g - c), the transfer from -p_L to the frequency deviation.
///
/// When `cancel` is given, the common factor is divided out of numerator and
/// denominator repeatedly as long as both divisions leave a relative
/// remainder below 1e-9. This is what turns the shaping law's loop into an
/// exact first-order function.
RationalTransfer closed_loop(const RationalTransfer& plant, const RationalTransfer& storage,
                             const std::optional<Poly>& cancel = std::nullopt);

/// Limit of the unit-step response, tf(0), via the final value theorem.
/// Requires a proper, strictly stable tf (pole real parts < -1e-9).
double final_step_value(const RationalTransfer& tf);

/// lim s*tf(s) for s -> inf: the initial slope of the unit-step response.
/// Requires relative degree >= 1; throws ImproperTransferError otherwise.
double initial_step_rate(const RationalTransfer& tf);

/// Roots of the denominator polynomial (companion-matrix eigenvalues).
std::vector<std::complex<double>> tf_poles(const RationalTransfer& tf);

} // namespace gridshape

#endif
