#pragma once

#include <complex>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

namespace bacoord {

using Complex = std::complex<double>;

/// Dense complex polynomial, coefficients stored lowest degree first.
///
/// The highest stored coefficient is nonzero unless the polynomial is the zero
/// polynomial, which has no coefficients and degree -1.
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<Complex> coeffs);
    Polynomial(std::initializer_list<Complex> coeffs);

    static Polynomial constant(Complex c);
    /// (z - root)^power
    static Polynomial linear_power(Complex root, int power);
    /// prod (z - root_k)
    static Polynomial from_roots(std::span<const Complex> roots);

    int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
    bool is_zero() const noexcept { return coeffs_.empty(); }
    const std::vector<Complex>& coefficients() const noexcept { return coeffs_; }
    Complex coefficient(int k) const noexcept;
    Complex leading() const noexcept { return coeffs_.empty() ? Complex{} : coeffs_.back(); }

    Complex operator()(Complex z) const noexcept;
    /// Sum of |c_k| |z|^k, the natural magnitude against which a value at z is judged.
    double magnitude_at(Complex z) const noexcept;

    Polynomial derivative() const;
    /// Coefficients of p(center + t) in powers of t, truncated to `terms` entries.
    std::vector<Complex> taylor(Complex center, int terms) const;
    /// Magnitude scale for each Taylor coefficient at `center` (see magnitude_at).
    std::vector<double> taylor_magnitudes(Complex center, int terms) const;

    /// Synthetic division by (z - root); the remainder is returned separately.
    std::pair<Polynomial, Complex> deflate(Complex root) const;
    /// Euclidean division: *this = q * divisor + r with deg r < deg divisor.
    std::pair<Polynomial, Polynomial> divmod(const Polynomial& divisor) const;

    Polynomial conjugated() const;
    Polynomial pow(int exponent) const;

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator*(Complex s, const Polynomial& p);
    Polynomial operator-() const;

private:
    void trim();
    std::vector<Complex> coeffs_;
};

}  // namespace bacoord
