#pragma once

#include "sabc/types.hpp"

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sabc {

/// State variable a term depends on: displacement x or velocity xd.
enum class Var { disp, vel };

/// One candidate basis function f(x, xd).
struct TermSpec {
    enum class Kind { constant, monomial, sine, absolute, signed_quad };

    Kind kind = Kind::constant;
    int px = 0;  // monomial power of x
    int pv = 0;  // monomial power of xd
    Var a = Var::disp;  // argument of sin/abs, first factor of a|b|
    Var b = Var::disp;  // second factor of a|b|

    static TermSpec constant() { return {}; }
    static TermSpec monomial(int px, int pv);
    static TermSpec sine(Var v) { return {Kind::sine, 0, 0, v, Var::disp}; }
    static TermSpec absolute(Var v) { return {Kind::absolute, 0, 0, v, Var::disp}; }
    static TermSpec signed_quad(Var a, Var b) { return {Kind::signed_quad, 0, 0, a, b}; }

    /// Canonical label, e.g. "1", "x^2*xd", "sin(x)", "|xd|", "xd|xd|".
    std::string label() const;

    /// Pure power of displacement x^k (k >= 1), the terms that get the wide informed prior.
    bool is_pure_disp_power() const { return kind == Kind::monomial && pv == 0 && px >= 1; }

    friend bool operator==(const TermSpec&, const TermSpec&) = default;
};

/// Highest monomial power accepted in either variable.
inline constexpr int kMaxPower = 15;

/// Inverse of TermSpec::label(). Throws InputError on anything unrecognised.
TermSpec parse_term(std::string_view label);

/// All x^i xd^(order-i) monomials, i = order..0 (descending power of x).
std::vector<TermSpec> polynomial_group(int order);

template <typename Scalar>
Scalar evaluate_term(const TermSpec& t, Scalar x, Scalar v)
{
    using std::abs;
    using std::pow;
    using std::sin;
    auto pick = [&](Var w) { return w == Var::disp ? x : v; };
    switch (t.kind) {
    case TermSpec::Kind::constant:
        return Scalar(1);
    case TermSpec::Kind::monomial: {
        Scalar r(1);
        for (int i = 0; i < t.px; ++i) r *= x;
        for (int i = 0; i < t.pv; ++i) r *= v;
        return r;
    }
    case TermSpec::Kind::sine:
        return sin(pick(t.a));
    case TermSpec::Kind::absolute:
        return abs(pick(t.a));
    case TermSpec::Kind::signed_quad:
        return pick(t.a) * abs(pick(t.b));
    }
    return Scalar(0);
}

/// Ordered library of candidate terms. Positions are the theta indices.
class Dictionary {
public:
    Dictionary() = default;
    explicit Dictionary(std::vector<TermSpec> terms);

    /// "pendulum23" or "oscillator21".
    static Dictionary preset(std::string_view name);
    static Dictionary from_labels(const std::vector<std::string>& labels);

    std::size_t size() const { return terms_.size(); }
    const std::vector<TermSpec>& terms() const { return terms_; }
    const TermSpec& operator[](std::size_t i) const { return terms_[i]; }
    std::vector<std::string> labels() const;
    std::optional<std::size_t> index_of(std::string_view label) const;

    /// Basis values at one state. Throws Error on a non-finite state.
    template <typename Scalar>
    VectorX<Scalar> evaluate(Scalar x, Scalar v) const
    {
        using std::isfinite;
        if (!isfinite(x) || !isfinite(v)) throw Error("dictionary evaluated at a non-finite (diverged) state");
        VectorX<Scalar> out(static_cast<Eigen::Index>(terms_.size()));
        for (std::size_t j = 0; j < terms_.size(); ++j) out[static_cast<Eigen::Index>(j)] = evaluate_term(terms_[j], x, v);
        return out;
    }

    /// theta . B(x, xd)
    double predicted_acceleration(const Vector& theta, double x, double v) const;

private:
    std::vector<TermSpec> terms_;
};

Dictionary pendulum23();
Dictionary oscillator21();

/// Right-hand side restricted to the nonzero coefficients of theta, laid out for
/// repeated evaluation inside the integrator.
class SparseModel {
public:
    SparseModel(const Dictionary& dict, const Vector& theta);

    std::size_t active_terms() const { return terms_.size(); }

    template <typename Scalar>
    Scalar operator()(Scalar x, Scalar v) const
    {
        using std::abs;
        using std::sin;
        std::array<Scalar, kMaxPower + 1> xp;
        std::array<Scalar, kMaxPower + 1> vp;
        xp[0] = Scalar(1);
        vp[0] = Scalar(1);
        for (int i = 1; i <= max_px_; ++i) xp[i] = xp[i - 1] * x;
        for (int i = 1; i <= max_pv_; ++i) vp[i] = vp[i - 1] * v;
        auto pick = [&](Var w) { return w == Var::disp ? x : v; };

        Scalar acc(0);
        for (std::size_t k = 0; k < terms_.size(); ++k) {
            const TermSpec& t = terms_[k];
            Scalar f;
            switch (t.kind) {
            case TermSpec::Kind::constant: f = Scalar(1); break;
            case TermSpec::Kind::monomial: f = xp[t.px] * vp[t.pv]; break;
            case TermSpec::Kind::sine: f = sin(pick(t.a)); break;
            case TermSpec::Kind::absolute: f = abs(pick(t.a)); break;
            case TermSpec::Kind::signed_quad: f = pick(t.a) * abs(pick(t.b)); break;
            default: f = Scalar(0);
            }
            acc += coef_[k] * f;
        }
        return acc;
    }

private:
    std::vector<TermSpec> terms_;
    std::vector<double> coef_;
    int max_px_ = 0;
    int max_pv_ = 0;
};

}  // namespace sabc
