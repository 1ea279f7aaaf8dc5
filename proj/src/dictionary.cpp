#include "sabc/dictionary.hpp"

#include <algorithm>
#include <charconv>
#include <unordered_set>

namespace sabc {

namespace {

const char* var_name(Var v) { return v == Var::disp ? "x" : "xd"; }

std::string power_label(const char* name, int p)
{
    if (p == 1) return name;
    return std::string(name) + "^" + std::to_string(p);
}

std::optional<Var> parse_var(std::string_view s)
{
    if (s == "x") return Var::disp;
    if (s == "xd") return Var::vel;
    return std::nullopt;
}

[[noreturn]] void bad_label(std::string_view label)
{
    throw InputError("unrecognised dictionary term '" + std::string(label) + "'");
}

}  // namespace

TermSpec TermSpec::monomial(int px, int pv)
{
    if (px < 0 || pv < 0 || px + pv < 1) throw InputError("monomial needs nonnegative powers with px + pv >= 1");
    if (px > kMaxPower || pv > kMaxPower) throw InputError("monomial power exceeds " + std::to_string(kMaxPower));
    return {Kind::monomial, px, pv, Var::disp, Var::disp};
}

std::string TermSpec::label() const
{
    switch (kind) {
    case Kind::constant:
        return "1";
    case Kind::monomial: {
        std::string s;
        if (px > 0) s = power_label("x", px);
        if (pv > 0) {
            if (!s.empty()) s += "*";
            s += power_label("xd", pv);
        }
        return s;
    }
    case Kind::sine:
        return std::string("sin(") + var_name(a) + ")";
    case Kind::absolute:
        return std::string("|") + var_name(a) + "|";
    case Kind::signed_quad:
        return std::string(var_name(a)) + "|" + var_name(b) + "|";
    }
    return {};
}

TermSpec parse_term(std::string_view label)
{
    if (label == "1") return TermSpec::constant();

    if (label.size() > 5 && label.substr(0, 4) == "sin(" && label.back() == ')') {
        if (auto v = parse_var(label.substr(4, label.size() - 5))) return TermSpec::sine(*v);
        bad_label(label);
    }

    if (auto bar = label.find('|'); bar != std::string_view::npos) {
        if (label.back() != '|' || label.size() < 3) bad_label(label);
        auto head = label.substr(0, bar);
        auto inner = label.substr(bar + 1, label.size() - bar - 2);
        auto v = parse_var(inner);
        if (!v) bad_label(label);
        if (head.empty()) return TermSpec::absolute(*v);
        auto h = parse_var(head);
        if (!h) bad_label(label);
        return TermSpec::signed_quad(*h, *v);
    }

    // monomial: factors "x", "xd", "x^n", "xd^n" joined by '*'
    int px = 0;
    int pv = 0;
    std::size_t pos = 0;
    while (pos <= label.size()) {
        auto star = label.find('*', pos);
        auto factor = label.substr(pos, star == std::string_view::npos ? std::string_view::npos : star - pos);
        if (factor.empty()) bad_label(label);
        int p = 1;
        auto caret = factor.find('^');
        auto name = factor.substr(0, caret);
        if (caret != std::string_view::npos) {
            auto digits = factor.substr(caret + 1);
            auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), p);
            if (ec != std::errc() || ptr != digits.data() + digits.size() || p < 1) bad_label(label);
        }
        auto v = parse_var(name);
        if (!v) bad_label(label);
        (*v == Var::disp ? px : pv) += p;
        if (star == std::string_view::npos) break;
        pos = star + 1;
    }
    return TermSpec::monomial(px, pv);
}

std::vector<TermSpec> polynomial_group(int order)
{
    if (order < 1) throw InputError("polynomial group order must be >= 1 (the constant is a separate term)");
    std::vector<TermSpec> out;
    out.reserve(static_cast<std::size_t>(order) + 1);
    for (int i = order; i >= 0; --i) out.push_back(TermSpec::monomial(i, order - i));
    return out;
}

Dictionary::Dictionary(std::vector<TermSpec> terms) : terms_(std::move(terms))
{
    if (terms_.empty()) throw InputError("dictionary must contain at least one term");
    std::unordered_set<std::string> seen;
    for (const auto& t : terms_) {
        if (!seen.insert(t.label()).second) throw InputError("duplicate dictionary term '" + t.label() + "'");
    }
}

Dictionary Dictionary::preset(std::string_view name)
{
    if (name == "pendulum23") return pendulum23();
    if (name == "oscillator21") return oscillator21();
    throw InputError("unknown dictionary preset '" + std::string(name) + "'");
}

Dictionary Dictionary::from_labels(const std::vector<std::string>& labels)
{
    std::vector<TermSpec> terms;
    terms.reserve(labels.size());
    for (const auto& l : labels) terms.push_back(parse_term(l));
    return Dictionary(std::move(terms));
}

std::vector<std::string> Dictionary::labels() const
{
    std::vector<std::string> out;
    out.reserve(terms_.size());
    for (const auto& t : terms_) out.push_back(t.label());
    return out;
}

std::optional<std::size_t> Dictionary::index_of(std::string_view label) const
{
    TermSpec wanted;
    try {
        wanted = parse_term(label);
    } catch (const InputError&) {
        return std::nullopt;
    }
    auto it = std::find(terms_.begin(), terms_.end(), wanted);
    if (it == terms_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - terms_.begin());
}

double Dictionary::predicted_acceleration(const Vector& theta, double x, double v) const
{
    if (static_cast<std::size_t>(theta.size()) != terms_.size()) {
        throw InputError("theta has " + std::to_string(theta.size()) + " entries, dictionary has " +
                         std::to_string(terms_.size()));
    }
    return theta.dot(evaluate(x, v));
}

Dictionary pendulum23()
{
    std::vector<TermSpec> t{TermSpec::constant()};
    for (int a = 1; a <= 5; ++a) {
        auto g = polynomial_group(a);
        t.insert(t.end(), g.begin(), g.end());
    }
    t.push_back(TermSpec::sine(Var::disp));
    t.push_back(TermSpec::sine(Var::vel));
    return Dictionary(std::move(t));
}

Dictionary oscillator21()
{
    std::vector<TermSpec> t{TermSpec::constant()};
    for (int a = 1; a <= 4; ++a) {
        auto g = polynomial_group(a);
        t.insert(t.end(), g.begin(), g.end());
    }
    t.push_back(TermSpec::absolute(Var::disp));
    t.push_back(TermSpec::absolute(Var::vel));
    t.push_back(TermSpec::signed_quad(Var::disp, Var::disp));
    t.push_back(TermSpec::signed_quad(Var::disp, Var::vel));
    t.push_back(TermSpec::signed_quad(Var::vel, Var::disp));
    t.push_back(TermSpec::signed_quad(Var::vel, Var::vel));
    return Dictionary(std::move(t));
}

SparseModel::SparseModel(const Dictionary& dict, const Vector& theta)
{
    if (static_cast<std::size_t>(theta.size()) != dict.size()) throw InputError("theta / dictionary dimension mismatch");
    for (std::size_t j = 0; j < dict.size(); ++j) {
        double c = theta[static_cast<Eigen::Index>(j)];
        if (c == 0.0) continue;
        const TermSpec& t = dict[j];
        terms_.push_back(t);
        coef_.push_back(c);
        if (t.kind == TermSpec::Kind::monomial) {
            max_px_ = std::max(max_px_, t.px);
            max_pv_ = std::max(max_pv_, t.pv);
        }
    }
}

}  // namespace sabc
